use rayon::{ThreadPool, ThreadPoolBuilder};

/// Worker thread count for the data-parallel paths.
///
/// Outputs never depend on this value; work is split into contiguous
/// denominator chunks and merged in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    /// Use the available parallelism.
    #[default]
    Auto,
    Fixed(usize),
}

impl Threads {
    pub fn count(self) -> usize {
        match self {
            Threads::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Threads::Fixed(n) => n.max(1),
        }
    }

    pub(crate) fn pool(self) -> ThreadPool {
        ThreadPoolBuilder::new()
            .num_threads(self.count())
            .build()
            .expect("failed to build thread pool")
    }
}

/// Splits `lo..=hi` into contiguous chunks of roughly equal work for
/// quadratic-cost loops (work per q grows linearly with q).
pub(crate) fn quadratic_chunks(lo: u64, hi: u64, target: usize) -> Vec<(u64, u64)> {
    if lo > hi {
        return Vec::new();
    }
    let target = target.max(1) as u64;
    let total = hi - lo + 1;
    if total <= target {
        return (lo..=hi).map(|q| (q, q)).collect();
    }
    // Equal-area split of ∫ q dq between lo and hi.
    let (a, b) = (lo as f64, hi as f64 + 1.0);
    let mut out = Vec::with_capacity(target as usize);
    let mut start = lo;
    for k in 1..=target {
        let frac = k as f64 / target as f64;
        let edge = (a * a + frac * (b * b - a * a)).sqrt().floor() as u64;
        let end = if k == target { hi } else { edge.clamp(start, hi) };
        if end >= start {
            out.push((start, end));
            start = end + 1;
        }
        if start > hi {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        for (lo, hi, t) in [(1, 1000, 16), (5, 7, 16), (1, 1, 4), (100, 20000, 64)] {
            let chunks = quadratic_chunks(lo, hi, t);
            let mut next = lo;
            for &(s, e) in &chunks {
                assert_eq!(s, next);
                assert!(e >= s);
                next = e + 1;
            }
            assert_eq!(next, hi + 1);
        }
        assert!(quadratic_chunks(5, 4, 8).is_empty());
    }
}
