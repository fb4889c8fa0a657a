//! Closed real intervals and the measure of finite unions of them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A closed interval `[lo, hi]`. The empty interval is represented with
/// `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] has non-finite endpoint")));
        }
        if lo > hi {
            return Err(Error::invalid(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub const fn empty() -> Self {
        Self { lo: 1.0, hi: 0.0 }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.hi - self.lo
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.is_empty() || (self.lo <= other.lo && other.hi <= self.hi)
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo > hi {
            Interval::empty()
        } else {
            Interval { lo, hi }
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// Merges closed intervals into a sorted list of disjoint closed intervals.
/// Empty inputs are dropped; touching intervals are merged.
pub fn merge(intervals: &[Interval]) -> Vec<Interval> {
    let mut sorted: Vec<Interval> = intervals.iter().copied().filter(|i| !i.is_empty()).collect();
    sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
    let mut merged: Vec<Interval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match merged.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => merged.push(iv),
        }
    }
    merged
}

/// Lebesgue measure of the union of `intervals`, each clipped to `window`.
pub fn union_measure_within(intervals: &[Interval], window: &Interval) -> f64 {
    let clipped: Vec<Interval> = intervals.iter().map(|i| i.intersect(window)).collect();
    merge(&clipped).iter().map(Interval::len).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn merge_basic() {
        let m = merge(&[iv(0.0, 1.0), iv(0.5, 2.0), iv(3.0, 4.0), iv(2.0, 2.5)]);
        assert_eq!(m, vec![iv(0.0, 2.5), iv(3.0, 4.0)]);
    }

    #[test]
    fn measure_clips_to_window() {
        let w = iv(0.1, 0.9);
        let m = union_measure_within(&[iv(0.0, 0.2), iv(0.15, 0.3), iv(0.8, 5.0)], &w);
        assert!((m - (0.2 + 0.1)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::new(f64::NAN, 0.0).is_err());
        assert!(Interval::empty().is_empty());
        assert_eq!(Interval::empty().len(), 0.0);
    }

    fn arb_intervals() -> impl Strategy<Value = Vec<Interval>> {
        prop::collection::vec((-10.0f64..10.0, 0.0f64..3.0), 0..40)
            .prop_map(|v| v.into_iter().map(|(a, w)| Interval { lo: a, hi: a + w }).collect())
    }

    proptest! {
        #[test]
        fn merge_is_order_independent_and_idempotent(mut ivs in arb_intervals(), seed in any::<u64>()) {
            let w = Interval { lo: -5.0, hi: 5.0 };
            let m1 = union_measure_within(&ivs, &w);
            // deterministic shuffle
            let n = ivs.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (s >> 33) as usize % (i + 1);
                ivs.swap(i, j);
            }
            let m2 = union_measure_within(&ivs, &w);
            prop_assert_eq!(m1.to_bits(), m2.to_bits());
            let merged = merge(&ivs);
            prop_assert_eq!(merge(&merged), merged.clone());
            for pair in merged.windows(2) {
                prop_assert!(pair[0].hi < pair[1].lo);
            }
            prop_assert!(m1 <= w.len() + 1e-12);
        }
    }
}
