//! Real polynomials with ascending coefficients and root isolation.

/// Drops trailing zero coefficients.
pub(crate) fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.last() == Some(&0.0) {
        c.pop();
    }
    c
}

pub(crate) fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc.mul_add(x, a))
}

pub(crate) fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| k as f64 * a).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval(c, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots in `[lo, hi]`, sorted, found by isolating between the roots of
/// the derivative. Returns `None` for the zero polynomial.
pub(crate) fn roots_in(c: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let c = trim(c.to_vec());
    if c.is_empty() {
        return None;
    }
    if c.len() == 1 {
        return Some(Vec::new());
    }
    let scale = c.iter().fold(0.0f64, |m, a| m.max(a.abs())) * (1.0 + lo.abs().max(hi.abs())).powi(c.len() as i32);
    let touch = 1e-13 * scale;
    let crit = roots_in(&derivative(&c), lo, hi).unwrap_or_default();
    let mut knots = vec![lo];
    knots.extend(crit.iter().copied().filter(|&x| x > lo && x < hi));
    knots.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    let push = |x: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&r| (x - r).abs() > 1e-12 * (1.0 + x.abs())) {
            roots.push(x);
        }
    };
    for (i, &k) in knots.iter().enumerate() {
        if eval(&c, k).abs() <= touch {
            push(k, &mut roots);
        }
        if let Some(&next) = knots.get(i + 1) {
            let (fa, fb) = (eval(&c, k), eval(&c, next));
            if fa.abs() > touch && fb.abs() > touch && (fa < 0.0) != (fb < 0.0) {
                push(bisect(&c, k, next), &mut roots);
            }
        }
    }
    Some(roots)
}
