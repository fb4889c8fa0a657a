//! Exhaustive reference count in double-double arithmetic.
//!
//! Deliberately shares nothing with the fast path beyond the curve
//! definition: a wider numerator sweep, no rounding shortcut for the nearest
//! integer, no parallelism and no early exits. Under the exact policy the
//! sweep runs in plain rational arithmetic instead.

use num_rational::BigRational;

use super::{Shift, Theta, TolerancePolicy};
use crate::curves::Curve;
use crate::interval::Interval;
use crate::{Error, Result};

/// Largest `Q` the oracle accepts.
pub const ORACLE_MAX_Q: u64 = 512;

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let t = two_sum(self.lo, o.lo);
        let s = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(s.hi, s.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        quick_two_sum(p.hi, p.lo + (self.hi * o.lo + self.lo * o.hi))
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.sub(two_prod(q1, d));
        let q2 = (r.hi + r.lo) / d;
        quick_two_sum(q1, q2)
    }

    /// Sign of `self − x`.
    fn cmp_f64(self, x: f64) -> std::cmp::Ordering {
        let d = self.sub(Dd::from(x));
        (d.hi + d.lo).partial_cmp(&0.0).unwrap_or(std::cmp::Ordering::Equal)
    }

    fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    fn lt(self, o: Dd) -> bool {
        self.hi < o.hi || (self.hi == o.hi && self.lo < o.lo)
    }
}

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFinite { x })
}

fn exact_frac(shift: &Shift) -> Result<BigRational> {
    let r = shift.exact().ok_or_else(|| Error::invalid("exact counting needs rational shifts"))?;
    Ok(r - BigRational::from_integer(shift.int().into()))
}

/// Plain rational arithmetic throughout; only polynomial curves.
fn rational_count(curve: &Curve, interval: Interval, q_max: u64, delta: f64, theta: &Theta) -> Result<u64> {
    let coeffs = curve.poly_derivative(0).ok_or_else(|| Error::invalid("exact counting needs a polynomial curve"))?;
    let coeffs: Vec<BigRational> = coeffs.iter().map(|&c| rational(c)).collect::<Result<_>>()?;
    let (lo, hi, delta) = (rational(interval.lo)?, rational(interval.hi)?, rational(delta)?);
    let (frac1, frac2) = (exact_frac(&theta.first)?, exact_frac(&theta.second)?);
    let one = BigRational::from_integer(1.into());
    let mut count = 0;
    for q in 1..=q_max {
        let qr = BigRational::from_integer(q.into());
        let first = (q as f64 * interval.lo).floor() as i64 - 2;
        let last = (q as f64 * interval.hi).ceil() as i64 + 2;
        for a in first..=last {
            let x = (BigRational::from_integer(a.into()) + &frac1) / &qr;
            if x < lo || x > hi {
                continue;
            }
            let fx = coeffs.iter().rev().fold(BigRational::from_integer(0.into()), |acc, c| acc * &x + c);
            let y = &qr * fx - &frac2;
            let r = &y - y.floor();
            let dist = if &r + &r <= one { r } else { &one - r };
            count += u64::from(dist < delta);
        }
    }
    Ok(count)
}

fn eval_dd(curve: &Curve, x: Dd) -> Dd {
    match curve.poly_derivative(0) {
        Some(c) => c.iter().rev().fold(Dd::from(0.0), |acc, &a| acc.mul(x).add(Dd::from(a))),
        None => Dd::from(curve.f(x.hi + x.lo)),
    }
}

/// Reference value of the counting function `N(Q, δ, θ)` for `Q ≤ 512`,
/// using the same tolerance policy semantics as [`super::count_n`].
pub fn brute_force_oracle(
    curve: &Curve,
    interval: Interval,
    q_max: u64,
    delta: f64,
    theta: &Theta,
    policy: TolerancePolicy,
) -> Result<u64> {
    if q_max > ORACLE_MAX_Q {
        return Err(Error::ComputeGuard { q: q_max, limit: ORACLE_MAX_Q });
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    if interval.is_empty() {
        return Ok(0);
    }
    let tau = match policy {
        TolerancePolicy::StrictFloat(t) => t,
        TolerancePolicy::ExactRational => return rational_count(curve, interval, q_max, delta, theta),
    };
    let (lo, hi) = (interval.lo - tau, interval.hi + tau);
    let limit = two_sum(delta, -tau);
    let (frac1, frac2) = (Dd::from(theta.first.frac()), Dd::from(theta.second.frac()));
    let mut count = 0u64;
    let mut q = 1u64;
    while q <= q_max {
        let qf = q as f64;
        let first = (qf * interval.lo).floor() as i64 - 2;
        let last = (qf * interval.hi).ceil() as i64 + 2;
        let mut a = first;
        while a <= last {
            let x = Dd::from(a as f64).add(frac1).div_f64(qf);
            let inside = x.cmp_f64(lo).is_ge() & x.cmp_f64(hi).is_le();
            let y = Dd::from(qf).mul(eval_dd(curve, x)).sub(frac2);
            let base = y.hi.floor();
            let close = [base - 1.0, base, base + 1.0].iter().any(|&k| y.sub(Dd::from(k)).abs().lt(limit));
            count += u64::from(inside & close);
            a += 1;
        }
        q += 1;
    }
    Ok(count)
}
