//! Rational-arithmetic enumeration for polynomial curves and exact shifts.
//! Floating-point inputs (window, threshold, coefficients) are read as the
//! dyadic rationals they are.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

use super::{ResonantPoint, ShiftedQuery, Threshold};
use crate::{Error, Result};

fn rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::NonFinite { x })
}

pub(super) fn check_supported(query: &ShiftedQuery) -> Result<()> {
    if !query.curve.is_polynomial() {
        return Err(Error::invalid("exact rational policy needs a polynomial curve"));
    }
    if !query.theta.is_exact() {
        return Err(Error::invalid("exact rational policy needs a rational theta"));
    }
    Ok(())
}

pub(super) fn enumerate(query: &ShiftedQuery, q_lo: u64) -> Result<Vec<ResonantPoint>> {
    check_supported(query)?;
    let coeffs: Vec<BigRational> =
        query.curve.poly_derivative(0).unwrap_or(&[]).iter().map(|&c| rational(c)).collect::<Result<_>>()?;
    let theta1 = query.theta.first.exact().expect("checked").clone();
    let theta2 = query.theta.second.exact().expect("checked").clone();
    let (lo, hi) = (rational(query.window.lo)?, rational(query.window.hi)?);
    let half = BigRational::new(1.into(), 2.into());

    let mut out = Vec::new();
    for q in q_lo..=query.q_max {
        let qr = BigRational::from_integer(BigInt::from(q));
        let a_lo = (&qr * &lo - &theta1).ceil().to_integer();
        let a_hi = (&qr * &hi - &theta1).floor().to_integer();
        let bound = match &query.threshold {
            Threshold::Fixed(t) => rational(*t)? * &qr,
            Threshold::PerQ(d) => rational(*d)?,
            Threshold::Scaled(psi) => rational(psi.eval(q))?,
        };
        let mut a = a_lo;
        while a <= a_hi {
            let x = (BigRational::from_integer(a.clone()) + &theta1) / &qr;
            let fx = coeffs.iter().rev().fold(BigRational::from_integer(0.into()), |acc, c| acc * &x + c);
            let y = &qr * fx - &theta2;
            let p2 = (&y + &half).floor();
            let dist = (&y - &p2).abs();
            if dist < bound {
                let p1 = a.to_i64().ok_or_else(|| Error::invalid("numerator out of range"))?;
                let p2 = p2.to_integer().to_i64().ok_or_else(|| Error::invalid("numerator out of range"))?;
                out.push(ResonantPoint {
                    p1,
                    p2,
                    q,
                    x: x.to_f64().unwrap_or(f64::NAN),
                    residual: dist.to_f64().unwrap_or(f64::NAN) / q as f64,
                });
            }
            a += 1;
        }
    }
    Ok(out)
}
