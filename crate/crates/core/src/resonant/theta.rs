use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// One coordinate of the inhomogeneous shift, kept as `int + frac` with
/// `frac ∈ [0, 1)` so integer shifts never touch the fractional part.
#[derive(Debug, Clone, PartialEq)]
pub struct Shift {
    int: i64,
    frac: f64,
    exact: Option<BigRational>,
}

impl Shift {
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || x.abs() > 1e15 {
            return Err(Error::invalid(format!("shift component {x} is not a finite moderate real")));
        }
        let int = x.floor();
        Ok(Self { int: int as i64, frac: x - int, exact: BigRational::from_float(x) })
    }

    fn from_rational(r: BigRational) -> Result<Self> {
        let int = r.floor();
        let frac = (&r - &int).to_f64().ok_or_else(|| Error::invalid("rational shift out of range"))?;
        let int = int.to_integer().to_i64().ok_or_else(|| Error::invalid("rational shift out of range"))?;
        // Rounding may land exactly on 1.
        if frac >= 1.0 {
            return Ok(Self { int: int + 1, frac: 0.0, exact: Some(r) });
        }
        Ok(Self { int, frac, exact: Some(r) })
    }

    /// Parses a decimal (`-0.3`), a fraction (`1/3`), or `sqrt(n)` with an
    /// optional integer offset (`sqrt(2)-1`). Decimals and fractions are kept
    /// exact.
    pub fn parse(text: &str) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse { input: text.to_string(), reason: "not a shift value".into() };
        if let Some(rest) = t.strip_prefix("sqrt(") {
            let close = rest.find(')').ok_or_else(bad)?;
            let radicand: f64 = rest[..close].parse().map_err(|_| bad())?;
            let offset: f64 = match &rest[close + 1..] {
                "" => 0.0,
                o => o.parse().map_err(|_| bad())?,
            };
            if radicand < 0.0 {
                return Err(bad());
            }
            // An approximation of an irrational: never treated as exact.
            return Ok(Self { exact: None, ..Self::from_f64(radicand.sqrt() + offset)? });
        }
        if let Some((a, b)) = t.split_once('/') {
            let (a, b): (BigInt, BigInt) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if b.is_zero() {
                return Err(bad());
            }
            return Self::from_rational(BigRational::new(a, b));
        }
        let plain = t.strip_prefix('+').unwrap_or(&t);
        let (negative, digits) = match plain.strip_prefix('-') {
            Some(d) => (true, d),
            None => (false, plain),
        };
        let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
        let decimal = !whole.is_empty() || !fraction.is_empty();
        if decimal && whole.chars().chain(fraction.chars()).all(|c| c.is_ascii_digit()) {
            let k = fraction.len() as u32;
            let whole_int: BigInt = if whole.is_empty() { BigInt::zero() } else { whole.parse().map_err(|_| bad())? };
            let frac_int: BigInt = if fraction.is_empty() { BigInt::zero() } else { fraction.parse().map_err(|_| bad())? };
            let scale = BigInt::from(10u32).pow(k);
            let mut exact = BigRational::new(whole_int * &scale + &frac_int, scale.clone());
            if negative {
                exact = -exact;
            }
            let int = exact.floor().to_integer().to_i64().ok_or_else(bad)?;
            // Fractional part spelled in decimal so that e.g. "1.3" and
            // "0.3" share the same f64.
            let frac_digits = if frac_int.is_zero() {
                BigInt::zero()
            } else if negative {
                &scale - &frac_int
            } else {
                frac_int
            };
            let frac: f64 = if frac_digits.is_zero() {
                0.0
            } else {
                format!("0.{:0>width$}", frac_digits.to_string(), width = k as usize).parse().map_err(|_| bad())?
            };
            return Ok(Self { int, frac, exact: Some(exact) });
        }
        Self::from_f64(t.parse().map_err(|_| bad())?)
    }

    pub fn int(&self) -> i64 {
        self.int
    }

    pub fn frac(&self) -> f64 {
        self.frac
    }

    pub fn value(&self) -> f64 {
        self.int as f64 + self.frac
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn shifted(&self, m: i64) -> Self {
        Self { int: self.int + m, frac: self.frac, exact: self.exact.as_ref().map(|r| r + BigRational::from_integer(m.into())) }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) if r.denom().to_u64().is_some_and(|d| d.is_power_of_two()) && r.denom().bits() > 20 => {
                write!(f, "{}", self.value())
            }
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None => write!(f, "{}", self.value()),
        }
    }
}

/// Inhomogeneous shift `θ = (θ₁, θ₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta {
    pub first: Shift,
    pub second: Shift,
}

impl Theta {
    pub fn zero() -> Self {
        Self::new(0.0, 0.0).expect("zero is a valid shift")
    }

    pub fn new(t1: f64, t2: f64) -> Result<Self> {
        Ok(Self { first: Shift::from_f64(t1)?, second: Shift::from_f64(t2)? })
    }

    /// `(√2 − 1, √3 − 1)`, the irrational shift used throughout the examples.
    pub fn irrational() -> Self {
        Self::new(2f64.sqrt() - 1.0, 3f64.sqrt() - 1.0).expect("finite")
    }

    /// Parses `"a,b"` where each side is accepted by [`Shift::parse`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut depth = 0;
        let split = text.char_indices().find(|&(_, c)| {
            match c {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            c == ',' && depth == 0
        });
        let Some((pos, _)) = split else {
            return Err(Error::Parse { input: text.to_string(), reason: "theta needs two components `a,b`".into() });
        };
        Ok(Self { first: Shift::parse(&text[..pos])?, second: Shift::parse(&text[pos + 1..])? })
    }

    pub fn shifted(&self, m: i64, n: i64) -> Self {
        Self { first: self.first.shifted(m), second: self.second.shifted(n) }
    }

    pub fn values(&self) -> (f64, f64) {
        (self.first.value(), self.second.value())
    }

    pub fn is_exact(&self) -> bool {
        self.first.exact.is_some() && self.second.exact.is_some()
    }
}

impl Default for Theta {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.first, self.second)
    }
}

impl Serialize for Theta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_shifts_share_fractional_parts() {
        let a = Theta::parse("0.3,0.7").unwrap();
        let b = Theta::parse("1.3,-0.3").unwrap();
        assert_eq!(a.first.frac(), b.first.frac());
        assert_eq!(a.second.frac(), b.second.frac());
        assert_eq!((b.first.int(), b.second.int()), (1, -1));
        assert_eq!(b.second.exact().unwrap(), &BigRational::new((-3).into(), 10.into()));
    }

    #[test]
    fn parses_forms() {
        let t = Theta::parse("1/3, sqrt(3)-1").unwrap();
        assert_eq!(t.first.frac(), 1.0 / 3.0);
        assert!(t.first.exact().is_some() && t.second.exact().is_none());
        assert!((t.second.value() - (3f64.sqrt() - 1.0)).abs() < 1e-15);
        let s = Theta::parse("-2,5").unwrap();
        assert_eq!((s.first.int(), s.first.frac()), (-2, 0.0));
        assert_eq!(Theta::parse("-1.25,0").unwrap().first.frac(), 0.75);
        for bad in ["1", "a,b", "1/0,0", "sqrt(-1),0"] {
            assert!(Theta::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn shifting_is_exact() {
        let t = Theta::irrational();
        let s = t.shifted(3, -7);
        assert_eq!(t.first.frac(), s.first.frac());
        assert_eq!(s.second.int(), t.second.int() - 7);
        assert_eq!(Theta::parse(&Theta::parse("1/3,-0.3").unwrap().to_string()).unwrap(), Theta::parse("1/3,-3/10").unwrap());
    }
}
