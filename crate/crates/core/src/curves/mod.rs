//! Planar curves given as graphs `y = f(x)` over a closed interval.

mod decompose;
mod poly;

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::interval::Interval;
use crate::{Error, Result};

pub use decompose::{decompose_nondegenerate, default_margin, select_xi, Decomposition, NondegeneratePiece, DEFAULT_XI};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CurveFamily {
    /// `x²`
    Parabola,
    /// `x³`
    Cubic,
    /// Ascending coefficients: `c₀ + c₁x + c₂x² + …`
    Polynomial(Vec<f64>),
    /// `√(1 − x²)` on a subinterval of `(−1, 1)`
    CircleArc,
    Exp,
    Sin,
}

impl CurveFamily {
    /// Ascending coefficients for the polynomial families.
    pub fn coefficients(&self) -> Option<Vec<f64>> {
        match self {
            CurveFamily::Parabola => Some(vec![0.0, 0.0, 1.0]),
            CurveFamily::Cubic => Some(vec![0.0, 0.0, 0.0, 1.0]),
            CurveFamily::Polynomial(c) => Some(c.clone()),
            _ => None,
        }
    }

    fn default_interval(&self) -> Interval {
        let (lo, hi) = match self {
            CurveFamily::Cubic => (-1.0, 1.0),
            CurveFamily::CircleArc => (-0.9, 0.9),
            CurveFamily::Sin => (0.0, PI),
            _ => (0.0, 1.0),
        };
        Interval { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    family: CurveFamily,
    interval: Interval,
    /// Derivatives 0..=4 for polynomial families.
    #[serde(skip)]
    derivs: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(family: CurveFamily, interval: Interval) -> Result<Self> {
        if interval.is_empty() || interval.len() == 0.0 {
            return Err(Error::invalid(format!("curve interval {interval} is empty")));
        }
        if family == CurveFamily::CircleArc && !(interval.lo > -1.0 && interval.hi < 1.0) {
            return Err(Error::invalid(format!("circle arc needs an interval inside (-1, 1), got {interval}")));
        }
        let mut derivs = Vec::new();
        if let Some(c) = family.coefficients() {
            if c.iter().any(|a| !a.is_finite()) {
                return Err(Error::invalid("polynomial coefficients must be finite"));
            }
            let mut d = poly::trim(c);
            for _ in 0..=4 {
                let next = poly::derivative(&d);
                derivs.push(d);
                d = next;
            }
        }
        Ok(Self { family, interval, derivs })
    }

    pub fn with_default_interval(family: CurveFamily) -> Result<Self> {
        let i = family.default_interval();
        Self::new(family, i)
    }

    pub fn parabola() -> Self {
        Self::with_default_interval(CurveFamily::Parabola).expect("default parabola is valid")
    }

    pub fn family(&self) -> &CurveFamily {
        &self.family
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// Same curve restricted to (or extended over) another interval.
    pub fn on(&self, interval: Interval) -> Result<Self> {
        Self::new(self.family.clone(), interval)
    }

    pub fn is_polynomial(&self) -> bool {
        !self.derivs.is_empty()
    }

    /// `k`-th derivative for `k ≤ 4`.
    pub fn derivative(&self, k: usize, x: f64) -> f64 {
        if self.is_polynomial() {
            return poly::eval(&self.derivs[k], x);
        }
        match (&self.family, k) {
            (CurveFamily::Exp, _) => x.exp(),
            (CurveFamily::Sin, k) => match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            (CurveFamily::CircleArc, k) => {
                let w = 1.0 - x * x;
                match k {
                    0 => w.sqrt(),
                    1 => -x / w.sqrt(),
                    2 => -1.0 / (w * w.sqrt()),
                    3 => -3.0 * x / (w * w * w.sqrt()),
                    _ => -3.0 * (1.0 + 4.0 * x * x) / (w * w * w * w.sqrt()),
                }
            }
            _ => unreachable!("polynomial families are handled above"),
        }
    }

    pub fn f(&self, x: f64) -> f64 {
        self.derivative(0, x)
    }

    pub fn df(&self, x: f64) -> f64 {
        self.derivative(1, x)
    }

    pub fn d2f(&self, x: f64) -> f64 {
        self.derivative(2, x)
    }

    pub fn d3f(&self, x: f64) -> f64 {
        self.derivative(3, x)
    }

    /// Polynomial coefficients of the `k`-th derivative, if polynomial.
    pub fn poly_derivative(&self, k: usize) -> Option<&[f64]> {
        self.derivs.get(k).map(Vec::as_slice)
    }

    /// Zeros of the `k`-th derivative (`k ∈ {1, 2, 3}`) inside `[lo, hi]`.
    /// `None` means the derivative vanishes identically.
    pub fn derivative_zeros(&self, k: usize, lo: f64, hi: f64) -> Option<Vec<f64>> {
        if self.is_polynomial() {
            return poly::roots_in(&self.derivs[k], lo, hi);
        }
        let multiples = |offset: f64| -> Vec<f64> {
            let first = ((lo - offset) / PI).ceil() as i64;
            let last = ((hi - offset) / PI).floor() as i64;
            (first..=last).map(|j| offset + j as f64 * PI).filter(|x| (lo..=hi).contains(x)).collect()
        };
        Some(match (&self.family, k) {
            (CurveFamily::Exp, _) => Vec::new(),
            (CurveFamily::Sin, k) if k % 2 == 0 => multiples(0.0),
            (CurveFamily::Sin, _) => multiples(PI / 2.0),
            (CurveFamily::CircleArc, 1) | (CurveFamily::CircleArc, 3) => {
                if lo <= 0.0 && 0.0 <= hi {
                    vec![0.0]
                } else {
                    Vec::new()
                }
            }
            (CurveFamily::CircleArc, _) => Vec::new(),
            _ => unreachable!("polynomial families are handled above"),
        })
    }

    /// `sup |f′|` over `[lo, hi]`: exact candidates (endpoints and zeros of
    /// f″) combined with a 10⁴-point grid.
    pub fn sup_abs_derivative_on(&self, lo: f64, hi: f64) -> f64 {
        let mut best = self.df(lo).abs().max(self.df(hi).abs());
        for z in self.derivative_zeros(2, lo, hi).unwrap_or_default() {
            best = best.max(self.df(z).abs());
        }
        let n = 10_000;
        for i in 0..=n {
            let x = lo + (hi - lo) * i as f64 / n as f64;
            best = best.max(self.df(x).abs());
        }
        best
    }

    pub fn sup_abs_derivative(&self) -> f64 {
        self.sup_abs_derivative_on(self.interval.lo, self.interval.hi)
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match &self.family {
            CurveFamily::Parabola => "parabola".to_string(),
            CurveFamily::Cubic => "cubic".to_string(),
            CurveFamily::Polynomial(c) => {
                format!("poly({})", c.iter().map(f64::to_string).collect::<Vec<_>>().join(","))
            }
            CurveFamily::CircleArc => "circle".to_string(),
            CurveFamily::Exp => "exp".to_string(),
            CurveFamily::Sin => "sin".to_string(),
        };
        write!(f, "{name} interval=[{},{}]", self.interval.lo, self.interval.hi)
    }
}

fn parse_err(src: &str, reason: impl Into<String>) -> Error {
    Error::Parse { input: src.to_string(), reason: reason.into() }
}

fn parse_list(src: &str, body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|t| crate::funcs::parse::parse_number(t).ok_or_else(|| parse_err(src, format!("`{}` is not a number", t.trim()))))
        .collect()
}

/// Parses `parabola`, `cubic`, `poly(1,0,-2,0.5)`, `circle`, `exp` or `sin`,
/// optionally followed by `interval=[a,b]`.
pub fn parse_curve(src: &str) -> Result<Curve> {
    let text = src.trim();
    let (head, interval) = match text.find("interval") {
        Some(pos) => {
            let rest = text[pos + "interval".len()..].trim_start();
            let rest = rest.strip_prefix('=').ok_or_else(|| parse_err(src, "expected `interval=[a,b]`"))?.trim();
            let inner = rest
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
                .ok_or_else(|| parse_err(src, "interval must be written `[a,b]`"))?;
            let v = parse_list(src, inner)?;
            if v.len() != 2 {
                return Err(parse_err(src, "interval needs two endpoints"));
            }
            let head = text[..pos].trim().trim_end_matches([',', ';']).trim();
            (head, Some(Interval::new(v[0], v[1])?))
        }
        None => (text, None),
    };
    let lower = head.to_ascii_lowercase();
    let family = match lower.as_str() {
        "parabola" => CurveFamily::Parabola,
        "cubic" => CurveFamily::Cubic,
        "circle" => CurveFamily::CircleArc,
        "exp" => CurveFamily::Exp,
        "sin" => CurveFamily::Sin,
        s if s.starts_with("poly(") && s.ends_with(')') => {
            CurveFamily::Polynomial(parse_list(src, &head[5..head.len() - 1])?)
        }
        _ => return Err(parse_err(src, format!("unknown curve `{head}`"))),
    };
    let interval = interval.unwrap_or_else(|| family.default_interval());
    Curve::new(family, interval)
}
