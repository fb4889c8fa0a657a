use std::fmt;
use std::sync::Arc;

use super::Growth;
use crate::{Error, Result, CONSTRUCTION_TOL};

/// Monotone nonincreasing approximating function ψ: ℕ → ℝ⁺.
///
/// Cheap to clone; compound families share their operands.
#[derive(Clone)]
pub struct ApproxFn(Arc<ApproxFamily>);

#[derive(Debug, Clone)]
pub enum ApproxFamily {
    /// `c · q^{-v}`
    Power { v: f64, c: f64 },
    /// `c · q^{-v} · (1 + ln q)^{-a}`
    PowerLog { v: f64, a: f64, c: f64 },
    /// Values at `q = 1..=values.len()`, constant beyond the last entry.
    Table(Vec<f64>),
    Scaled { base: ApproxFn, factor: f64 },
    /// `max{base(q), q^{-exponent}}`
    FlooredMax { base: ApproxFn, exponent: f64 },
    MinOf(ApproxFn, ApproxFn),
    MaxOf(ApproxFn, ApproxFn),
}

fn positive_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {x}")))
    }
}

impl ApproxFn {
    fn wrap(f: ApproxFamily) -> Self {
        ApproxFn(Arc::new(f))
    }

    /// `q^{-v}`.
    pub fn power(v: f64) -> Result<Self> {
        Self::power_scaled(v, 1.0)
    }

    /// `c · q^{-v}`.
    pub fn power_scaled(v: f64, c: f64) -> Result<Self> {
        positive_finite("exponent v", v)?;
        positive_finite("coefficient c", c)?;
        Ok(Self::wrap(ApproxFamily::Power { v, c }))
    }

    /// `c · q^{-v} · (1 + ln q)^{-a}`. Monotone iff `a ≥ 0` or `v ≥ −a`;
    /// decays to zero iff `v > 0` or `a > 0`.
    pub fn power_log(v: f64, a: f64, c: f64) -> Result<Self> {
        positive_finite("coefficient c", c)?;
        if !v.is_finite() || !a.is_finite() || v < 0.0 {
            return Err(Error::invalid(format!("powlog needs finite v ≥ 0 and finite a, got v={v}, a={a}")));
        }
        if v == 0.0 && a <= 0.0 {
            return Err(Error::invalid("powlog with v = 0 needs a > 0 to decay"));
        }
        if a < 0.0 && v + a < -CONSTRUCTION_TOL {
            return Err(Error::invalid(format!(
                "powlog(v={v}, a={a}) is not monotone: need v ≥ −a when a < 0"
            )));
        }
        Ok(Self::wrap(ApproxFamily::PowerLog { v, a, c }))
    }

    /// Tabulated values at `q = 1..=values.len()`; must be positive and
    /// nonincreasing (ties within a relative 1e-12).
    pub fn table(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("table must have at least one value"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("table value at q={} is not positive: {v}", i + 1)));
            }
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[1] > w[0] * (1.0 + CONSTRUCTION_TOL) {
                return Err(Error::invalid(format!(
                    "table is not nonincreasing at q={}: {} > {}",
                    i + 2,
                    w[1],
                    w[0]
                )));
            }
        }
        Ok(Self::wrap(ApproxFamily::Table(values)))
    }

    /// Builds a table from `(q, value)` rows with strictly increasing `q`
    /// starting at 1; gaps are filled by step extension.
    pub fn table_from_rows(rows: &[(u64, f64)]) -> Result<Self> {
        let Some(&(first, _)) = rows.first() else {
            return Err(Error::invalid("table has no rows"));
        };
        if first != 1 {
            return Err(Error::invalid(format!("table must start at q = 1, starts at {first}")));
        }
        let mut values = Vec::new();
        for (i, &(q, v)) in rows.iter().enumerate() {
            if i > 0 && q <= rows[i - 1].0 {
                return Err(Error::invalid(format!("table q values must strictly increase (q = {q})")));
            }
            while (values.len() as u64) + 1 < q {
                let last = *values.last().expect("first row is q = 1");
                values.push(last);
            }
            values.push(v);
        }
        Self::table(values)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        positive_finite("scale factor", factor)?;
        Ok(Self::wrap(ApproxFamily::Scaled { base: self.clone(), factor }))
    }

    pub fn floored(&self, exponent: f64) -> Result<Self> {
        positive_finite("floor exponent", exponent)?;
        Ok(Self::wrap(ApproxFamily::FlooredMax { base: self.clone(), exponent }))
    }

    pub fn min_of(a: &ApproxFn, b: &ApproxFn) -> Self {
        Self::wrap(ApproxFamily::MinOf(a.clone(), b.clone()))
    }

    pub fn max_of(a: &ApproxFn, b: &ApproxFn) -> Self {
        Self::wrap(ApproxFamily::MaxOf(a.clone(), b.clone()))
    }

    pub fn family(&self) -> &ApproxFamily {
        &self.0
    }

    /// ψ(q) for `q ≥ 1`.
    pub fn eval(&self, q: u64) -> f64 {
        debug_assert!(q >= 1, "approximating functions are defined for q ≥ 1");
        let q = q.max(1);
        match &*self.0 {
            ApproxFamily::Power { v, c } => c * (q as f64).powf(-v),
            ApproxFamily::PowerLog { v, a, c } => {
                let qf = q as f64;
                c * qf.powf(-v) * (1.0 + qf.ln()).powf(-a)
            }
            ApproxFamily::Table(values) => {
                let idx = (q as usize).min(values.len()) - 1;
                values[idx]
            }
            ApproxFamily::Scaled { base, factor } => factor * base.eval(q),
            ApproxFamily::FlooredMax { base, exponent } => base.eval(q).max((q as f64).powf(-exponent)),
            ApproxFamily::MinOf(a, b) => a.eval(q).min(b.eval(q)),
            ApproxFamily::MaxOf(a, b) => a.eval(q).max(b.eval(q)),
        }
    }

    /// `ln ψ(e^{ln_q})`, usable far beyond the range where `q` fits in a
    /// machine integer (e.g. `q = 2^t` for large `t`).
    pub fn ln_eval(&self, ln_q: f64) -> f64 {
        let ln_q = ln_q.max(0.0);
        match &*self.0 {
            ApproxFamily::Power { v, c } => c.ln() - v * ln_q,
            ApproxFamily::PowerLog { v, a, c } => c.ln() - v * ln_q - a * (1.0 + ln_q).ln(),
            ApproxFamily::Table(values) => {
                let n = values.len();
                let q = if ln_q >= (n as f64).ln() { n } else { (ln_q.exp().round() as usize).clamp(1, n) };
                values[q - 1].ln()
            }
            ApproxFamily::Scaled { base, factor } => factor.ln() + base.ln_eval(ln_q),
            ApproxFamily::FlooredMax { base, exponent } => base.ln_eval(ln_q).max(-exponent * ln_q),
            ApproxFamily::MinOf(a, b) => a.ln_eval(ln_q).min(b.ln_eval(ln_q)),
            ApproxFamily::MaxOf(a, b) => a.ln_eval(ln_q).max(b.ln_eval(ln_q)),
        }
    }

    /// Asymptotic class `q^E (log q)^A`, or `None` when the family contains a
    /// table.
    pub fn growth(&self) -> Option<Growth> {
        match &*self.0 {
            ApproxFamily::Power { v, .. } => Some(Growth::q_pow(-v)),
            ApproxFamily::PowerLog { v, a, .. } => Some(Growth::new(-v, -a)),
            ApproxFamily::Table(_) => None,
            ApproxFamily::Scaled { base, .. } => base.growth(),
            ApproxFamily::FlooredMax { base, exponent } => Some(base.growth()?.max(Growth::q_pow(-exponent))),
            ApproxFamily::MinOf(a, b) => Some(a.growth()?.min(b.growth()?)),
            ApproxFamily::MaxOf(a, b) => Some(a.growth()?.max(b.growth()?)),
        }
    }

    /// Largest `q` with tabulated data, if the family contains a table.
    pub fn table_range(&self) -> Option<u64> {
        match &*self.0 {
            ApproxFamily::Table(values) => Some(values.len() as u64),
            ApproxFamily::Power { .. } | ApproxFamily::PowerLog { .. } => None,
            ApproxFamily::Scaled { base, .. } | ApproxFamily::FlooredMax { base, .. } => base.table_range(),
            ApproxFamily::MinOf(a, b) | ApproxFamily::MaxOf(a, b) => match (a.table_range(), b.table_range()) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            },
        }
    }

    /// Power exponent `v` when the function is a pure power law `c·q^{-v}`.
    pub fn power_exponent(&self) -> Option<f64> {
        match &*self.0 {
            ApproxFamily::Power { v, .. } => Some(*v),
            ApproxFamily::Scaled { base, .. } => base.power_exponent(),
            _ => None,
        }
    }
}

impl fmt::Debug for ApproxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ApproxFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            ApproxFamily::Power { v, c } if *c == 1.0 => write!(f, "pow(v={v})"),
            ApproxFamily::Power { v, c } => write!(f, "pow(v={v},c={c})"),
            ApproxFamily::PowerLog { v, a, c } if *c == 1.0 => write!(f, "powlog(v={v},a={a})"),
            ApproxFamily::PowerLog { v, a, c } => write!(f, "powlog(v={v},a={a},c={c})"),
            ApproxFamily::Table(values) => write!(f, "table(<{} values>)", values.len()),
            ApproxFamily::Scaled { base, factor } => write!(f, "scale({base},k={factor})"),
            ApproxFamily::FlooredMax { base, exponent } => write!(f, "floor({base},e={exponent})"),
            ApproxFamily::MinOf(a, b) => write!(f, "min({a},{b})"),
            ApproxFamily::MaxOf(a, b) => write!(f, "max({a},{b})"),
        }
    }
}

/// Pointwise `(min{ψ, φ}, max{ψ, φ})`.
pub fn reduce_min_max(psi: &ApproxFn, phi: &ApproxFn) -> (ApproxFn, ApproxFn) {
    (ApproxFn::min_of(psi, phi), ApproxFn::max_of(psi, phi))
}

/// `q ↦ max{ψ(q), q^{-e}}`.
pub fn floor_modify(psi: &ApproxFn, exponent: f64) -> Result<ApproxFn> {
    psi.floored(exponent)
}

/// `v(q) = ∑_{t ≤ q} ψ₁(t)ψ₂(t)` for `q = 1..=q_max`.
pub fn partial_product_sums(psi1: &ApproxFn, psi2: &ApproxFn, q_max: u64) -> Vec<f64> {
    let mut acc = 0.0;
    (1..=q_max)
        .map(|t| {
            acc += psi1.eval(t) * psi2.eval(t);
            acc
        })
        .collect()
}

/// Slows both functions down by the square root of the partial sums
/// `v(q) = ∑_{t ≤ q} ψ₁(t)ψ₂(t)`, tabulated on `q = 1..=q_max`.
pub fn slowdown_by_partial_sums(psi1: &ApproxFn, psi2: &ApproxFn, q_max: u64) -> Result<(ApproxFn, ApproxFn)> {
    if q_max == 0 {
        return Err(Error::invalid("q_max must be at least 1"));
    }
    let v = partial_product_sums(psi1, psi2, q_max);
    let slowed = |psi: &ApproxFn| -> Vec<f64> { (1..=q_max).zip(&v).map(|(q, vq)| psi.eval(q) / vq.sqrt()).collect() };
    Ok((ApproxFn::table(slowed(psi1))?, ApproxFn::table(slowed(psi2))?))
}
