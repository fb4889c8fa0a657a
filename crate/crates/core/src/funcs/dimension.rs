use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::Growth;
use crate::{Error, Result, CONSTRUCTION_TOL};

/// Dimension function h: ℝ⁺ → ℝ⁺, increasing with `h(r) → 0` as `r → 0`.
#[derive(Clone)]
pub struct DimensionFn {
    family: Arc<DimensionFamily>,
    regularity: Option<RegularityWitness>,
}

#[derive(Debug, Clone)]
pub enum DimensionFamily {
    /// `r^s`
    Power { s: f64 },
    /// `r^s · (1 + ln(1/r))^a` for `r < 1`, `r^s` for `r ≥ 1`.
    PowerLog { s: f64, a: f64 },
    /// `r`
    Identity,
    /// Piecewise-linear through `(r, h)` knots with increasing `r`; linear to
    /// the origin below the first knot and constant above the last.
    Table(Vec<(f64, f64)>),
}

/// Constants `(r₀, λ₁, λ₂)` with `h(λ₁ r) ≤ λ₂ h(r)` for `r < r₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityWitness {
    pub r0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
}

impl DimensionFn {
    fn wrap(family: DimensionFamily) -> Self {
        Self { family: Arc::new(family), regularity: None }
    }

    pub fn power(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::invalid(format!("dimension exponent s must be positive, got {s}")));
        }
        Ok(Self::wrap(DimensionFamily::Power { s }))
    }

    /// Increasing on (0,1) iff `s ≥ a` when `a > 0`.
    pub fn power_log(s: f64, a: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0 && a.is_finite()) {
            return Err(Error::invalid(format!("powlog dimension function needs s > 0 and finite a, got s={s}, a={a}")));
        }
        if a > s + CONSTRUCTION_TOL {
            return Err(Error::invalid(format!("r^{s}(1+ln 1/r)^{a} is not increasing near r = 1 (need a ≤ s)")));
        }
        Ok(Self::wrap(DimensionFamily::PowerLog { s, a }))
    }

    pub fn identity() -> Self {
        Self::wrap(DimensionFamily::Identity)
    }

    pub fn table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::invalid("dimension table has no knots"));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(r, h) in &knots {
            if !(r.is_finite() && r > 0.0 && h.is_finite() && h > 0.0) {
                return Err(Error::invalid(format!("dimension table knot ({r}, {h}) must be positive")));
            }
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("dimension table radii must be distinct"));
            }
            if w[1].1 < w[0].1 * (1.0 - CONSTRUCTION_TOL) {
                return Err(Error::invalid(format!("dimension table decreases between r={} and r={}", w[0].0, w[1].0)));
            }
        }
        Ok(Self::wrap(DimensionFamily::Table(knots)))
    }

    /// Attaches a regularity witness after checking it on a geometric grid in
    /// `(0, r₀)`.
    pub fn with_regularity(mut self, w: RegularityWitness) -> Result<Self> {
        for (name, x) in [("r0", w.r0), ("lambda1", w.lambda1), ("lambda2", w.lambda2)] {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::invalid(format!("regularity constant {name} must lie in (0,1), got {x}")));
            }
        }
        let grid = geometric_grid(w.r0 * 0.999, 0.9, 200);
        for &r in &grid {
            if self.eval(w.lambda1 * r) > w.lambda2 * self.eval(r) * (1.0 + CONSTRUCTION_TOL) {
                return Err(Error::invalid(format!("regularity witness fails at r = {r}")));
            }
        }
        self.regularity = Some(w);
        Ok(self)
    }

    pub fn regularity(&self) -> Option<RegularityWitness> {
        self.regularity
    }

    pub fn family(&self) -> &DimensionFamily {
        &self.family
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match &*self.family {
            DimensionFamily::Power { s } => r.powf(*s),
            DimensionFamily::PowerLog { s, a } => {
                if r < 1.0 {
                    r.powf(*s) * (1.0 - r.ln()).powf(*a)
                } else {
                    r.powf(*s)
                }
            }
            DimensionFamily::Identity => r,
            DimensionFamily::Table(knots) => {
                let (r0, h0) = knots[0];
                if r <= r0 {
                    return h0 * r / r0;
                }
                let (rn, hn) = knots[knots.len() - 1];
                if r >= rn {
                    return hn;
                }
                let i = knots.partition_point(|&(x, _)| x <= r);
                let (xa, ya) = knots[i - 1];
                let (xb, yb) = knots[i];
                ya + (yb - ya) * (r - xa) / (xb - xa)
            }
        }
    }

    /// Asymptotic class of `h(g(q))` for `g(q) ≍ q^E (log q)^A → 0`.
    pub fn compose_growth(&self, inner: Growth) -> Option<Growth> {
        match &*self.family {
            DimensionFamily::Power { s } => Some(inner.pow(*s)),
            DimensionFamily::PowerLog { s, a } => Some(inner.pow(*s).mul(Growth::log_pow(*a))),
            DimensionFamily::Identity => Some(inner),
            DimensionFamily::Table(_) => None,
        }
    }

    /// The exponent `s` when `h = r^s` (the identity counts as `s = 1`).
    pub fn power_exponent(&self) -> Option<f64> {
        match &*self.family {
            DimensionFamily::Power { s } => Some(*s),
            DimensionFamily::Identity => Some(1.0),
            _ => None,
        }
    }
}

impl fmt::Debug for DimensionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DimensionFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.family {
            DimensionFamily::Power { s } => write!(f, "pow(s={s})"),
            DimensionFamily::PowerLog { s, a } => write!(f, "powlog(s={s},a={a})"),
            DimensionFamily::Identity => write!(f, "id"),
            DimensionFamily::Table(k) => write!(f, "table(<{} knots>)", k.len()),
        }
    }
}

/// `start · ratio^k` for `k = 0..n`.
pub fn geometric_grid(start: f64, ratio: f64, n: usize) -> Vec<f64> {
    let mut r = start;
    (0..n)
        .map(|_| {
            let cur = r;
            r *= ratio;
            cur
        })
        .collect()
}

/// Default admissibility probe: `2^{-k}` for `k = 1..=40`.
pub fn default_probe_grid() -> Vec<f64> {
    geometric_grid(0.5, 0.5, 40)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CheckMethod {
    Analytic,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    /// `r⁻¹h(r)` nonincreasing in `r`.
    pub ratio_monotone: bool,
    /// `r⁻¹h(r) → ∞` as `r → 0`.
    pub ratio_unbounded: bool,
    pub admissible: bool,
    pub method: CheckMethod,
    /// `h(r) = r`, excluded from the Hausdorff criterion (Lebesgue case).
    pub lebesgue_case: bool,
    /// Grid evidence, always computed.
    pub grid_monotone: bool,
    pub grid_tail_ratio: f64,
}

/// Growth factor of `r⁻¹h(r)` across the probe grid accepted as evidence of
/// unboundedness for tabulated functions.
pub const GRID_GROWTH_EVIDENCE: f64 = 2.0;

/// Checks the conditions on `h` needed by the weighted Hausdorff criterion:
/// `r⁻¹h(r)` decreasing and unbounded as `r → 0`.
pub fn check_t04_admissible(h: &DimensionFn, grid: &[f64]) -> Result<AdmissibilityReport> {
    if grid.is_empty() {
        return Err(Error::invalid("probe grid is empty"));
    }
    for w in grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::invalid("probe grid must be strictly decreasing"));
        }
    }
    if !grid.iter().all(|&r| r > 0.0 && r < 1.0) {
        return Err(Error::invalid("probe grid radii must lie in (0,1)"));
    }
    let ratios: Vec<f64> = grid.iter().map(|&r| h.eval(r) / r).collect();
    // Radii decrease along the grid, so the ratio must not decrease.
    let grid_monotone = ratios.windows(2).all(|w| w[1] >= w[0] * (1.0 - CONSTRUCTION_TOL));
    let grid_tail_ratio = ratios[ratios.len() - 1] / ratios[0];
    let tail_strict = ratios.windows(2).rev().take(3).all(|w| w[1] > w[0]);
    let grid_unbounded = ratios.len() >= 2 && tail_strict && grid_tail_ratio >= GRID_GROWTH_EVIDENCE;

    let analytic = match &*h.family {
        DimensionFamily::Power { s } => Some((*s <= 1.0, *s < 1.0)),
        DimensionFamily::Identity => Some((true, false)),
        DimensionFamily::PowerLog { s, a } => {
            let monotone = *s < 1.0 && (*a >= 0.0 || 1.0 - s + a >= 0.0) || (*s == 1.0 && *a >= 0.0);
            let unbounded = *s < 1.0 || (*s == 1.0 && *a > 0.0);
            Some((monotone, unbounded))
        }
        DimensionFamily::Table(_) => None,
    };
    let lebesgue_case = matches!(&*h.family, DimensionFamily::Identity)
        || matches!(&*h.family, DimensionFamily::Power { s } if *s == 1.0);
    let (ratio_monotone, ratio_unbounded, method) = match analytic {
        Some((m, u)) => (m, u, CheckMethod::Analytic),
        None => (grid_monotone, grid_unbounded, CheckMethod::Grid),
    };
    Ok(AdmissibilityReport {
        ratio_monotone,
        ratio_unbounded,
        admissible: ratio_monotone && ratio_unbounded && !lebesgue_case,
        method,
        lebesgue_case,
        grid_monotone,
        grid_tail_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub holds: bool,
    /// `sup h(λ₁r)/h(r)` over the grid.
    pub lambda2: f64,
    /// Grid point attaining the supremum; a counterexample when `!holds`.
    pub worst_r: f64,
}

pub fn check_regular(h: &DimensionFn, lambda1: f64, grid: &[f64]) -> Result<RegularityReport> {
    if !(lambda1 > 0.0 && lambda1 < 1.0) {
        return Err(Error::invalid(format!("lambda1 must lie in (0,1), got {lambda1}")));
    }
    if grid.is_empty() {
        return Err(Error::invalid("regularity grid is empty"));
    }
    let mut lambda2 = f64::NEG_INFINITY;
    let mut worst_r = grid[0];
    for &r in grid {
        let hr = h.eval(r);
        if !(hr > 0.0) {
            return Err(Error::invalid(format!("h({r}) = {hr} is not positive")));
        }
        let ratio = h.eval(lambda1 * r) / hr;
        if ratio > lambda2 {
            lambda2 = ratio;
            worst_r = r;
        }
    }
    Ok(RegularityReport { holds: lambda2 < 1.0, lambda2, worst_r })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_vanish_at_zero() {
        let hs = [
            DimensionFn::power(0.3).unwrap(),
            DimensionFn::power(1.0).unwrap(),
            DimensionFn::power_log(0.8, 0.5).unwrap(),
            DimensionFn::power_log(0.8, -2.0).unwrap(),
            DimensionFn::identity(),
        ];
        for h in &hs {
            let vals: Vec<f64> = (1..=12).map(|k| h.eval(10f64.powi(-k))).collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]), "{h}");
            let fine: Vec<f64> = geometric_grid(0.99, 0.97, 400).iter().map(|&r| h.eval(r)).collect();
            assert!(fine.windows(2).all(|w| w[1] < w[0]), "{h} not increasing");
        }
    }

    #[test]
    fn admissibility_examples() {
        let g = default_probe_grid();
        let r = check_t04_admissible(&DimensionFn::power(0.8).unwrap(), &g).unwrap();
        assert!(r.admissible && r.grid_monotone);
        let r = check_t04_admissible(&DimensionFn::identity(), &g).unwrap();
        assert!(!r.admissible && r.lebesgue_case);
        let r = check_t04_admissible(&DimensionFn::power(1.2).unwrap(), &g).unwrap();
        assert!(!r.admissible && !r.ratio_unbounded);
        assert!(check_t04_admissible(&DimensionFn::identity(), &[]).is_err());
    }

    #[test]
    fn admissible_iff_s_below_one() {
        let g = default_probe_grid();
        for k in 1..=30 {
            let s = k as f64 / 20.0;
            let r = check_t04_admissible(&DimensionFn::power(s).unwrap(), &g).unwrap();
            assert_eq!(r.admissible, s < 1.0, "s = {s}");
        }
    }

    #[test]
    fn table_admissibility_is_grid_based() {
        let knots: Vec<(f64, f64)> = (1..=60).map(|k| {
            let r = 0.5f64.powi(k);
            (r, r.powf(0.7))
        }).collect();
        let h = DimensionFn::table(knots).unwrap();
        let grid = geometric_grid(0.25, 0.5, 30);
        let r = check_t04_admissible(&h, &grid).unwrap();
        assert_eq!(r.method, CheckMethod::Grid);
        assert!(r.admissible);
    }

    #[test]
    fn regularity_examples() {
        let grid = geometric_grid(0.5, 0.8, 200);
        for s in [0.1, 0.5, 0.77, 1.0] {
            let h = DimensionFn::power(s).unwrap();
            for k in 1..=10 {
                let l1 = k as f64 / 11.0;
                let rep = check_regular(&h, l1, &grid).unwrap();
                assert!(rep.holds);
                let expected = l1.powf(s);
                assert!((rep.lambda2 - expected).abs() <= 4.0 * f64::EPSILON * expected, "s={s}, λ₁={l1}");
            }
        }
        let rep = check_regular(&DimensionFn::identity(), 0.5, &grid).unwrap();
        assert!(rep.holds && (rep.lambda2 - 0.5).abs() < 1e-15);

        let plateau = DimensionFn::table(vec![(0.01, 0.1), (0.2, 0.1), (0.5, 0.3)]).unwrap();
        let rep = check_regular(&plateau, 0.5, &[0.15, 0.1, 0.05]).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.lambda2, 1.0);
        assert!(check_regular(&plateau, 1.5, &[0.1]).is_err());
    }

    #[test]
    fn regularity_witness_checked() {
        let h = DimensionFn::power(0.5).unwrap();
        let w = RegularityWitness { r0: 0.5, lambda1: 0.5, lambda2: 0.75 };
        assert!(h.clone().with_regularity(w).is_ok());
        let bad = RegularityWitness { r0: 0.5, lambda1: 0.5, lambda2: 0.6 };
        assert!(h.with_regularity(bad).is_err());
    }

    #[test]
    fn composition_classes() {
        let g = Growth::new(-1.8, 0.0);
        assert_eq!(DimensionFn::power(0.5).unwrap().compose_growth(g), Some(Growth::new(-0.9, 0.0)));
        assert_eq!(DimensionFn::power_log(0.5, 0.5).unwrap().compose_growth(g), Some(Growth::new(-0.9, 0.5)));
    }
}
