//! Convergence verdicts for the series criteria.
//!
//! Closed-form inputs (power and power-log families and their min/max/floor
//! combinations) are decided exactly by exponent algebra. Anything containing
//! a table falls back to a dyadic-condensation heuristic that is allowed to
//! answer `Inconclusive`.

use serde::Serialize;

use crate::funcs::{check_t04_admissible, default_probe_grid, ApproxFn, DimensionFn, Growth};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Converges,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    ClosedFormExponent,
    DyadicCondensation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: u32,
    /// `∑_{j ≤ t} 2^j · term(2^j)`.
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesVerdict {
    pub verdict: Verdict,
    pub method: Method,
    /// Asymptotic class of the term for closed forms.
    pub growth: Option<Growth>,
    pub diagnostics: Vec<Checkpoint>,
    pub reason: Option<String>,
    pub warnings: Vec<String>,
}

impl SeriesVerdict {
    pub fn converges(&self) -> bool {
        self.verdict == Verdict::Converges
    }
}

/// Thresholds for the condensation heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConfig {
    /// Dyadic levels `t = 0..=levels` used for diagnostics and heuristics.
    pub levels: u32,
    /// Number of trailing condensed blocks the heuristic inspects.
    pub window: usize,
    /// Fitted geometric ratio below which a nonincreasing tail counts as
    /// convergent.
    pub converge_ratio: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        Self { levels: 40, window: 8, converge_ratio: 0.9 }
    }
}

/// Raw and condensed dyadic block sums of a positive term.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondensedBlocks {
    /// `∑_{2^t ≤ q < 2^{t+1}} term(q)`.
    pub raw: Vec<f64>,
    /// `2^t · term(2^t)`.
    pub condensed: Vec<f64>,
    /// Whether `raw[t]` was summed exactly (otherwise count × endpoint mean).
    pub raw_exact: Vec<bool>,
}

/// Largest level whose raw block is summed term by term.
pub const EXACT_BLOCK_LEVEL: u32 = 20;

pub fn dyadic_condense(term: impl Fn(u64) -> f64, levels: u32) -> CondensedBlocks {
    let levels = levels.min(62);
    let mut out = CondensedBlocks { raw: Vec::new(), condensed: Vec::new(), raw_exact: Vec::new() };
    for t in 0..=levels {
        let lo = 1u64 << t;
        let hi = (1u64 << (t + 1)) - 1;
        out.condensed.push(lo as f64 * term(lo));
        if t <= EXACT_BLOCK_LEVEL {
            out.raw.push((lo..=hi).map(&term).sum());
            out.raw_exact.push(true);
        } else {
            out.raw.push(lo as f64 * 0.5 * (term(lo) + term(hi)));
            out.raw_exact.push(false);
        }
    }
    out
}

fn diagnostics(term: &dyn Fn(u64) -> f64, levels: u32) -> Vec<Checkpoint> {
    let mut acc = 0.0;
    (0..=levels.min(62))
        .map(|t| {
            let q = 1u64 << t;
            acc += q as f64 * term(q);
            Checkpoint { t, partial_sum: acc }
        })
        .collect()
}

/// Least-squares slope of `log2 y` against index.
fn log2_slope(ys: &[f64]) -> f64 {
    let n = ys.len() as f64;
    let xm = (n - 1.0) / 2.0;
    let ym = ys.iter().map(|y| y.log2()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - xm;
        sxy += dx * (y.log2() - ym);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Relative rounding slack when judging monotonicity of condensed blocks.
const MONOTONE_SLACK: f64 = 1e-9;

fn heuristic(term: &dyn Fn(u64) -> f64, cfg: &SeriesConfig, table_range: Option<u64>) -> (Verdict, String) {
    if let Some(range) = table_range {
        let needed = 1u64 << cfg.levels.min(62);
        if range < needed {
            return (
                Verdict::Inconclusive,
                format!("table covers q ≤ {range}, shorter than the checkpoint 2^{} = {needed}", cfg.levels),
            );
        }
    }
    let blocks = dyadic_condense(term, cfg.levels).condensed;
    if blocks.len() < cfg.window.max(2) {
        return (Verdict::Inconclusive, format!("fewer than {} dyadic blocks", cfg.window));
    }
    let tail = &blocks[blocks.len() - cfg.window.max(2)..];
    if tail.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return (Verdict::Inconclusive, "non-positive or non-finite condensed block".into());
    }
    let nonincreasing = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + MONOTONE_SLACK));
    let nondecreasing = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - MONOTONE_SLACK));
    let ratio = log2_slope(tail).exp2();
    if nonincreasing && ratio < cfg.converge_ratio {
        (Verdict::Converges, format!("condensed tail decays geometrically (fitted ratio {ratio:.4})"))
    } else if nondecreasing {
        (Verdict::Diverges, format!("condensed blocks bounded below by {:.4e}", tail[0]))
    } else {
        (Verdict::Inconclusive, format!("condensed tail not decisive (fitted ratio {ratio:.4})"))
    }
}

fn decide(
    term: &dyn Fn(u64) -> f64,
    growth: Option<Growth>,
    table_range: Option<u64>,
    cfg: &SeriesConfig,
    warnings: Vec<String>,
) -> SeriesVerdict {
    let diagnostics = diagnostics(term, cfg.levels);
    match growth {
        Some(g) => SeriesVerdict {
            verdict: if g.series_converges() { Verdict::Converges } else { Verdict::Diverges },
            method: Method::ClosedFormExponent,
            growth: Some(g),
            diagnostics,
            reason: Some(format!("term ≍ q^{} (log q)^{}", g.power, g.log_power)),
            warnings,
        },
        None => {
            let (verdict, reason) = heuristic(term, cfg, table_range);
            SeriesVerdict {
                verdict,
                method: Method::DyadicCondensation,
                growth: None,
                diagnostics,
                reason: Some(reason),
                warnings,
            }
        }
    }
}

fn combined_range(a: &ApproxFn, b: &ApproxFn) -> Option<u64> {
    match (a.table_range(), b.table_range()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// `∑ q · h(min{ψ₁,ψ₂}(q)/q) · max{ψ₁,ψ₂}(q)`.
pub fn classify_weighted_hausdorff(
    psi1: &ApproxFn,
    psi2: &ApproxFn,
    h: &DimensionFn,
    cfg: &SeriesConfig,
) -> SeriesVerdict {
    let mut warnings = Vec::new();
    if let Ok(rep) = check_t04_admissible(h, &default_probe_grid()) {
        if !rep.admissible {
            warnings.push(format!("dimension function {h} is not admissible for the weighted criterion"));
        }
    }
    let term = |q: u64| {
        let (a, b) = (psi1.eval(q), psi2.eval(q));
        let qf = q as f64;
        qf * h.eval(a.min(b) / qf) * a.max(b)
    };
    let growth = (|| {
        let (g1, g2) = (psi1.growth()?, psi2.growth()?);
        let inner = g1.min(g2).mul(Growth::q_pow(-1.0));
        Some(Growth::q_pow(1.0).mul(h.compose_growth(inner)?).mul(g1.max(g2)))
    })();
    decide(&term, growth, combined_range(psi1, psi2), cfg, warnings)
}

fn check_s(s: f64, lo: f64, hi: f64, lo_open: bool) -> Result<()> {
    let ok = s.is_finite() && (if lo_open { s > lo } else { s >= lo }) && s <= hi;
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(format!("s = {s} outside the admissible range")))
    }
}

/// `∑ q^{1−s} ψ^{s+1}(q)`.
pub fn classify_curve_hausdorff(psi: &ApproxFn, s: f64, cfg: &SeriesConfig) -> Result<SeriesVerdict> {
    check_s(s, 0.0, 1.0, true)?;
    let mut warnings = Vec::new();
    if s <= 0.5 {
        warnings.push(format!("s = {s} ≤ 1/2: outside the range where this criterion is proven"));
    }
    let term = |q: u64| (q as f64).powf(1.0 - s) * psi.eval(q).powf(s + 1.0);
    let growth = psi.growth().map(|g| Growth::q_pow(1.0 - s).mul(g.pow(s + 1.0)));
    Ok(decide(&term, growth, psi.table_range(), cfg, warnings))
}

/// `∑ q^{2−s} ψ^s(q)`.
pub fn classify_kj(psi: &ApproxFn, s: f64, cfg: &SeriesConfig) -> Result<SeriesVerdict> {
    check_s(s, 0.0, 2.0, true)?;
    let term = |q: u64| (q as f64).powf(2.0 - s) * psi.eval(q).powf(s);
    let growth = psi.growth().map(|g| Growth::q_pow(2.0 - s).mul(g.pow(s)));
    Ok(decide(&term, growth, psi.table_range(), cfg, Vec::new()))
}

/// `∑ ψ₁(q) ψ₂(q)`.
pub fn classify_lebesgue(psi1: &ApproxFn, psi2: &ApproxFn, cfg: &SeriesConfig) -> SeriesVerdict {
    let term = |q: u64| psi1.eval(q) * psi2.eval(q);
    let growth = psi1.growth().zip(psi2.growth()).map(|(a, b)| a.mul(b));
    decide(&term, growth, combined_range(psi1, psi2), cfg, Vec::new())
}

/// `s = 1`: `∑ (log q) ψ(q)`; `s < 1`: `∑ q^{1−s} ψ^s(q) (log q)^s`.
pub fn classify_multiplicative(psi: &ApproxFn, s: f64, cfg: &SeriesConfig) -> Result<SeriesVerdict> {
    check_s(s, 0.0, 1.0, true)?;
    let mut warnings = Vec::new();
    if s <= 2.0 / 3.0 {
        warnings.push(format!("s = {s} ≤ 2/3: outside the range where the convergence criterion is proven"));
    }
    let (term, growth): (Box<dyn Fn(u64) -> f64 + '_>, _) = if s == 1.0 {
        (
            Box::new(|q: u64| (q as f64).ln() * psi.eval(q)),
            psi.growth().map(|g| g.mul(Growth::log_pow(1.0))),
        )
    } else {
        (
            Box::new(move |q: u64| {
                let qf = q as f64;
                qf.powf(1.0 - s) * psi.eval(q).powf(s) * qf.ln().powf(s)
            }),
            psi.growth().map(|g| Growth::new(1.0 - s, s).mul(g.pow(s))),
        )
    };
    Ok(decide(&*term, growth, psi.table_range(), cfg, warnings))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalExponent {
    pub s0: f64,
    /// `s₀ < 1`, required for the dimension statement.
    pub below_one: bool,
}

/// `s₀ = (2 − min{v₁,v₂}) / (1 + max{v₁,v₂})`.
pub fn dimension_s0(v1: f64, v2: f64) -> Result<CriticalExponent> {
    let (lo, hi) = (v1.min(v2), v1.max(v2));
    if !(lo > 0.0 && lo < 1.0) || !hi.is_finite() {
        return Err(Error::invalid(format!("min{{v1,v2}} = {lo} must lie in (0,1)")));
    }
    let s0 = (2.0 - lo) / (1.0 + hi);
    Ok(CriticalExponent { s0, below_one: s0 < 1.0 })
}

/// Whether the lower-bound hypothesis `max{ψ₁,ψ₂}(q) ≥ q^{-η}` is enforced
/// or only reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum EtaPolicy {
    #[default]
    Warn,
    Enforce,
}

/// Inputs of the weighted Hausdorff problem together with the η hypothesis.
#[derive(Debug, Clone)]
pub struct WeightedProblem {
    pub psi1: ApproxFn,
    pub psi2: ApproxFn,
    pub h: DimensionFn,
    pub theta: (f64, f64),
    pub eta: f64,
    pub warnings: Vec<String>,
}

/// Denominators probed for the η hypothesis: `1..=2^16` and `2^t`, `t ≤ 40`.
fn eta_probe() -> impl Iterator<Item = u64> {
    (1..=1u64 << 16).chain((17..=40).map(|t| 1u64 << t))
}

impl WeightedProblem {
    pub fn new(
        psi1: ApproxFn,
        psi2: ApproxFn,
        h: DimensionFn,
        theta: (f64, f64),
        eta: f64,
        policy: EtaPolicy,
    ) -> Result<Self> {
        if !(eta < 1.0) {
            return Err(Error::invalid(format!("eta must be < 1, got {eta}")));
        }
        let mut warnings = Vec::new();
        let violation = eta_probe().find(|&q| psi1.eval(q).max(psi2.eval(q)) < (q as f64).powf(-eta) * (1.0 - 1e-12));
        if let Some(q) = violation {
            let msg = format!("max{{ψ₁,ψ₂}}({q}) < q^(-η) with η = {eta}");
            match policy {
                EtaPolicy::Enforce => return Err(Error::invalid(msg)),
                EtaPolicy::Warn => warnings.push(msg),
            }
        }
        Ok(Self { psi1, psi2, h, theta, eta, warnings })
    }

    pub fn classify(&self, cfg: &SeriesConfig) -> SeriesVerdict {
        let mut v = classify_weighted_hausdorff(&self.psi1, &self.psi2, &self.h, cfg);
        v.warnings.extend(self.warnings.iter().cloned());
        v
    }
}
