//! Ubiquity wiring and empirical local-ubiquity coverage.
//!
//! Resonant points carry weight `q`; the dyadic base is 2.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::Curve;
use crate::funcs::ApproxFn;
use crate::interval::{union_measure_within, Interval};
use crate::resonant::{enumerate_aq, LowerMode, ShiftedQuery, Theta, Threshold, TolerancePolicy};
use crate::{Error, Result, Threads};

/// Dyadic base of the ubiquity system.
pub const DYADIC_BASE: u64 = 2;

/// Greedy staircase: block `i` (1-based) covers `boundaries[i-1]..boundaries[i]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Staircase {
    /// `l₀ < l₁ < …`; block `i` is `l_{i-1} ≤ l < l_i`.
    pub boundaries: Vec<u64>,
    pub block_sums: Vec<f64>,
}

impl Staircase {
    /// Block index containing `l`; past the last closed block the staircase
    /// keeps climbing by one.
    pub fn value(&self, l: u64) -> f64 {
        let closed = self.boundaries.partition_point(|&b| b <= l);
        closed.max(1) as f64
    }

    pub fn blocks(&self) -> usize {
        self.block_sums.len()
    }
}

/// Closes a block as soon as its running sum exceeds 1, starting from
/// `l = first`. Stops after `target_blocks` blocks; errors if `budget` terms
/// are exhausted first.
pub fn build_u_staircase(term: impl Fn(u64) -> f64, first: u64, target_blocks: usize, budget: u64) -> Result<Staircase> {
    let mut boundaries = vec![first];
    let mut block_sums = Vec::new();
    let mut acc = 0.0;
    let mut l = first;
    while block_sums.len() < target_blocks {
        if l - first >= budget {
            return Err(Error::StaircaseIncomplete { blocks: block_sums.len(), budget });
        }
        let v = term(l);
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::invalid(format!("staircase term at l = {l} is {v}")));
        }
        acc += v;
        l += 1;
        if acc > 1.0 {
            boundaries.push(l);
            block_sums.push(acc);
            acc = 0.0;
        }
    }
    Ok(Staircase { boundaries, block_sums })
}

/// `u(q) = ∑_{t=0}^{⌊q⌋} 2^t ψ₁(2^t) ψ₂(2^t)`, evaluated in log space so
/// that large `q` stay finite.
#[derive(Debug, Clone)]
pub struct PartialSumU {
    prefix: Vec<f64>,
}

/// Number of dyadic terms tabulated for [`PartialSumU`].
pub const PARTIAL_SUM_TERMS: usize = 1024;

impl PartialSumU {
    pub fn new(psi1: &ApproxFn, psi2: &ApproxFn) -> Self {
        let mut acc = 0.0;
        let prefix = (0..PARTIAL_SUM_TERMS)
            .map(|t| {
                let ln_q = t as f64 * LN_2;
                acc += (ln_q + psi1.ln_eval(ln_q) + psi2.ln_eval(ln_q)).exp();
                acc
            })
            .collect();
        Self { prefix }
    }

    pub fn value(&self, q: f64) -> f64 {
        let idx = q.max(0.0).floor().min((PARTIAL_SUM_TERMS - 1) as f64) as usize;
        self.prefix[idx]
    }

    /// Whether the tabulated sums keep growing: the last half of the table
    /// adds at least as much as a fixed fraction of a unit per term on
    /// average, i.e. the dyadic series looks divergent.
    pub fn diverges_on_range(&self) -> bool {
        let n = self.prefix.len();
        let late = self.prefix[n - 1] - self.prefix[n / 2 - 1];
        late > 1.0 && late > 0.1 * self.prefix[n / 2 - 1]
    }
}

pub fn build_u_partial_sums(psi1: &ApproxFn, psi2: &ApproxFn) -> PartialSumU {
    PartialSumU::new(psi1, psi2)
}

#[derive(Debug, Clone)]
pub enum UFunction {
    Staircase(Staircase),
    PartialSums(PartialSumU),
    /// `log₂(2 + t)`
    Log2,
}

impl UFunction {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            UFunction::Staircase(s) => s.value(t.max(0.0) as u64),
            UFunction::PartialSums(p) => p.value(t),
            UFunction::Log2 => (2.0 + t).log2(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UFunction::Staircase(_) => "staircase",
            UFunction::PartialSums(_) => "partial_sums",
            UFunction::Log2 => "log2",
        }
    }
}

/// `Φ(t) = ψ(t)/t`, `Ψ(t) = ψ₁(t)/t`, `ρ(t) = u(t)/(t²ψ(t))`.
#[derive(Debug, Clone)]
pub struct UbiquityWiring {
    pub psi: ApproxFn,
    pub psi1: ApproxFn,
    pub u: UFunction,
}

impl UbiquityWiring {
    pub fn new(psi: ApproxFn, psi1: ApproxFn, u: UFunction) -> Self {
        Self { psi, psi1, u }
    }

    pub fn phi(&self, t: u64) -> f64 {
        self.psi.eval(t) / t as f64
    }

    pub fn big_psi(&self, t: u64) -> f64 {
        self.psi1.eval(t) / t as f64
    }

    pub fn rho(&self, t: u64) -> f64 {
        let tf = t as f64;
        self.u.value(tf) / (tf * tf * self.psi.eval(t))
    }

    pub fn beta(q: u64) -> u64 {
        q
    }

    /// First `t ≤ t_max` with `Ψ(2^{t+1}) > ½ Ψ(2^t)` (relative slack 1e-12).
    pub fn halving_violation(&self, t_max: u32) -> Option<u32> {
        (0..t_max.min(62)).find(|&t| self.big_psi(1 << (t + 1)) > 0.5 * self.big_psi(1 << t) * (1.0 + 1e-12))
    }
}

/// Checks `ψ(t) → 0` and `tψ(t) → ∞` along `t = 2^8..2^40`; returns warnings.
pub fn check_wiring_hypotheses(psi: &ApproxFn) -> Vec<String> {
    let mut warnings = Vec::new();
    let a = psi.eval(1 << 8);
    let b = psi.eval(1 << 40);
    if !(b < 0.5 * a) {
        warnings.push(format!("ψ does not visibly decay to 0: ψ(2^8) = {a:.3e}, ψ(2^40) = {b:.3e}"));
    }
    let ta = a * 256.0;
    let tb = b * (1u64 << 40) as f64;
    if !(tb > 2.0 * ta) {
        warnings.push(format!("tψ(t) does not visibly grow: {ta:.3e} at 2^8, {tb:.3e} at 2^40"));
    }
    warnings
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageReport {
    pub window: Interval,
    pub q_max: u64,
    pub c: f64,
    pub radius: f64,
    pub covered: f64,
    pub fraction: f64,
    pub points: usize,
    /// Whether `c` is the smallest grid value reaching fraction ≥ ½ at this Q.
    pub minimal_c: bool,
}

#[derive(Debug, Clone)]
pub struct UbiquityRun {
    pub curve: Curve,
    pub window: Interval,
    pub psi: ApproxFn,
    pub theta: Theta,
    pub q_values: Vec<u64>,
    pub c_grid: Vec<f64>,
    pub policy: TolerancePolicy,
    pub threads: Threads,
}

/// `2^0, 2^1, …, 2^8`.
pub fn default_c_grid() -> Vec<f64> {
    (0..=8).map(|k| f64::from(1u32 << k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UbiquityOutcome {
    pub reports: Vec<CoverageReport>,
    pub warnings: Vec<String>,
}

impl UbiquityOutcome {
    /// Smallest grid `C` reaching fraction ≥ ½ at each Q (None if none does).
    pub fn minimal_c_series(&self) -> Vec<(u64, Option<f64>)> {
        let mut qs: Vec<u64> = self.reports.iter().map(|r| r.q_max).collect();
        qs.dedup();
        qs.into_iter()
            .map(|q| (q, self.reports.iter().find(|r| r.q_max == q && r.minimal_c).map(|r| r.c)))
            .collect()
    }
}

fn coverage_for_q(run: &UbiquityRun, q_max: u64) -> Result<Vec<CoverageReport>> {
    let psi_q = run.psi.eval(q_max);
    let query = ShiftedQuery {
        curve: run.curve.clone(),
        window: run.window,
        q_max,
        lower: LowerMode::Half,
        threshold: Threshold::Fixed(psi_q / q_max as f64),
        theta: run.theta.clone(),
        policy: run.policy,
        threads: Threads::Fixed(1),
    };
    let centres: Vec<f64> = enumerate_aq(&query)?.points.iter().map(|p| p.x).collect();
    let qf = q_max as f64;
    let len = run.window.len();
    let mut reports: Vec<CoverageReport> = run
        .c_grid
        .iter()
        .map(|&c| {
            let radius = c / (qf * qf * psi_q);
            let balls: Vec<Interval> = centres.iter().map(|&x| Interval { lo: x - radius, hi: x + radius }).collect();
            let covered = union_measure_within(&balls, &run.window);
            let fraction = if len > 0.0 { (covered / len).clamp(0.0, 1.0) } else { 0.0 };
            CoverageReport { window: run.window, q_max, c, radius, covered, fraction, points: centres.len(), minimal_c: false }
        })
        .collect();
    if let Some(first) = reports.iter_mut().filter(|r| r.fraction >= 0.5).min_by(|a, b| a.c.total_cmp(&b.c)) {
        first.minimal_c = true;
    }
    Ok(reports)
}

/// For each Q: balls of radius `C/(Q²ψ(Q))` around the Half-mode points of
/// `A_Q(J, θ)` with threshold `ψ(Q)/Q`, merged and measured inside J.
pub fn verify_local_ubiquity(run: &UbiquityRun) -> Result<UbiquityOutcome> {
    if run.window.is_empty() || run.window.len() == 0.0 {
        return Err(Error::invalid(format!("window {} is empty", run.window)));
    }
    if run.c_grid.is_empty() || run.c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
        return Err(Error::invalid("C grid must be nonempty and positive"));
    }
    if run.q_values.contains(&0) {
        return Err(Error::invalid("Q values must be positive"));
    }
    let warnings = check_wiring_hypotheses(&run.psi);
    let per_q: Vec<Result<Vec<CoverageReport>>> =
        run.threads.pool().install(|| run.q_values.par_iter().map(|&q| coverage_for_q(run, q)).collect());
    let mut reports = Vec::new();
    for r in per_q {
        reports.extend(r?);
    }
    Ok(UbiquityOutcome { reports, warnings })
}

/// Liminf surrogate: the minimum of `values` after skipping `burn_in` entries.
pub fn liminf_after_burn_in(values: &[f64], burn_in: usize) -> Option<f64> {
    values.iter().skip(burn_in).copied().reduce(f64::min)
}
