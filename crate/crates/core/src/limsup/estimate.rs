use serde::Serialize;

use super::cover::{count_cover_level, CoverMode, LevelParams};
use crate::curves::{Curve, NondegeneratePiece};
use crate::funcs::{check_t04_admissible, default_probe_grid, reduce_min_max, ApproxFn, DimensionFn};
use crate::resonant::{Theta, DEFAULT_TAU};
use crate::{Error, Result, Threads};

#[derive(Debug, Clone)]
pub struct HausdorffInput<'a> {
    pub curve: &'a Curve,
    pub pieces: &'a [NondegeneratePiece],
    pub psi1: &'a ApproxFn,
    pub psi2: &'a ApproxFn,
    pub theta: &'a Theta,
    pub h: &'a DimensionFn,
    pub first_level: u32,
    pub last_level: u32,
    pub mode: CoverMode,
    pub threads: Threads,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelContribution {
    pub t: u32,
    /// Cover count with `(ψ, φ) = (min, max)`.
    pub count_min_max: u64,
    /// Cover count with the roles swapped.
    pub count_max_min: u64,
    /// Flagged intervals over both passes.
    pub flagged: u64,
    /// `count_min_max · h(2ψ(2^t)/2^t) + count_max_min · h(2φ(2^t)/2^t)`.
    pub contribution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HausdorffEstimate {
    pub levels: Vec<LevelContribution>,
    /// `(l, ∑_{t=l}^{L} contribution(t))` for `l = first..=last`.
    pub tails: Vec<(u32, f64)>,
}

impl HausdorffEstimate {
    pub fn tail(&self, l: u32) -> Option<f64> {
        self.tails.iter().find(|(t, _)| *t == l).map(|(_, v)| *v)
    }
}

fn level_count(input: &HausdorffInput<'_>, first: &ApproxFn, second: &ApproxFn, t: u32) -> Result<(u64, u64)> {
    let (mut count, mut flagged) = (0, 0);
    for piece in input.pieces {
        let params = LevelParams {
            curve: input.curve,
            piece,
            psi1: first,
            psi2: second,
            theta: input.theta,
            mode: input.mode,
            tau: DEFAULT_TAU,
        };
        let c = count_cover_level(&params, t, input.threads)?;
        count += c.count;
        flagged += c.flagged;
    }
    Ok((count, flagged))
}

/// Finite-level upper bound for the h-measure from actual cover counts, with
/// both orderings of the min/max reduction summed.
pub fn hausdorff_upper_estimate(input: &HausdorffInput<'_>) -> Result<HausdorffEstimate> {
    if input.first_level > input.last_level {
        return Err(Error::invalid(format!("need l ≤ L, got l = {} > L = {}", input.first_level, input.last_level)));
    }
    let report = check_t04_admissible(input.h, &default_probe_grid())?;
    if !report.admissible {
        return Err(Error::invalid(format!("dimension function {} is not admissible", input.h)));
    }
    let (small, large) = reduce_min_max(input.psi1, input.psi2);
    let mut levels = Vec::new();
    for t in input.first_level..=input.last_level {
        let q = 1u64 << t;
        let (a, fa) = level_count(input, &small, &large, t)?;
        let (b, fb) = level_count(input, &large, &small, t)?;
        let qf = q as f64;
        let contribution = a as f64 * input.h.eval(2.0 * small.eval(q) / qf) + b as f64 * input.h.eval(2.0 * large.eval(q) / qf);
        levels.push(LevelContribution { t, count_min_max: a, count_max_min: b, flagged: fa + fb, contribution });
    }
    let mut tails = Vec::with_capacity(levels.len());
    let mut acc = 0.0;
    for lc in levels.iter().rev() {
        acc += lc.contribution;
        tails.push((lc.t, acc));
    }
    tails.reverse();
    Ok(HausdorffEstimate { levels, tails })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeEstimate {
    /// Fitted slope of `log₂ count(t)` against `t·(1 + v_max)`.
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// `slope ± 2·stderr`.
    pub band: (f64, f64),
    pub residual_rms: f64,
    pub levels_used: Vec<u32>,
    pub zero_levels: Vec<u32>,
}

/// Levels skipped at the low end of a slope fit.
pub const DEFAULT_BURN_IN: usize = 2;

/// Minimum number of levels a slope fit accepts.
pub const MIN_SLOPE_LEVELS: usize = 5;

/// Least-squares slope of `log₂ count` against `t(1 + v_max)` after dropping
/// the `burn_in` lowest levels; zero counts are excluded and reported.
pub fn slope_dimension_estimate(counts: &[(u32, f64)], v_max: f64, burn_in: usize) -> Result<SlopeEstimate> {
    if counts.len() < MIN_SLOPE_LEVELS {
        return Err(Error::invalid(format!("need at least {MIN_SLOPE_LEVELS} levels, got {}", counts.len())));
    }
    if !(v_max.is_finite() && v_max > -1.0) {
        return Err(Error::invalid(format!("v_max must exceed -1, got {v_max}")));
    }
    let mut sorted = counts.to_vec();
    sorted.sort_by_key(|&(t, _)| t);
    let mut zero_levels = Vec::new();
    let mut pts = Vec::new();
    for &(t, c) in sorted.iter().skip(burn_in) {
        if c > 0.0 {
            pts.push((t, t as f64 * (1.0 + v_max), c.log2()));
        } else {
            zero_levels.push(t);
        }
    }
    if pts.len() < 3 {
        return Err(Error::invalid(format!("only {} usable levels after burn-in and zero exclusion", pts.len())));
    }
    let n = pts.len() as f64;
    let xm = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let ym = pts.iter().map(|p| p.2).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.1 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.1 - xm) * (p.2 - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse: f64 = pts.iter().map(|p| (p.2 - intercept - slope * p.1).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(SlopeEstimate {
        slope,
        intercept,
        stderr,
        band: (slope - 2.0 * stderr, slope + 2.0 * stderr),
        residual_rms: (sse / n).sqrt(),
        levels_used: pts.iter().map(|p| p.0).collect(),
        zero_levels,
    })
}
