use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::Curve;
use crate::funcs::ApproxFn;
use crate::resonant::{Theta, DEFAULT_TAU};
use crate::{Error, Result, Threads};

/// Nearest integer to `v` and the distance to it.
fn nearest(v: f64) -> (i64, f64) {
    let p = v.round();
    (p as i64, (v - p).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipWitness {
    pub x: f64,
    pub q: u64,
    pub p1: i64,
    pub p2: i64,
    /// `(‖qx − θ₁‖, ‖q·f(x) − θ₂‖)`
    pub residuals: (f64, f64),
}

/// Inclusive denominator window `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QWindow {
    pub lo: u64,
    pub hi: u64,
}

impl QWindow {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo == 0 || lo > hi {
            return Err(Error::invalid(format!("q window must satisfy 1 ≤ lo ≤ hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn up_to(hi: u64) -> Result<Self> {
        Self::new(1, hi)
    }
}

/// Smallest `q` in the window with `‖qx − θ₁‖ < ψ₁(q)` and
/// `‖q·f(x) − θ₂‖ < ψ₂(q)` (strict, with slack τ).
pub fn membership_test(
    x: f64,
    curve: &Curve,
    psi1: &ApproxFn,
    psi2: &ApproxFn,
    theta: &Theta,
    window: QWindow,
    tau: f64,
) -> Option<MembershipWitness> {
    let fx = curve.f(x);
    let (frac1, frac2) = (theta.first.frac(), theta.second.frac());
    (window.lo..=window.hi).find_map(|q| {
        let qf = q as f64;
        let (a, r1) = nearest(qf * x - frac1);
        if r1 >= psi1.eval(q) - tau {
            return None;
        }
        let (b, r2) = nearest(qf * fx - frac2);
        (r2 < psi2.eval(q) - tau).then(|| MembershipWitness {
            x,
            q,
            p1: a - theta.first.int(),
            p2: b - theta.second.int(),
            residuals: (r1, r2),
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultiplicativeWitness {
    pub q: u64,
    pub residuals: (f64, f64),
}

/// Smallest `q` in the window with `‖qx₁ − θ₁‖·‖qx₂ − θ₂‖ < ψ(q)`.
pub fn multiplicative_membership(
    x1: f64,
    x2: f64,
    psi: &ApproxFn,
    theta: &Theta,
    window: QWindow,
    tau: f64,
) -> Option<MultiplicativeWitness> {
    let (frac1, frac2) = (theta.first.frac(), theta.second.frac());
    (window.lo..=window.hi).find_map(|q| {
        let qf = q as f64;
        let r1 = nearest(qf * x1 - frac1).1;
        let r2 = nearest(qf * x2 - frac2).1;
        (r1 * r2 < psi.eval(q) - tau).then_some(MultiplicativeWitness { q, residuals: (r1, r2) })
    })
}

/// Samples drawn per generator stream.
pub const BATCH: usize = 1024;

/// `n` uniform points of `[lo, hi)`: batch `k` uses stream `k` of a ChaCha8
/// generator seeded with `seed`, so the sequence is independent of how
/// batches are scheduled.
pub fn sample_points(lo: f64, hi: f64, n: usize, seed: u64) -> Vec<f64> {
    let batches = n.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = BATCH.min(n - k * BATCH);
            (0..len).map(move |_| lo + (hi - lo) * rng.random::<f64>()).collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub samples: usize,
    pub hits: usize,
    pub fraction: f64,
    pub window: QWindow,
    pub seed: u64,
    /// Sampled abscissae, for replay.
    pub xs: Vec<f64>,
    /// Witness `q` per sample, if any.
    pub witnesses: Vec<Option<u64>>,
}

fn estimate(
    curve: &Curve,
    window: QWindow,
    samples: usize,
    seed: u64,
    threads: Threads,
    test: impl Fn(f64) -> Option<u64> + Sync,
) -> Result<MonteCarloEstimate> {
    if samples == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let i = curve.interval();
    let (xs, witnesses) = threads.pool().install(|| {
        let xs = sample_points(i.lo, i.hi, samples, seed);
        let w: Vec<Option<u64>> = xs.par_iter().map(|&x| test(x)).collect();
        (xs, w)
    });
    let hits = witnesses.iter().filter(|w| w.is_some()).count();
    Ok(MonteCarloEstimate { samples, hits, fraction: hits as f64 / samples as f64, window, seed, xs, witnesses })
}

/// Fraction of uniform samples of the curve's interval with a simultaneous
/// witness in the window.
pub fn lebesgue_fraction(
    curve: &Curve,
    psi1: &ApproxFn,
    psi2: &ApproxFn,
    theta: &Theta,
    window: QWindow,
    samples: usize,
    seed: u64,
    threads: Threads,
) -> Result<MonteCarloEstimate> {
    estimate(curve, window, samples, seed, threads, |x| {
        membership_test(x, curve, psi1, psi2, theta, window, DEFAULT_TAU).map(|w| w.q)
    })
}

/// Multiplicative analogue of [`lebesgue_fraction`] with `x₂ = f(x₁)`.
pub fn multiplicative_fraction(
    curve: &Curve,
    psi: &ApproxFn,
    theta: &Theta,
    window: QWindow,
    samples: usize,
    seed: u64,
    threads: Threads,
) -> Result<MonteCarloEstimate> {
    estimate(curve, window, samples, seed, threads, |x| {
        multiplicative_membership(x, curve.f(x), psi, theta, window, DEFAULT_TAU).map(|w| w.q)
    })
}

/// `∑_{q ∈ window} 4ψ₁(q)ψ₂(q)`: expected number of witnesses per point.
pub fn first_moment_bound(psi1: &ApproxFn, psi2: &ApproxFn, window: QWindow) -> f64 {
    (window.lo..=window.hi).map(|q| 4.0 * psi1.eval(q) * psi2.eval(q)).sum()
}
