use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{Curve, NondegeneratePiece};
use crate::funcs::ApproxFn;
use crate::parallel::quadratic_chunks;
use crate::resonant::{abscissa, nearest_ordinate, Theta, DEFAULT_TAU};
use crate::{Error, Result, Threads};

/// How a candidate σ-interval is judged nonempty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CoverMode {
    /// Centre residual `< c₃·ψ₂(q)/q` with `c₃ = 1 + sup|f′|`; a superset of
    /// the nonempty intervals.
    ProofSufficient,
    /// Range of f over the x-window compared directly with the y-window.
    Exact,
}

/// `σ(p/q, θ)`: points of the piece within `ψ₁(q)/q` of `(p₁+θ₁)/q` whose
/// image is within `ψ₂(q)/q` of `(p₂+θ₂)/q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverInterval {
    pub p1: i64,
    pub p2: i64,
    pub q: u64,
    pub t: u32,
    pub centre: f64,
    pub half_width: f64,
    /// The centre itself is a resonant point for the per-q threshold
    /// `ψ₂(q)/q` with nearest `p₂`, and lies in the piece.
    pub centre_member: bool,
    /// f′ changed sign inside the x-window; the extremum was located by
    /// bisection.
    pub flagged: bool,
}

impl CoverInterval {
    pub fn diameter(&self) -> f64 {
        2.0 * self.half_width
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LevelParams<'a> {
    pub curve: &'a Curve,
    pub piece: &'a NondegeneratePiece,
    pub psi1: &'a ApproxFn,
    pub psi2: &'a ApproxFn,
    pub theta: &'a Theta,
    pub mode: CoverMode,
    pub tau: f64,
}

impl<'a> LevelParams<'a> {
    pub fn new(curve: &'a Curve, piece: &'a NondegeneratePiece, psi1: &'a ApproxFn, psi2: &'a ApproxFn, theta: &'a Theta, mode: CoverMode) -> Self {
        Self { curve, piece, psi1, psi2, theta, mode, tau: DEFAULT_TAU }
    }
}

/// Whether `ψ₁ ≤ ψ₂` holds on `[2^t, 2^{t+1})`.
pub fn ordered_on_level(psi1: &ApproxFn, psi2: &ApproxFn, t: u32) -> bool {
    (1u64 << t..1u64 << (t + 1)).all(|q| psi1.eval(q) <= psi2.eval(q) * (1.0 + 1e-12))
}

fn bisect_critical(curve: &Curve, mut lo: f64, mut hi: f64) -> f64 {
    let neg_lo = curve.df(lo) < 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (curve.df(mid) < 0.0) == neg_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn scan_q(p: &LevelParams<'_>, t: u32, q: u64, mut emit: impl FnMut(CoverInterval)) -> Result<()> {
    let qf = q as f64;
    let (lo, hi) = (p.piece.interval.lo, p.piece.interval.hi);
    let (frac1, frac2) = (p.theta.first.frac(), p.theta.second.frac());
    let (n1, n2) = (p.theta.first.int(), p.theta.second.int());
    let (psi1, psi2) = (p.psi1.eval(q), p.psi2.eval(q));
    let w1 = psi1 / qf;
    let tau = p.tau;
    let a_lo = (qf * (lo - w1) - frac1).floor() as i64 - 1;
    let a_hi = (qf * (hi + w1) - frac1).ceil() as i64 + 1;
    for a in a_lo..=a_hi {
        let centre = abscissa(a, frac1, q);
        let (x_lo, x_hi) = ((centre - w1).max(lo), (centre + w1).min(hi));
        if !(x_lo < x_hi) {
            continue;
        }
        let in_piece = centre >= lo - tau && centre <= hi + tau;
        let centre_hit = if in_piece { Some(nearest_ordinate(p.curve, centre, frac2, q)?) } else { None };
        let member = |p2: i64| centre_hit.is_some_and(|(nearest, dist)| p2 == nearest && dist < psi2 - tau);
        let mut push = |p2: i64, flagged: bool| {
            emit(CoverInterval {
                p1: a - n1,
                p2: p2 - n2,
                q,
                t,
                centre,
                half_width: w1,
                centre_member: member(p2),
                flagged,
            })
        };
        match p.mode {
            CoverMode::ProofSufficient => {
                // c₃·max{ψ₁,ψ₂}, which is c₃ψ₂ under the ordering ψ₁ ≤ ψ₂.
                // Centres just outside the piece are anchored at the nearest
                // endpoint, which is still within ψ₁(q)/q of every point of
                // the window.
                let bound = p.piece.c3() * psi1.max(psi2) + tau;
                let y = qf * p.curve.f(centre.clamp(lo, hi)) - frac2;
                for p2 in (y - bound).floor() as i64..=(y + bound).ceil() as i64 {
                    if (y - p2 as f64).abs() < bound {
                        push(p2, false);
                    }
                }
            }
            CoverMode::Exact => {
                let g = |x: f64| qf * p.curve.f(x) - frac2;
                let (g_lo, g_hi) = (g(x_lo), g(x_hi));
                let (mut g_min, mut g_max) = (g_lo.min(g_hi), g_lo.max(g_hi));
                let (d_lo, d_hi) = (p.curve.df(x_lo), p.curve.df(x_hi));
                let flagged = (d_lo < 0.0 && d_hi > 0.0) || (d_lo > 0.0 && d_hi < 0.0);
                if flagged {
                    let gc = g(bisect_critical(p.curve, x_lo, x_hi));
                    g_min = g_min.min(gc);
                    g_max = g_max.max(gc);
                }
                if (x_lo..=x_hi).contains(&centre) {
                    let gc = g(centre);
                    g_min = g_min.min(gc);
                    g_max = g_max.max(gc);
                }
                if !(g_min.is_finite() && g_max.is_finite()) {
                    return Err(Error::NonFinite { x: centre });
                }
                let reach = psi2 - tau;
                for p2 in (g_min - psi2).floor() as i64..=(g_max + psi2).ceil() as i64 {
                    let pf = p2 as f64;
                    if pf - g_max < reach && g_min - pf < reach {
                        push(p2, flagged);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Cover intervals at dyadic level `t`, ordered by `(q, p₁, p₂)`.
pub fn build_cover_level(params: &LevelParams<'_>, t: u32, threads: Threads) -> Result<Vec<CoverInterval>> {
    if t > 40 {
        return Err(Error::ComputeGuard { q: 1 << t.min(63), limit: 1 << 40 });
    }
    let chunks = quadratic_chunks(1 << t, (1 << (t + 1)) - 1, 8 * threads.count());
    let parts: Vec<Result<Vec<CoverInterval>>> = threads.pool().install(|| {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let mut out = Vec::new();
                for q in lo..=hi {
                    scan_q(params, t, q, |c| out.push(c))?;
                }
                Ok(out)
            })
            .collect()
    });
    let mut all = Vec::new();
    for part in parts {
        all.extend(part?);
    }
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LevelCount {
    pub t: u32,
    pub count: u64,
    pub flagged: u64,
}

/// Number of cover intervals at level `t` without materialising them.
pub fn count_cover_level(params: &LevelParams<'_>, t: u32, threads: Threads) -> Result<LevelCount> {
    if t > 40 {
        return Err(Error::ComputeGuard { q: 1 << t.min(63), limit: 1 << 40 });
    }
    let chunks = quadratic_chunks(1 << t, (1 << (t + 1)) - 1, 8 * threads.count());
    let parts: Vec<Result<(u64, u64)>> = threads.pool().install(|| {
        chunks
            .par_iter()
            .map(|&(lo, hi)| {
                let (mut n, mut f) = (0u64, 0u64);
                for q in lo..=hi {
                    scan_q(params, t, q, |c| {
                        n += 1;
                        f += u64::from(c.flagged);
                    })?;
                }
                Ok((n, f))
            })
            .collect()
    });
    let (mut count, mut flagged) = (0, 0);
    for part in parts {
        let (n, f) = part?;
        count += n;
        flagged += f;
    }
    Ok(LevelCount { t, count, flagged })
}
