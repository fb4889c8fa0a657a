use serde::Serialize;

use super::Curve;
use crate::interval::Interval;
use crate::{Error, Result};

/// Hölder exponent used when no η is supplied.
pub const DEFAULT_XI: f64 = 0.8;

const GRID_POINTS: usize = 1000;

/// A subinterval on which `0 < c1 ≤ |f″| ≤ c2` and f″ is Hölder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NondegeneratePiece {
    pub interval: Interval,
    pub c1: f64,
    pub c2: f64,
    /// Hölder exponent ξ for f″.
    pub xi: f64,
    /// `|f″(x) − f″(y)| ≤ K |x − y|^ξ` on the piece.
    pub holder_k: f64,
    pub sup_abs_df: f64,
    /// Set when the grid check had to widen the closed-form bounds.
    pub grid_adjusted: bool,
}

impl NondegeneratePiece {
    /// Residual multiplier `1 + sup |f′|` used by the cover nonemptiness test.
    pub fn c3(&self) -> f64 {
        1.0 + self.sup_abs_df
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub pieces: Vec<NondegeneratePiece>,
    /// Zeros of f″ in the curve's interval.
    pub zeros: Vec<f64>,
    pub excluded_measure: f64,
}

pub fn default_margin(curve: &Curve) -> f64 {
    0.05 * curve.interval().len()
}

/// Admissible Hölder exponent for a given η: the midpoint of
/// `((3η − 1)/(1 + η), 1)`, or [`DEFAULT_XI`] when the lower end is ≤ 0.
pub fn select_xi(eta: f64) -> Result<f64> {
    if !(eta < 1.0) {
        return Err(Error::invalid(format!("eta must be < 1, got {eta}")));
    }
    if eta <= 1.0 / 3.0 {
        return Ok(DEFAULT_XI);
    }
    let lower = (3.0 * eta - 1.0) / (1.0 + eta);
    Ok(0.5 * (lower + 1.0))
}

fn grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..=GRID_POINTS).map(move |i| lo + (hi - lo) * i as f64 / GRID_POINTS as f64)
}

fn build_piece(curve: &Curve, lo: f64, hi: f64, xi: f64) -> Result<NondegeneratePiece> {
    let mut candidates = vec![lo, hi];
    candidates.extend(curve.derivative_zeros(3, lo, hi).unwrap_or_default());
    let abs2 = |x: f64| curve.d2f(x).abs();
    let mut c1 = candidates.iter().map(|&x| abs2(x)).fold(f64::INFINITY, f64::min);
    let mut c2 = candidates.iter().map(|&x| abs2(x)).fold(0.0, f64::max);
    let mut grid_adjusted = false;
    let mut k = 0.0f64;
    for x in grid(lo, hi) {
        let v = abs2(x);
        if !v.is_finite() {
            return Err(Error::NonFinite { x });
        }
        if v < c1 * (1.0 - 1e-12) || v > c2 * (1.0 + 1e-12) {
            grid_adjusted = true;
            c1 = c1.min(v);
            c2 = c2.max(v);
        }
        k = k.max(curve.d3f(x).abs());
    }
    if !(c1 > 0.0) {
        return Err(Error::DegenerateCurve { lo, hi });
    }
    Ok(NondegeneratePiece {
        interval: Interval { lo, hi },
        c1,
        c2,
        xi,
        // Pieces have length ≤ 1, so a Lipschitz bound is also a Hölder bound.
        holder_k: 1.01 * k,
        sup_abs_df: curve.df(lo).abs().max(curve.df(hi).abs()),
        grid_adjusted,
    })
}

/// Splits the curve's interval into pieces of length ≤ 1 avoiding the open
/// `margin`-neighbourhoods of the zeros of f″.
pub fn decompose_nondegenerate(curve: &Curve, margin: f64, xi: f64) -> Result<Decomposition> {
    if !(margin.is_finite() && margin > 0.0) {
        return Err(Error::invalid(format!("margin must be positive, got {margin}")));
    }
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::invalid(format!("xi must lie in (0,1), got {xi}")));
    }
    let Interval { lo, hi } = curve.interval();
    let zeros = curve.derivative_zeros(2, lo, hi).ok_or(Error::DegenerateCurve { lo, hi })?;

    let mut segments = Vec::new();
    let mut cursor = lo;
    for &z in &zeros {
        if z - margin > cursor {
            segments.push((cursor, z - margin));
        }
        cursor = cursor.max(z + margin);
    }
    if hi > cursor {
        segments.push((cursor, hi));
    }

    let mut pieces = Vec::new();
    for (a, b) in segments {
        let mut n = (b - a).ceil().max(1.0) as usize;
        while (b - a) / n as f64 > 1.0 {
            n += 1;
        }
        for i in 0..n {
            let p_lo = if i == 0 { a } else { a + (b - a) * i as f64 / n as f64 };
            let p_hi = if i + 1 == n { b } else { a + (b - a) * (i + 1) as f64 / n as f64 };
            pieces.push(build_piece(curve, p_lo, p_hi, xi)?);
        }
    }
    let kept: f64 = pieces.iter().map(|p| p.interval.len()).sum();
    Ok(Decomposition { pieces, zeros, excluded_measure: (hi - lo - kept).max(0.0) })
}
