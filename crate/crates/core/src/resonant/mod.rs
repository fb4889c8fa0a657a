//! Shifted rational points `((p₁+θ₁)/q, (p₂+θ₂)/q)` close to a curve.
//!
//! Enumeration loops over `q`, then over the `p₁` whose abscissa falls in the
//! window, and takes `p₂` as the nearest integer to `q·f(x) − θ₂`. The
//! q-range is split into contiguous chunks that run in parallel and are
//! concatenated in order, so the output never depends on the thread count.

mod exact;
mod oracle;
mod theta;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::Curve;
use crate::funcs::ApproxFn;
use crate::interval::Interval;
use crate::parallel::quadratic_chunks;
use crate::{Error, Result, Threads};

pub use oracle::{brute_force_oracle, ORACLE_MAX_Q};
pub use theta::{Shift, Theta};

/// Default slack for strict inequalities in floating point.
pub const DEFAULT_TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonantPoint {
    pub p1: i64,
    pub p2: i64,
    pub q: u64,
    /// `(p₁ + θ₁)/q`
    pub x: f64,
    /// `|f(x) − (p₂ + θ₂)/q|`
    pub residual: f64,
}

impl ResonantPoint {
    /// Weight of the point in the ubiquity system.
    pub fn weight(&self) -> u64 {
        self.q
    }
}

/// Which denominators `q ≤ Q` take part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LowerMode {
    /// `Q/2 < q`
    Half,
    /// `Q/u < q`, with `u = u(Q)` supplied.
    OverU(f64),
    /// `1 ≤ q`
    All,
}

impl LowerMode {
    pub fn first_q(self, q_max: u64) -> u64 {
        match self {
            LowerMode::Half => q_max / 2 + 1,
            LowerMode::OverU(u) => {
                let bound = q_max as f64 / u;
                if bound < 1.0 {
                    1
                } else {
                    (bound.floor() as u64).saturating_add(1)
                }
            }
            LowerMode::All => 1,
        }
    }
}

/// Bound on the residual `|f(x) − (p₂+θ₂)/q|`.
#[derive(Debug, Clone)]
pub enum Threshold {
    /// The same bound for every `q` (e.g. `ψ(Q)/Q`).
    Fixed(f64),
    /// `δ/q`, i.e. `‖q·f(x) − θ₂‖ < δ`; the slack applies to the scaled form.
    PerQ(f64),
    /// `ψ(q)/q`, i.e. `‖q·f(x) − θ₂‖ < ψ(q)`; slack as for `PerQ`.
    Scaled(ApproxFn),
}

impl Threshold {
    /// Representative value: the bound itself, or `ψ(1)` for `Scaled`.
    fn value(&self) -> f64 {
        match self {
            Threshold::Fixed(t) | Threshold::PerQ(t) => *t,
            Threshold::Scaled(psi) => psi.eval(1),
        }
    }

    /// Bound on `|q·f(x) − θ₂ − p₂|` at denominator `q`, before slack.
    fn scaled_limit(&self, q: u64) -> f64 {
        match self {
            Threshold::Fixed(t) => t * q as f64,
            Threshold::PerQ(d) => *d,
            Threshold::Scaled(psi) => psi.eval(q),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum TolerancePolicy {
    /// Strict inequalities as `lhs < rhs − τ`; window membership as
    /// `lo − τ ≤ x ≤ hi + τ`.
    StrictFloat(f64),
    /// Rational arithmetic, no slack. Needs a polynomial curve and exact θ.
    ExactRational,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        TolerancePolicy::StrictFloat(DEFAULT_TAU)
    }
}

#[derive(Debug, Clone)]
pub struct ShiftedQuery {
    pub curve: Curve,
    pub window: Interval,
    pub q_max: u64,
    pub lower: LowerMode,
    pub threshold: Threshold,
    pub theta: Theta,
    pub policy: TolerancePolicy,
    pub threads: Threads,
}

impl ShiftedQuery {
    /// All-mode, homogeneous, StrictFloat query over the whole curve.
    pub fn new(curve: Curve, q_max: u64, threshold: Threshold) -> Self {
        let window = curve.interval();
        Self {
            curve,
            window,
            q_max,
            lower: LowerMode::All,
            threshold,
            theta: Theta::zero(),
            policy: TolerancePolicy::default(),
            threads: Threads::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_max == 0 {
            return Err(Error::invalid("Q must be at least 1"));
        }
        let t = self.threshold.value();
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::invalid(format!("threshold must be positive, got {t}")));
        }
        if !self.window.is_empty() && !self.curve.interval().contains_interval(&self.window) {
            return Err(Error::invalid(format!(
                "window {} is not inside the curve interval {}",
                self.window,
                self.curve.interval()
            )));
        }
        if let TolerancePolicy::StrictFloat(tau) = self.policy {
            if !(tau.is_finite() && tau >= 0.0) {
                return Err(Error::invalid(format!("tolerance must be nonnegative, got {tau}")));
            }
        }
        if let LowerMode::OverU(u) = self.lower {
            if !(u >= 1.0) {
                return Err(Error::invalid(format!("u(Q) must be ≥ 1, got {u}")));
            }
        }
        if self.policy == TolerancePolicy::ExactRational {
            exact::check_supported(self)?;
        }
        Ok(())
    }

    /// Threshold so large that every abscissa admits a `p₂`.
    pub fn is_trivial(&self) -> bool {
        match &self.threshold {
            Threshold::Fixed(t) => t * self.q_max as f64 >= 0.5,
            Threshold::PerQ(d) => *d >= 0.5,
            Threshold::Scaled(psi) => psi.eval(self.q_max) >= 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Enumeration {
    pub points: Vec<ResonantPoint>,
    pub warnings: Vec<String>,
}

/// `(a + frac₁)/q`.
pub(crate) fn abscissa(a: i64, frac1: f64, q: u64) -> f64 {
    (a as f64 + frac1) / q as f64
}

/// Nearest `p` to `q·f(x) − frac₂` and the distance to it.
pub(crate) fn nearest_ordinate(curve: &Curve, x: f64, frac2: f64, q: u64) -> Result<(i64, f64)> {
    let fx = curve.f(x);
    if !fx.is_finite() {
        return Err(Error::NonFinite { x });
    }
    let y = q as f64 * fx - frac2;
    let p = y.round();
    Ok((p as i64, (y - p).abs()))
}

/// Floating-point scan of one denominator.
pub(crate) struct FloatScan<'a> {
    curve: &'a Curve,
    lo: f64,
    hi: f64,
    frac1: f64,
    frac2: f64,
    threshold: &'a Threshold,
    tau: f64,
}

impl<'a> FloatScan<'a> {
    pub(crate) fn new(q: &'a ShiftedQuery, tau: f64) -> Self {
        Self {
            curve: &q.curve,
            lo: q.window.lo - tau,
            hi: q.window.hi + tau,
            frac1: q.theta.first.frac(),
            frac2: q.theta.second.frac(),
            threshold: &q.threshold,
            tau,
        }
    }

    /// Calls `hit(a, p, x, dist)` for every passing point, where `a` and `p`
    /// are numerators relative to the fractional parts of θ and
    /// `dist = |q·f(x) − frac₂ − p|`.
    pub(crate) fn scan(&self, q: u64, mut hit: impl FnMut(i64, i64, f64, f64)) -> Result<()> {
        let qf = q as f64;
        let a_lo = (qf * self.lo - self.frac1).ceil() as i64 - 1;
        let a_hi = (qf * self.hi - self.frac1).floor() as i64 + 1;
        let fixed = match self.threshold {
            Threshold::Fixed(t) => Some(t - self.tau),
            _ => None,
        };
        let limit = self.threshold.scaled_limit(q) - self.tau;
        for a in a_lo..=a_hi {
            let x = abscissa(a, self.frac1, q);
            if x < self.lo || x > self.hi {
                continue;
            }
            let (p, dist) = nearest_ordinate(self.curve, x, self.frac2, q)?;
            let pass = match fixed {
                Some(t) => dist / qf < t,
                None => dist < limit,
            };
            if pass {
                hit(a, p, x, dist);
            }
        }
        Ok(())
    }
}

fn chunks_for(q_lo: u64, q_hi: u64, threads: Threads) -> Vec<(u64, u64)> {
    quadratic_chunks(q_lo, q_hi, 8 * threads.count())
}

/// `A_Q(J, θ)` (or the variant selected by the lower mode), sorted by
/// `(q, p₁)`.
pub fn enumerate_aq(query: &ShiftedQuery) -> Result<Enumeration> {
    query.validate()?;
    let mut warnings = Vec::new();
    if query.is_trivial() {
        warnings.push(format!(
            "threshold {} is at least 1/2 after scaling by q: every abscissa admits a p2",
            query.threshold.value()
        ));
    }
    if query.window.is_empty() {
        return Ok(Enumeration { points: Vec::new(), warnings });
    }
    let q_lo = query.lower.first_q(query.q_max);
    let points = match query.policy {
        TolerancePolicy::ExactRational => exact::enumerate(query, q_lo)?,
        TolerancePolicy::StrictFloat(tau) => {
            let scan = FloatScan::new(query, tau);
            let (n1, n2) = (query.theta.first.int(), query.theta.second.int());
            let chunks = chunks_for(q_lo, query.q_max, query.threads);
            let parts: Vec<Result<Vec<ResonantPoint>>> = query.threads.pool().install(|| {
                chunks
                    .par_iter()
                    .map(|&(lo, hi)| {
                        let mut out = Vec::new();
                        for q in lo..=hi {
                            scan.scan(q, |a, p, x, dist| {
                                out.push(ResonantPoint { p1: a - n1, p2: p - n2, q, x, residual: dist / q as f64 })
                            })?;
                        }
                        Ok(out)
                    })
                    .collect()
            });
            let mut points = Vec::new();
            for part in parts {
                points.extend(part?);
            }
            points
        }
    };
    Ok(Enumeration { points, warnings })
}

/// `N(Q, δ, θ) = #{(a, q) : q ≤ Q, (a+θ₁)/q ∈ I, ‖q·f((a+θ₁)/q) − θ₂‖ < δ}`.
pub fn count_n(
    curve: &Curve,
    interval: Interval,
    q_max: u64,
    delta: f64,
    theta: &Theta,
    policy: TolerancePolicy,
    threads: Threads,
) -> Result<u64> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let query = ShiftedQuery {
        curve: curve.clone(),
        window: interval,
        q_max,
        lower: LowerMode::All,
        threshold: Threshold::PerQ(delta),
        theta: theta.clone(),
        policy,
        threads,
    };
    query.validate()?;
    if interval.is_empty() {
        return Ok(0);
    }
    match policy {
        TolerancePolicy::ExactRational => Ok(exact::enumerate(&query, 1)?.len() as u64),
        TolerancePolicy::StrictFloat(tau) => {
            let scan = FloatScan::new(&query, tau);
            let chunks = chunks_for(1, q_max, threads);
            let counts: Vec<Result<u64>> = threads.pool().install(|| {
                chunks
                    .par_iter()
                    .map(|&(lo, hi)| {
                        let mut n = 0u64;
                        for q in lo..=hi {
                            scan.scan(q, |_, _, _, _| n += 1)?;
                        }
                        Ok(n)
                    })
                    .collect()
            });
            counts.into_iter().sum()
        }
    }
}

/// `δQ² + δ^{-1/2} Q^{1/2+ε}`, the reference scale for `N(Q, δ, θ)`.
pub fn counting_bound(q_max: u64, delta: f64, eps: f64) -> f64 {
    let q = q_max as f64;
    delta * q * q + delta.powf(-0.5) * q.powf(0.5 + eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::parse_curve;

    fn parabola_query(q_max: u64, threshold: Threshold) -> ShiftedQuery {
        ShiftedQuery::new(Curve::parabola(), q_max, threshold)
    }

    #[test]
    fn trivial_threshold_counts_every_abscissa() {
        let mut q = parabola_query(4, Threshold::Fixed(0.6));
        q.lower = LowerMode::Half;
        let e = enumerate_aq(&q).unwrap();
        assert_eq!(e.warnings.len(), 1);
        // q = 3: p₁ ∈ 0..=3, q = 4: p₁ ∈ 0..=4.
        assert_eq!(e.points.len(), 4 + 5);
        assert!(e.points.windows(2).all(|w| (w[0].q, w[0].p1) < (w[1].q, w[1].p1)));
    }

    #[test]
    fn exhaustive_list_q32() {
        let threshold = 0.1 / 32.0;
        let got = enumerate_aq(&parabola_query(32, Threshold::Fixed(threshold))).unwrap().points;
        // Independent double loop over every (p₁, p₂, q).
        let mut want = Vec::new();
        for q in 1..=32i64 {
            for p1 in 0..=q {
                for p2 in -2..=q + 2 {
                    let x = p1 as f64 / q as f64;
                    if (x * x - p2 as f64 / q as f64).abs() < threshold - DEFAULT_TAU {
                        want.push((p1, p2, q as u64));
                    }
                }
            }
        }
        let got: Vec<_> = got.iter().map(|p| (p.p1, p.p2, p.q)).collect();
        assert_eq!(got, want);
        assert!(got.contains(&(0, 0, 1)) && got.contains(&(1, 1, 1)));
    }

    #[test]
    fn integer_shift_changes_only_numerators() {
        let mut a = parabola_query(40, Threshold::Fixed(0.01));
        a.theta = Theta::parse("0.3,0.7").unwrap();
        let mut b = a.clone();
        b.theta = Theta::parse("1.3,-0.3").unwrap();
        let (ea, eb) = (enumerate_aq(&a).unwrap().points, enumerate_aq(&b).unwrap().points);
        assert!(!ea.is_empty());
        assert_eq!(ea.len(), eb.len());
        for (x, y) in ea.iter().zip(&eb) {
            assert_eq!((x.q, x.x, x.residual), (y.q, y.x, y.residual));
            assert_eq!((x.p1 - y.p1, x.p2 - y.p2), (1, -1));
        }
    }

    #[test]
    fn count_matches_per_q_enumeration() {
        let curve = parse_curve("cubic").unwrap();
        let theta = Theta::irrational();
        let n = count_n(&curve, curve.interval(), 60, 0.05, &theta, TolerancePolicy::default(), Threads::Auto).unwrap();
        let mut q = ShiftedQuery::new(curve, 60, Threshold::PerQ(0.05));
        q.theta = theta;
        assert_eq!(enumerate_aq(&q).unwrap().points.len() as u64, n);
    }

    #[test]
    fn count_small_parabola_by_hand() {
        // Independent count straight from the definition.
        let mut want = 0;
        for q in 1..=10u64 {
            for a in 0..=q {
                let v = (a * a) as f64 / q as f64;
                if (v - v.round()).abs() < 0.25 {
                    want += 1;
                }
            }
        }
        let got = count_n(&Curve::parabola(), Interval { lo: 0.0, hi: 1.0 }, 10, 0.25, &Theta::zero(), TolerancePolicy::default(), Threads::Fixed(2)).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = Curve::parabola();
        let i = c.interval();
        assert!(count_n(&c, i, 10, 0.5, &Theta::zero(), TolerancePolicy::default(), Threads::Auto).is_err());
        assert!(count_n(&c, i, 0, 0.1, &Theta::zero(), TolerancePolicy::default(), Threads::Auto).is_err());
        assert!(count_n(&c, Interval { lo: 0.5, hi: 2.0 }, 10, 0.1, &Theta::zero(), TolerancePolicy::default(), Threads::Auto).is_err());
        assert_eq!(count_n(&c, Interval::empty(), 10, 0.1, &Theta::zero(), TolerancePolicy::default(), Threads::Auto).unwrap(), 0);
        let overflow = parse_curve("exp interval=[0,800]").unwrap();
        assert!(matches!(
            enumerate_aq(&ShiftedQuery::new(overflow, 4, Threshold::Fixed(0.1))),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn lower_modes() {
        assert_eq!(LowerMode::Half.first_q(9), 5);
        assert_eq!(LowerMode::Half.first_q(8), 5);
        assert_eq!(LowerMode::All.first_q(8), 1);
        assert_eq!(LowerMode::OverU(4.0).first_q(16), 5);
        assert_eq!(LowerMode::OverU(100.0).first_q(16), 1);
    }

    #[test]
    fn exact_policy_agrees_with_float_for_rational_theta() {
        let curve = parse_curve("poly(0,0.5,1,-0.25)").unwrap();
        let theta = Theta::parse("1/3,-2/7").unwrap();
        for delta in [0.01, 0.1, 0.3] {
            let f = count_n(&curve, curve.interval(), 48, delta, &theta, TolerancePolicy::default(), Threads::Auto).unwrap();
            let e = count_n(&curve, curve.interval(), 48, delta, &theta, TolerancePolicy::ExactRational, Threads::Auto).unwrap();
            assert_eq!(f, e, "delta={delta}");
        }
        assert!(count_n(&parse_curve("sin").unwrap(), Interval { lo: 0.0, hi: 1.0 }, 8, 0.1, &theta, TolerancePolicy::ExactRational, Threads::Auto).is_err());
    }
}
