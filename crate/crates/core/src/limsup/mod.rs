//! Covers of the approximable set, h-measure upper estimates, dimension
//! slopes and pointwise membership.

mod cover;
mod estimate;
mod membership;

pub use cover::{build_cover_level, count_cover_level, ordered_on_level, CoverInterval, CoverMode, LevelCount, LevelParams};
pub use estimate::{
    hausdorff_upper_estimate, slope_dimension_estimate, HausdorffEstimate, HausdorffInput, LevelContribution,
    SlopeEstimate, DEFAULT_BURN_IN, MIN_SLOPE_LEVELS,
};
pub use membership::{
    first_moment_bound, lebesgue_fraction, membership_test, multiplicative_fraction, multiplicative_membership,
    sample_points, MembershipWitness, MonteCarloEstimate, MultiplicativeWitness, QWindow, BATCH,
};

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::curves::{decompose_nondegenerate, parse_curve, Curve, NondegeneratePiece, DEFAULT_XI};
    use crate::funcs::{ApproxFn, DimensionFn};
    use crate::resonant::{enumerate_aq, LowerMode, ShiftedQuery, Theta, Threshold, DEFAULT_TAU};
    use crate::Threads;

    fn pow(v: f64) -> ApproxFn {
        ApproxFn::power(v).unwrap()
    }

    fn parabola_piece() -> (Curve, NondegeneratePiece) {
        let c = Curve::parabola();
        let d = decompose_nondegenerate(&c, 0.05, DEFAULT_XI).unwrap();
        (c, d.pieces[0])
    }

    fn keys(v: &[CoverInterval]) -> BTreeSet<(i64, i64, u64)> {
        v.iter().map(|c| (c.p1, c.p2, c.q)).collect()
    }

    #[test]
    fn exact_cover_within_sufficient_cover() {
        let (c, piece) = parabola_piece();
        let (s1, s2) = (pow(0.8), pow(0.6));
        for theta in [Theta::zero(), Theta::irrational()] {
            for t in [4, 7] {
                let ex = LevelParams::new(&c, &piece, &s1, &s2, &theta, CoverMode::Exact);
                let ps = LevelParams { mode: CoverMode::ProofSufficient, ..ex };
                let exact = build_cover_level(&ex, t, Threads::Auto).unwrap();
                let suff = build_cover_level(&ps, t, Threads::Auto).unwrap();
                assert!(!exact.is_empty());
                assert!(keys(&exact).is_subset(&keys(&suff)), "t={t}");
                for iv in &exact {
                    assert!(iv.diameter() <= 2.0 * s1.eval(iv.q) / iv.q as f64);
                    assert!((1u64 << t..1u64 << (t + 1)).contains(&iv.q));
                }
                let counted = count_cover_level(&ex, t, Threads::Fixed(3)).unwrap();
                assert_eq!(counted.count, exact.len() as u64);
            }
        }
    }

    #[test]
    fn sufficient_count_matches_direct_level_loop() {
        let (c, piece) = parabola_piece();
        let psi = pow(0.5);
        let theta = Theta::zero();
        let t = 8;
        let params = LevelParams::new(&c, &piece, &psi, &psi, &theta, CoverMode::ProofSufficient);
        let got = build_cover_level(&params, t, Threads::Auto).unwrap();
        // c₃ = 1 + sup|2x| = 3 on [0, 1].
        let mut want = BTreeSet::new();
        for q in 1i64 << t..1i64 << (t + 1) {
            let w = psi.eval(q as u64);
            for p1 in -2..=q + 2 {
                let centre = p1 as f64 / q as f64;
                if centre + w / q as f64 <= 0.0 || centre - w / q as f64 >= 1.0 {
                    continue;
                }
                let anchor = centre.clamp(0.0, 1.0);
                for p2 in -3..=q + 3 {
                    if (q as f64 * anchor * anchor - p2 as f64).abs() < 3.0 * w + DEFAULT_TAU {
                        want.insert((p1, p2, q as u64));
                    }
                }
            }
        }
        assert_eq!(keys(&got), want);
    }

    #[test]
    fn exact_cover_contains_sampled_witnesses() {
        let (c, piece) = parabola_piece();
        let (s1, s2) = (pow(0.8), pow(0.6));
        let theta = Theta::irrational();
        let t = 6;
        let exact = keys(&build_cover_level(&LevelParams::new(&c, &piece, &s1, &s2, &theta, CoverMode::Exact), t, Threads::Auto).unwrap());
        let (f1, f2) = (theta.first.frac(), theta.second.frac());
        for q in 1u64 << t..1u64 << (t + 1) {
            let qf = q as f64;
            let (w1, w2) = (s1.eval(q), s2.eval(q));
            for p1 in -1..=q as i64 + 1 {
                let centre = (p1 as f64 + f1) / qf;
                for k in 1..40 {
                    let x = centre - w1 / qf + 2.0 * w1 / qf * k as f64 / 40.0;
                    if !(0.0..=1.0).contains(&x) {
                        continue;
                    }
                    let y = qf * x * x - f2;
                    let p2 = y.round();
                    if (y - p2).abs() < w2 - 1e-9 {
                        assert!(exact.contains(&(p1, p2 as i64, q)), "missing ({p1},{p2},{q})");
                    }
                }
            }
        }
    }

    #[test]
    fn centres_reproduce_enumeration() {
        let (c, piece) = parabola_piece();
        let (s1, s2) = (pow(0.8), pow(0.6));
        for theta in [Theta::zero(), Theta::irrational(), Theta::parse("1.25,-3/7").unwrap()] {
            for t in [5, 8] {
                let cover = build_cover_level(&LevelParams::new(&c, &piece, &s1, &s2, &theta, CoverMode::Exact), t, Threads::Auto).unwrap();
                let centres: BTreeSet<_> = cover.iter().filter(|i| i.centre_member).map(|i| (i.p1, i.p2, i.q)).collect();
                let mut query = ShiftedQuery::new(c.clone(), (1 << (t + 1)) - 1, Threshold::Scaled(s2.clone()));
                query.window = piece.interval;
                query.lower = LowerMode::Half;
                query.theta = theta.clone();
                let listed: BTreeSet<_> = enumerate_aq(&query).unwrap().points.iter().map(|p| (p.p1, p.p2, p.q)).collect();
                assert!(!listed.is_empty());
                assert_eq!(centres, listed, "theta={theta}, t={t}");
            }
        }
    }

    #[test]
    fn level_counts_track_main_term() {
        let (c, piece) = parabola_piece();
        let (s1, s2) = (pow(0.8), pow(0.6));
        let theta = Theta::zero();
        let params = LevelParams::new(&c, &piece, &s1, &s2, &theta, CoverMode::ProofSufficient);
        let ratios: Vec<f64> = (6..=10)
            .map(|t| {
                let n = count_cover_level(&params, t, Threads::Auto).unwrap().count as f64;
                n / (s2.eval(1 << t) * 4f64.powi(t as i32))
            })
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo < 2.0, "{ratios:?}");
    }

    #[test]
    fn membership_examples() {
        let c = Curve::parabola();
        let psi = pow(0.9);
        let theta = Theta::zero();
        let w = membership_test(1.0 / 3.0, &c, &psi, &psi, &theta, QWindow::new(3, 100).unwrap(), DEFAULT_TAU).unwrap();
        assert_eq!((w.q, w.p1, w.p2), (3, 1, 0));
        assert_eq!(w.residuals.0, 0.0);
        // Small q witness whenever ψ(1) = 1.
        assert_eq!(membership_test(0.123, &c, &psi, &psi, &theta, QWindow::up_to(10).unwrap(), DEFAULT_TAU).unwrap().q, 1);
        // Constructed shift forces a witness at q₀.
        let (x, q0) = (0.2718281828, 977u64);
        let t1 = (q0 as f64 * x).fract() - 1e-7;
        let t2 = (q0 as f64 * x * x).fract() + 1e-7;
        let th = Theta::new(t1, t2).unwrap();
        let w = membership_test(x, &c, &psi, &psi, &th, QWindow::new(q0, q0).unwrap(), DEFAULT_TAU).unwrap();
        assert_eq!(w.q, q0);
        assert!(w.residuals.0 < 1e-6 && w.residuals.1 < 1e-6);
    }

    #[test]
    fn membership_shift_and_monotonicity() {
        let c = parse_curve("cubic").unwrap();
        let theta = Theta::irrational();
        let moved = theta.shifted(4, -9);
        let (small, large) = (pow(1.2), ApproxFn::power_scaled(1.2, 1.5).unwrap());
        let window = QWindow::new(2, 4000).unwrap();
        for x in sample_points(-1.0, 1.0, 300, 11) {
            let a = membership_test(x, &c, &small, &small, &theta, window, DEFAULT_TAU);
            let b = membership_test(x, &c, &small, &small, &moved, window, DEFAULT_TAU);
            assert_eq!(a.map(|w| (w.q, w.residuals)), b.map(|w| (w.q, w.residuals)));
            if let (Some(a), Some(b)) = (a, b) {
                assert_eq!((a.p1 - b.p1, a.p2 - b.p2), (4, -9));
            }
            let big = membership_test(x, &c, &large, &large, &theta, window, DEFAULT_TAU);
            if let Some(a) = a {
                assert!(big.is_some_and(|b| b.q <= a.q));
            }
        }
    }

    #[test]
    fn membership_matches_exact_cover() {
        let (c, piece) = parabola_piece();
        let (s1, s2) = (pow(0.8), pow(0.6));
        let theta = Theta::irrational();
        let t = 6;
        let cover = build_cover_level(&LevelParams::new(&c, &piece, &s1, &s2, &theta, CoverMode::Exact), t, Threads::Auto).unwrap();
        let window = QWindow::new(1 << t, (1 << (t + 1)) - 1).unwrap();
        for k in 0..1000 {
            let x = (k as f64 + 0.5) / 1000.0;
            let inside = cover.iter().find(|iv| {
                let qf = iv.q as f64;
                (x - iv.centre).abs() < iv.half_width
                    && (qf * x * x - theta.second.value() - iv.p2 as f64).abs() < s2.eval(iv.q)
            });
            let w = membership_test(x, &c, &s1, &s2, &theta, window, DEFAULT_TAU);
            assert_eq!(w.is_some(), inside.is_some(), "x={x}");
            if let Some(w) = w {
                assert!(cover.iter().any(|iv| (iv.p1, iv.p2, iv.q) == (w.p1, w.p2, w.q)));
            }
        }
    }

    #[test]
    fn multiplicative_examples() {
        let psi = ApproxFn::power_log(1.0, 3.0, 1.0).unwrap();
        let w = multiplicative_membership(1.0 / 3.0, 0.77, &psi, &Theta::zero(), QWindow::new(3, 3).unwrap(), DEFAULT_TAU).unwrap();
        assert_eq!(w.q, 3);
        let c = Curve::parabola();
        let sim = pow(0.6);
        let sq = pow(1.2);
        for x in sample_points(0.0, 1.0, 200, 5) {
            // Simultaneous with both residuals < √ψ implies multiplicative.
            if let Some(s) = membership_test(x, &c, &sim, &sim, &Theta::zero(), QWindow::new(2, 500).unwrap(), DEFAULT_TAU) {
                let m = multiplicative_membership(x, c.f(x), &sq, &Theta::zero(), QWindow::new(2, 500).unwrap(), DEFAULT_TAU);
                assert!(m.is_some_and(|m| m.q <= s.q));
            }
        }
        let est = multiplicative_fraction(&c, &psi, &Theta::irrational(), QWindow::new(1 << 10, 1 << 11).unwrap(), 2000, 3, Threads::Auto).unwrap();
        // Measure of {‖qx‖·‖qy‖ < ψ} on the unit square is 4ψ(1 + ln(1/4ψ)).
        let moment: f64 = (1u64 << 10..=1 << 11)
            .map(|q| {
                let p = psi.eval(q);
                4.0 * p * (1.0 + (1.0 / (4.0 * p)).ln())
            })
            .sum();
        assert!(est.fraction <= 2.0 * moment, "{} vs {moment}", est.fraction);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let c = Curve::parabola();
        let half = ApproxFn::power_scaled(0.01, 0.6).unwrap();
        let window = QWindow::up_to(4).unwrap();
        let all = lebesgue_fraction(&c, &half, &half, &Theta::zero(), window, 500, 1, Threads::Auto).unwrap();
        assert_eq!(all.fraction, 1.0);
        let psi = pow(0.6);
        let w = QWindow::new(1 << 8, 1 << 9).unwrap();
        let a = lebesgue_fraction(&c, &psi, &psi, &Theta::irrational(), w, 3000, 42, Threads::Fixed(1)).unwrap();
        let b = lebesgue_fraction(&c, &psi, &psi, &Theta::irrational(), w, 3000, 42, Threads::Fixed(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.xs.len(), 3000);
        let other = sample_points(0.0, 1.0, 3000, 43);
        assert_ne!(a.xs, other);
        assert!(a.fraction <= 5.0 * first_moment_bound(&psi, &psi, w));
        assert!(lebesgue_fraction(&c, &psi, &psi, &Theta::zero(), w, 0, 1, Threads::Auto).is_err());
    }

    #[test]
    fn slope_recovers_exact_exponent() {
        let (vmin, vmax) = (0.6, 0.8);
        let counts: Vec<(u32, f64)> = (6..=13).map(|t| (t, 2f64.powf(t as f64 * (2.0 - vmin)))).collect();
        let s = slope_dimension_estimate(&counts, vmax, DEFAULT_BURN_IN).unwrap();
        assert!((s.slope - (2.0 - vmin) / (1.0 + vmax)).abs() < 1e-12);
        assert!(s.stderr < 1e-10);
        assert_eq!(s.levels_used, vec![8, 9, 10, 11, 12, 13]);
        let mut holes = counts.clone();
        holes[4].1 = 0.0;
        let s = slope_dimension_estimate(&holes, vmax, DEFAULT_BURN_IN).unwrap();
        assert_eq!(s.zero_levels, vec![10]);
        assert!(slope_dimension_estimate(&counts[..4], vmax, 0).is_err());
    }

    #[test]
    fn hausdorff_tails_shrink() {
        let (c, piece) = parabola_piece();
        let pieces = [piece];
        let (s1, s2) = (pow(0.6), pow(0.8));
        let theta = Theta::zero();
        let h = DimensionFn::power(0.9).unwrap();
        let input = HausdorffInput {
            curve: &c,
            pieces: &pieces,
            psi1: &s1,
            psi2: &s2,
            theta: &theta,
            h: &h,
            first_level: 3,
            last_level: 8,
            mode: CoverMode::Exact,
            threads: Threads::Auto,
        };
        let est = hausdorff_upper_estimate(&input).unwrap();
        assert!(est.tails.windows(2).all(|w| w[1].1 < w[0].1));
        let total: f64 = est.levels.iter().map(|l| l.contribution).sum();
        assert!((est.tail(3).unwrap() - total).abs() < 1e-12 * total);
        let id = DimensionFn::identity();
        assert!(hausdorff_upper_estimate(&HausdorffInput { h: &id, ..input.clone() }).is_err());
        assert!(hausdorff_upper_estimate(&HausdorffInput { first_level: 9, ..input }).is_err());
    }
}
