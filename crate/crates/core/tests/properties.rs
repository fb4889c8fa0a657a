use curvapprox_core::curves::{parse_curve, Curve};
use curvapprox_core::funcs::{ApproxFn, DimensionFn};
use curvapprox_core::resonant::{
    brute_force_oracle, count_n, enumerate_aq, LowerMode, ShiftedQuery, Theta, Threshold, TolerancePolicy,
};
use curvapprox_core::series::{classify_curve_hausdorff, classify_weighted_hausdorff, dimension_s0, SeriesConfig, Verdict};
use curvapprox_core::{Interval, Threads};
use proptest::prelude::*;

const STRICT: TolerancePolicy = TolerancePolicy::StrictFloat(1e-12);

fn curve_strategy() -> impl Strategy<Value = Curve> {
    prop_oneof![
        Just(parse_curve("parabola").unwrap()),
        Just(parse_curve("cubic interval=[0.1,1]").unwrap()),
        Just(parse_curve("cubic interval=[-1,-0.1]").unwrap()),
        Just(parse_curve("poly(0.25,0.375,-2.25,1)").unwrap()),
    ]
}

fn theta_strategy() -> impl Strategy<Value = Theta> {
    prop_oneof![
        Just(Theta::zero()),
        Just(Theta::irrational()),
        (1i64..7, 2i64..9, 0i64..9, 2i64..9).prop_map(|(a, b, c, d)| Theta::parse(&format!("{a}/{b},{c}/{d}")).unwrap()),
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Theta::new(a, b).unwrap()),
    ]
}

fn sub_interval(curve: &Curve, a: f64, b: f64) -> Interval {
    let i = curve.interval();
    let (lo, hi) = (a.min(b), a.max(b));
    Interval::new(i.lo + lo * i.len(), i.lo + hi * i.len()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn fast_count_matches_oracle(
        curve in curve_strategy(),
        theta in theta_strategy(),
        q in 1u64..=96,
        delta in 0.001f64..0.49,
        a in 0.0f64..1.0,
        b in 0.0f64..1.0,
    ) {
        let j = sub_interval(&curve, a, b);
        let fast = count_n(&curve, j, q, delta, &theta, STRICT, Threads::Fixed(2)).unwrap();
        let slow = brute_force_oracle(&curve, j, q, delta, &theta, STRICT).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn integer_shift_leaves_counts_unchanged(
        curve in curve_strategy(),
        theta in theta_strategy(),
        m in -5i64..5,
        n in -5i64..5,
        q in 1u64..=128,
        delta in 0.001f64..0.49,
    ) {
        let i = curve.interval();
        let base = count_n(&curve, i, q, delta, &theta, STRICT, Threads::Fixed(1)).unwrap();
        let shifted = count_n(&curve, i, q, delta, &theta.shifted(m, n), STRICT, Threads::Fixed(1)).unwrap();
        prop_assert_eq!(base, shifted);
    }

    #[test]
    fn counts_grow_with_q_delta_and_window(
        curve in curve_strategy(),
        theta in theta_strategy(),
        q in 1u64..=96,
        extra in 0u64..32,
        d1 in 0.001f64..0.49,
        d2 in 0.001f64..0.49,
        a in 0.0f64..0.5,
        b in 0.5f64..1.0,
    ) {
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let whole = curve.interval();
        let part = sub_interval(&curve, a, b);
        let n = |q, d, j| count_n(&curve, j, q, d, &theta, STRICT, Threads::Fixed(1)).unwrap();
        prop_assert!(n(q, lo, whole) <= n(q + extra, lo, whole));
        prop_assert!(n(q, lo, whole) <= n(q, hi, whole));
        prop_assert!(n(q, lo, part) <= n(q, lo, whole));
    }

    #[test]
    fn enumeration_independent_of_threads(
        curve in curve_strategy(),
        theta in theta_strategy(),
        q in 1u64..=160,
        delta in 0.01f64..0.49,
        half in any::<bool>(),
    ) {
        let mut query = ShiftedQuery::new(curve, q, Threshold::PerQ(delta));
        query.theta = theta;
        query.lower = if half { LowerMode::Half } else { LowerMode::All };
        query.threads = Threads::Fixed(1);
        let one = enumerate_aq(&query).unwrap();
        query.threads = Threads::Fixed(5);
        let five = enumerate_aq(&query).unwrap();
        prop_assert_eq!(one, five);
    }

    #[test]
    fn exact_policy_agrees_with_exact_oracle(
        theta in (0i64..5, 1i64..6, 0i64..5, 1i64..6).prop_map(|(a, b, c, d)| Theta::parse(&format!("{a}/{b},{c}/{d}")).unwrap()),
        q in 1u64..=64,
        delta_num in 1u32..49,
    ) {
        let curve = parse_curve("parabola").unwrap();
        let delta = f64::from(delta_num) / 100.0;
        let i = curve.interval();
        let fast = count_n(&curve, i, q, delta, &theta, TolerancePolicy::ExactRational, Threads::Fixed(1)).unwrap();
        let slow = brute_force_oracle(&curve, i, q, delta, &theta, TolerancePolicy::ExactRational).unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn weighted_verdict_symmetric_and_consistent(v1 in 0.05f64..0.95, v2 in 0.05f64..0.95, s in 0.05f64..1.0) {
        let cfg = SeriesConfig::default();
        let (p1, p2) = (ApproxFn::power(v1).unwrap(), ApproxFn::power(v2).unwrap());
        let h = DimensionFn::power(s).unwrap();
        let a = classify_weighted_hausdorff(&p1, &p2, &h, &cfg).verdict;
        let b = classify_weighted_hausdorff(&p2, &p1, &h, &cfg).verdict;
        prop_assert_eq!(a, b);
        let s0 = dimension_s0(v1, v2).unwrap().s0;
        prop_assert_eq!(dimension_s0(v2, v1).unwrap().s0, s0);
        if (s - s0).abs() > 1e-9 {
            prop_assert_eq!(a == Verdict::Converges, s > s0);
        }
        if s > 0.5 && (s - (2.0 - v1) / (1.0 + v1)).abs() > 1e-9 {
            let same = classify_weighted_hausdorff(&p1, &p1, &h, &cfg).verdict;
            prop_assert_eq!(same, classify_curve_hausdorff(&p1, s, &cfg).unwrap().verdict);
        }
    }

    #[test]
    fn faster_decay_preserves_convergence(v in 0.05f64..0.9, dv in 0.0f64..0.5, w in 0.05f64..0.95, s in 0.05f64..1.0) {
        let cfg = SeriesConfig::default();
        let h = DimensionFn::power(s).unwrap();
        let other = ApproxFn::power(w).unwrap();
        let big = classify_weighted_hausdorff(&ApproxFn::power(v).unwrap(), &other, &h, &cfg);
        let small = classify_weighted_hausdorff(&ApproxFn::power(v + dv).unwrap(), &other, &h, &cfg);
        if big.converges() {
            prop_assert!(small.converges());
        }
    }
}
