//! One function per subcommand. Each parses and validates all of its inputs
//! before computing anything and returns a [`Report`].

use std::time::Instant;

use curvapprox_core::curves::{decompose_nondegenerate, default_margin, parse_curve, select_xi, Curve, Decomposition};
use curvapprox_core::funcs::{parse_approx, parse_dimension, reduce_min_max, ApproxFn};
use curvapprox_core::limsup::{
    count_cover_level, first_moment_bound, hausdorff_upper_estimate, lebesgue_fraction, membership_test,
    multiplicative_fraction, multiplicative_membership, slope_dimension_estimate, CoverMode, HausdorffInput,
    LevelParams, MonteCarloEstimate, QWindow,
};
use curvapprox_core::resonant::{
    brute_force_oracle, count_n, enumerate_aq, LowerMode, ShiftedQuery, Theta, Threshold, TolerancePolicy, ORACLE_MAX_Q,
};
use curvapprox_core::series::{
    classify_curve_hausdorff, classify_kj, classify_lebesgue, classify_multiplicative, dimension_s0, EtaPolicy,
    SeriesConfig, SeriesVerdict, WeightedProblem,
};
use curvapprox_core::ubiquity::{verify_local_ubiquity, UbiquityRun};
use curvapprox_core::{Interval, Threads};
use serde_json::{json, Value};

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Report, Table};
use crate::parse::*;

pub struct Context {
    pub threads: Threads,
    pub timing: bool,
}

fn curve_of(opts: &CurveOpts) -> CliResult<Curve> {
    let curve = parse_curve(&opts.curve)?;
    match &opts.interval {
        Some(text) => Ok(curve.on(parse_interval(text)?)?),
        None => Ok(curve),
    }
}

fn policy_of(opts: &PolicyOpts) -> CliResult<TolerancePolicy> {
    match opts.policy {
        PolicyName::Exact => Ok(TolerancePolicy::ExactRational),
        PolicyName::Strict if opts.tau.is_finite() && opts.tau >= 0.0 => Ok(TolerancePolicy::StrictFloat(opts.tau)),
        PolicyName::Strict => Err(CliError::Validation(format!("tau must be nonnegative, got {}", opts.tau))),
    }
}

fn require<'a>(v: &'a Option<String>, flag: &str, criterion: &str) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| CliError::Config(format!("criterion {criterion} needs --{flag}")))
}

fn require_s(s: Option<f64>, criterion: &str) -> CliResult<f64> {
    s.ok_or_else(|| CliError::Config(format!("criterion {criterion} needs --s")))
}

fn s0_of(psi1: &ApproxFn, psi2: &ApproxFn) -> Option<f64> {
    let (v1, v2) = (psi1.power_exponent()?, psi2.power_exponent()?);
    dimension_s0(v1, v2).ok().map(|c| c.s0)
}

fn decomposition(curve: &Curve, margin: Option<f64>, eta: f64) -> CliResult<(Decomposition, f64, f64)> {
    let margin = margin.unwrap_or_else(|| default_margin(curve));
    if !(margin.is_finite() && margin >= 0.0) {
        return Err(CliError::Validation(format!("margin must be nonnegative, got {margin}")));
    }
    let xi = select_xi(eta)?;
    Ok((decompose_nondegenerate(curve, margin, xi)?, margin, xi))
}

pub fn series(a: &SeriesArgs) -> CliResult<Report> {
    let cfg = SeriesConfig { levels: a.levels, window: a.window, converge_ratio: a.converge_ratio };
    if cfg.window == 0 || !(cfg.converge_ratio > 0.0 && cfg.converge_ratio < 1.0) {
        return Err(CliError::Validation("window must be positive and converge-ratio in (0,1)".into()));
    }
    let name = format!("{:?}", a.criterion).to_lowercase();
    let mut summary = json!({ "criterion": name });
    let verdict: SeriesVerdict = match a.criterion {
        Criterion::T04 => {
            let psi1 = parse_approx(require(&a.psi1, "psi1", &name)?)?;
            let psi2 = parse_approx(require(&a.psi2, "psi2", &name)?)?;
            let h = parse_dimension(require(&a.h, "h", &name)?)?;
            let theta = Theta::parse(&a.shift.theta)?;
            let policy = match a.eta_policy {
                EtaPolicyName::Warn => EtaPolicy::Warn,
                EtaPolicyName::Enforce => EtaPolicy::Enforce,
            };
            summary["s0"] = json!(s0_of(&psi1, &psi2));
            WeightedProblem::new(psi1, psi2, h, theta.values(), a.eta, policy)?.classify(&cfg)
        }
        Criterion::T02 => {
            let psi1 = parse_approx(require(&a.psi1, "psi1", &name)?)?;
            let psi2 = parse_approx(require(&a.psi2, "psi2", &name)?)?;
            classify_lebesgue(&psi1, &psi2, &cfg)
        }
        Criterion::Kj => classify_kj(&parse_approx(require(&a.psi, "psi", &name)?)?, require_s(a.s, &name)?, &cfg)?,
        Criterion::Curve => {
            classify_curve_hausdorff(&parse_approx(require(&a.psi, "psi", &name)?)?, require_s(a.s, &name)?, &cfg)?
        }
        Criterion::Mult => {
            classify_multiplicative(&parse_approx(require(&a.psi, "psi", &name)?)?, require_s(a.s, &name)?, &cfg)?
        }
        Criterion::Gallagher => classify_multiplicative(&parse_approx(require(&a.psi, "psi", &name)?)?, 1.0, &cfg)?,
    };
    summary["verdict"] = json!(verdict.verdict);
    summary["method"] = json!(verdict.method);
    summary["growth"] = json!(verdict.growth);
    summary["reason"] = json!(verdict.reason);
    let mut line = format!("{name}: {:?} ({:?})", verdict.verdict, verdict.method);
    match (&verdict.reason, verdict.growth) {
        (Some(r), _) => line.push_str(&format!(": {r}")),
        (None, Some(g)) => line.push_str(&format!(": term ≍ q^{} (log q)^{}", g.power, g.log_power)),
        (None, None) => {}
    }
    let mut tables = Vec::new();
    if a.diagnostics {
        let mut t = Table::new("series", &["t", "partial_sum"]);
        for c in &verdict.diagnostics {
            t.push(vec![c.t.into(), c.partial_sum.into()]);
        }
        tables.push(t);
    }
    Ok(Report { tables, primary: None, summary, lines: vec![line], warnings: verdict.warnings, seed: None })
}

pub fn count(a: &CountArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let interval = curve.interval();
    let qs = parse_q_list(&a.q)?;
    let delta = DeltaExpr::parse(&a.delta)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let policy = policy_of(&a.policy)?;
    let deltas: Vec<f64> = qs.iter().map(|&q| delta.eval(q)).collect();
    if let Some((q, d)) = qs.iter().zip(&deltas).find(|(_, d)| !(**d > 0.0 && **d < 0.5)) {
        return Err(CliError::Validation(format!("delta({q}) = {d} is outside (0, 1/2)")));
    }
    if a.oracle {
        if a.mode != CountMode::All {
            return Err(CliError::Validation("--oracle counts over all q ≤ Q; use --mode all".into()));
        }
        if let Some(&q) = qs.iter().find(|&&q| q > ORACLE_MAX_Q) {
            return Err(CliError::Guard(format!("oracle limited to Q ≤ {ORACLE_MAX_Q}, got Q = {q}")));
        }
    }
    let mut headers = vec!["Q", "delta", "count", "count_over_deltaQ2", "seconds"];
    if a.oracle {
        headers.push("oracle_count");
    }
    let mut table = Table::new("count", &headers);
    let mut lines = Vec::new();
    let mut warnings = Vec::new();
    for (&q, &d) in qs.iter().zip(&deltas) {
        let start = Instant::now();
        let n = match a.mode {
            CountMode::All => count_n(&curve, interval, q, d, &theta, policy, ctx.threads)?,
            CountMode::Half => {
                let query = ShiftedQuery {
                    curve: curve.clone(),
                    window: interval,
                    q_max: q,
                    lower: LowerMode::Half,
                    threshold: Threshold::PerQ(d),
                    theta: theta.clone(),
                    policy,
                    threads: ctx.threads,
                };
                let e = enumerate_aq(&query)?;
                warnings.extend(e.warnings);
                e.points.len() as u64
            }
        };
        let seconds = start.elapsed().as_secs_f64();
        let qf = q as f64;
        let mut row: Vec<Cell> =
            vec![q.into(), d.into(), n.into(), (n as f64 / (d * qf * qf)).into(), ctx.timing.then_some(seconds).into()];
        let mut line = format!("Q={q} delta={d} count={n}");
        if a.oracle {
            let o = brute_force_oracle(&curve, interval, q, d, &theta, policy)?;
            if o != n {
                warnings.push(format!("Q={q}: count {n} differs from oracle {o}"));
            }
            line.push_str(&format!(" oracle={o}"));
            row.push(o.into());
        }
        table.push(row);
        lines.push(line);
    }
    Ok(Report { tables: vec![table], primary: Some(0), summary: Value::Null, lines, warnings, seed: None })
}

pub fn ubiquity(a: &UbiquityArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let window = match &a.window {
        Some(w) => parse_interval(w)?,
        None => curve.interval(),
    };
    let run = UbiquityRun {
        window,
        psi: parse_approx(&a.psi)?,
        theta: Theta::parse(&a.shift.theta)?,
        q_values: parse_q_list(&a.q)?,
        c_grid: parse_grid(&a.c_grid)?,
        policy: policy_of(&a.policy)?,
        threads: ctx.threads,
        curve,
    };
    let outcome = verify_local_ubiquity(&run)?;
    let mut table = Table::new("ubiquity", &["Q", "C", "fraction", "minimal_C_flag", "points_used"]);
    for r in &outcome.reports {
        table.push(vec![r.q_max.into(), r.c.into(), r.fraction.into(), r.minimal_c.into(), r.points.into()]);
    }
    let minimal = outcome.minimal_c_series();
    let found: Vec<f64> = minimal.iter().filter_map(|m| m.1).collect();
    let band = (found.len() == minimal.len() && !found.is_empty())
        .then(|| found.iter().copied().fold(0.0, f64::max) / found.iter().copied().fold(f64::INFINITY, f64::min));
    let lines = minimal
        .iter()
        .map(|(q, c)| match c {
            Some(c) => format!("Q={q} minimal C={c}"),
            None => format!("Q={q} no grid C reaches fraction 1/2"),
        })
        .collect();
    let summary = json!({
        "minimal_c": minimal.iter().map(|(q, c)| json!({ "Q": q, "C": c })).collect::<Vec<_>>(),
        "minimal_c_ratio": band,
    });
    Ok(Report { tables: vec![table], primary: Some(0), summary, lines, warnings: outcome.warnings, seed: None })
}

pub fn cover(a: &CoverArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let psi1 = parse_approx(&a.psi1)?;
    let psi2 = parse_approx(&a.psi2)?;
    let h = parse_dimension(&a.h)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let (l, big_l) = parse_levels(&a.levels)?;
    let (decomp, margin, xi) = decomposition(&curve, a.margin, a.eta)?;
    let problem = WeightedProblem::new(psi1.clone(), psi2.clone(), h.clone(), theta.values(), a.eta, EtaPolicy::Warn)?;
    let input = HausdorffInput {
        curve: &curve,
        pieces: &decomp.pieces,
        psi1: &psi1,
        psi2: &psi2,
        theta: &theta,
        h: &h,
        first_level: l,
        last_level: big_l,
        mode: CoverMode::Exact,
        threads: ctx.threads,
    };
    let exact = hausdorff_upper_estimate(&input)?;
    let sufficient = hausdorff_upper_estimate(&HausdorffInput { mode: CoverMode::ProofSufficient, ..input })?;
    let mut table = Table::new("cover", &["t", "count_exact", "count_sufficient", "h_contrib"]);
    for (e, s) in exact.levels.iter().zip(&sufficient.levels) {
        table.push(vec![
            e.t.into(),
            (e.count_min_max + e.count_max_min).into(),
            (s.count_min_max + s.count_max_min).into(),
            e.contribution.into(),
        ]);
    }
    let lines = exact.tails.iter().map(|(t, v)| format!("tail l={t}: {v}")).collect();
    let summary = json!({
        "s0": s0_of(&psi1, &psi2),
        "margin": margin,
        "xi": xi,
        "pieces": decomp.pieces,
        "excluded_measure": decomp.excluded_measure,
        "exact": exact,
        "sufficient": sufficient,
    });
    Ok(Report { tables: vec![table], primary: Some(0), summary, lines, warnings: problem.warnings, seed: None })
}

pub fn dimension(a: &DimensionArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let psi1 = parse_approx(&a.psi1)?;
    let psi2 = parse_approx(&a.psi2)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let (l, big_l) = parse_levels(&a.levels)?;
    let v_max = match a.v_max {
        Some(v) => v,
        None => match (psi1.power_exponent(), psi2.power_exponent()) {
            (Some(v1), Some(v2)) => v1.max(v2),
            _ => return Err(CliError::Config("--v-max is required unless both functions are power laws".into())),
        },
    };
    let (decomp, _, _) = decomposition(&curve, a.margin, a.eta)?;
    let (small, large) = reduce_min_max(&psi1, &psi2);
    let mut counts = Vec::new();
    for t in l..=big_l {
        let mut n = 0;
        for piece in &decomp.pieces {
            let params = LevelParams::new(&curve, piece, &small, &large, &theta, CoverMode::Exact);
            n += count_cover_level(&params, t, ctx.threads)?.count;
        }
        counts.push((t, n));
    }
    let fit_input: Vec<(u32, f64)> = counts.iter().map(|&(t, n)| (t, n as f64)).collect();
    let fit = slope_dimension_estimate(&fit_input, v_max, a.burn_in)?;
    let mut table = Table::new("dimension", &["t", "count", "used"]);
    for &(t, n) in &counts {
        table.push(vec![t.into(), n.into(), fit.levels_used.contains(&t).into()]);
    }
    let s0 = s0_of(&psi1, &psi2);
    let mut line = format!("slope={} band=[{}, {}]", fit.slope, fit.band.0, fit.band.1);
    if let Some(s0) = s0 {
        line.push_str(&format!(" s0={s0}"));
    }
    let summary = json!({ "fit": fit, "v_max": v_max, "s0": s0 });
    Ok(Report { tables: vec![table], primary: Some(0), summary, lines: vec![line], warnings: vec![], seed: None })
}

fn q_window(text: &str) -> CliResult<QWindow> {
    let (lo, hi) = parse_q_window(text)?;
    Ok(QWindow::new(lo, hi)?)
}

fn check_points(curve: &Curve, xs: &[f64]) -> CliResult<()> {
    let i: Interval = curve.interval();
    match xs.iter().find(|x| !i.contains(**x)) {
        Some(x) => Err(CliError::Validation(format!("x = {x} lies outside the curve interval {i}"))),
        None => Ok(()),
    }
}

fn check_tau(tau: f64) -> CliResult<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("tau must be nonnegative, got {tau}")))
    }
}

fn monte_carlo_report(name: &str, est: &MonteCarloEstimate, moment: Option<f64>) -> Report {
    let mut table = Table::new(name, &["samples", "window_lo", "window_hi", "fraction", "seed"]);
    table.push(vec![est.samples.into(), est.window.lo.into(), est.window.hi.into(), est.fraction.into(), est.seed.into()]);
    let mut samples = Table::new(&format!("{name}_samples"), &["index", "x", "witness_q"]);
    for (k, (x, w)) in est.xs.iter().zip(&est.witnesses).enumerate() {
        samples.push(vec![k.into(), (*x).into(), (*w).into()]);
    }
    let line = format!(
        "fraction={} ({} of {} samples, q in [{}, {}], seed {})",
        est.fraction, est.hits, est.samples, est.window.lo, est.window.hi, est.seed
    );
    let summary = json!({ "hits": est.hits, "fraction": est.fraction, "first_moment_bound": moment });
    Report { tables: vec![table, samples], primary: Some(0), summary, lines: vec![line], warnings: vec![], seed: Some(est.seed) }
}

pub fn lebesgue(a: &LebesgueArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let psi1 = parse_approx(&a.psi1)?;
    let psi2 = parse_approx(&a.psi2)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let window = q_window(&a.sampling.window)?;
    let est = lebesgue_fraction(&curve, &psi1, &psi2, &theta, window, a.sampling.samples, a.sampling.seed, ctx.threads)?;
    Ok(monte_carlo_report("lebesgue", &est, Some(first_moment_bound(&psi1, &psi2, window))))
}

pub fn member(a: &MemberArgs) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let xs = parse_reals(&a.x)?;
    let psi1 = parse_approx(&a.psi1)?;
    let psi2 = parse_approx(&a.psi2)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let window = q_window(&a.window)?;
    check_points(&curve, &xs)?;
    check_tau(a.tau)?;
    let mut table = Table::new("member", &["x", "q", "p1", "p2", "residual1", "residual2"]);
    let mut lines = Vec::new();
    for &x in &xs {
        match membership_test(x, &curve, &psi1, &psi2, &theta, window, a.tau) {
            Some(w) => {
                table.push(vec![x.into(), w.q.into(), w.p1.into(), w.p2.into(), w.residuals.0.into(), w.residuals.1.into()]);
                lines.push(format!("x={x}: witness q={} p=({}, {})", w.q, w.p1, w.p2));
            }
            None => {
                table.push(vec![x.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                lines.push(format!("x={x}: no witness in [{}, {}]", window.lo, window.hi));
            }
        }
    }
    Ok(Report { tables: vec![table], primary: Some(0), summary: Value::Null, lines, warnings: vec![], seed: None })
}

pub fn mult(a: &MultArgs, ctx: &Context) -> CliResult<Report> {
    let curve = curve_of(&a.curve)?;
    let psi = parse_approx(&a.psi)?;
    let theta = Theta::parse(&a.shift.theta)?;
    let window = q_window(&a.sampling.window)?;
    check_tau(a.tau)?;
    let Some(text) = &a.x else {
        let est = multiplicative_fraction(&curve, &psi, &theta, window, a.sampling.samples, a.sampling.seed, ctx.threads)?;
        return Ok(monte_carlo_report("mult", &est, None));
    };
    let xs = parse_reals(text)?;
    check_points(&curve, &xs)?;
    let mut table = Table::new("mult", &["x1", "x2", "q", "residual1", "residual2"]);
    let mut lines = Vec::new();
    for &x in &xs {
        let y = curve.f(x);
        match multiplicative_membership(x, y, &psi, &theta, window, a.tau) {
            Some(w) => {
                table.push(vec![x.into(), y.into(), w.q.into(), w.residuals.0.into(), w.residuals.1.into()]);
                lines.push(format!("x={x}: witness q={}", w.q));
            }
            None => {
                table.push(vec![x.into(), y.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
                lines.push(format!("x={x}: no witness in [{}, {}]", window.lo, window.hi));
            }
        }
    }
    Ok(Report { tables: vec![table], primary: Some(0), summary: Value::Null, lines, warnings: vec![], seed: None })
}
