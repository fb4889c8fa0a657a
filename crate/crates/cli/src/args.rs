use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const SUBCOMMANDS: [&str; 8] = ["series", "count", "ubiquity", "cover", "dimension", "lebesgue", "member", "mult"];

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "curvapprox", version, about = "Numerical experiments in weighted inhomogeneous Diophantine approximation on planar curves")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalOpts {
    /// JSON object of flag values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for CSV/JSON results and manifest.json. Without it the main
    /// table goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Fill timing columns (makes those columns run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Convergence verdict for a series criterion.
    #[command(args_override_self = true)]
    Series(SeriesArgs),
    /// Count shifted rational points near a curve.
    #[command(args_override_self = true)]
    Count(CountArgs),
    /// Empirical local-ubiquity coverage.
    #[command(args_override_self = true)]
    Ubiquity(UbiquityArgs),
    /// Dyadic covers and h-measure upper estimates.
    #[command(args_override_self = true)]
    Cover(CoverArgs),
    /// Slope estimate of the dimension from cover counts.
    #[command(args_override_self = true)]
    Dimension(DimensionArgs),
    /// Monte Carlo estimate of the simultaneously approximable fraction.
    #[command(args_override_self = true)]
    Lebesgue(LebesgueArgs),
    /// Membership witnesses for given points of the curve.
    #[command(args_override_self = true)]
    Member(MemberArgs),
    /// Multiplicative approximation: point witnesses or Monte Carlo fraction.
    #[command(args_override_self = true)]
    Mult(MultArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Series(_) => "series",
            Command::Count(_) => "count",
            Command::Ubiquity(_) => "ubiquity",
            Command::Cover(_) => "cover",
            Command::Dimension(_) => "dimension",
            Command::Lebesgue(_) => "lebesgue",
            Command::Member(_) => "member",
            Command::Mult(_) => "mult",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurveOpts {
    /// parabola, cubic, poly(c0,c1,..), circle, exp or sin.
    #[arg(long, default_value = "parabola")]
    pub curve: String,
    /// Domain `a,b` of the curve; defaults to the family's interval.
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShiftOpts {
    /// Shift `t1,t2`; decimals, fractions a/b and sqrt(n)±k are accepted.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub theta: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    Strict,
    Exact,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PolicyOpts {
    #[arg(long, value_enum, default_value_t = PolicyName::Strict)]
    pub policy: PolicyName,
    /// Slack for strict inequalities under the strict policy.
    #[arg(long, default_value_t = 1e-12)]
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    /// Weighted h-measure on the curve (ψ₁, ψ₂, h).
    T04,
    /// Lebesgue measure of the simultaneous set (ψ₁, ψ₂).
    T02,
    /// Khintchine–Jarník in the plane (ψ, s).
    Kj,
    /// s-measure on the curve (ψ, s).
    Curve,
    /// Multiplicative s-measure (ψ, s).
    Mult,
    /// Multiplicative Lebesgue measure (ψ).
    Gallagher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EtaPolicyName {
    Warn,
    Enforce,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeriesArgs {
    #[arg(long, value_enum)]
    pub criterion: Criterion,
    #[arg(long)]
    pub psi1: Option<String>,
    #[arg(long)]
    pub psi2: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    /// Dimension function, e.g. `pow(s=0.9)`.
    #[arg(long)]
    pub h: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[arg(long, default_value_t = 0.9)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = EtaPolicyName::Warn)]
    pub eta_policy: EtaPolicyName,
    /// Dyadic levels for diagnostics and the condensation heuristic.
    #[arg(long, default_value_t = 40)]
    pub levels: u32,
    /// Trailing blocks inspected by the heuristic.
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[arg(long, default_value_t = 0.9)]
    pub converge_ratio: f64,
    /// Also write the checkpoint partial sums as CSV.
    #[arg(long)]
    pub diagnostics: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// 1 ≤ q ≤ Q.
    All,
    /// Q/2 < q ≤ Q.
    Half,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    /// `256`, `64,128` or a sweep `2^8..2^14`.
    #[arg(long = "Q", default_value = "256")]
    pub q: String,
    /// Constant or `pow(Q,-0.5)`, optionally `k*pow(Q,e)`.
    #[arg(long, default_value = "0.1", allow_hyphen_values = true)]
    pub delta: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[arg(long, value_enum, default_value_t = CountMode::All)]
    pub mode: CountMode,
    #[command(flatten)]
    pub policy: PolicyOpts,
    /// Also run the brute-force reference count (Q ≤ 512).
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct UbiquityArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    /// Window J; defaults to the curve's interval.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, default_value = "pow(v=0.5)")]
    pub psi: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[arg(long = "Q", default_value = "2^8..2^13")]
    pub q: String,
    #[arg(long, default_value = "2^0..2^8")]
    pub c_grid: String,
    #[command(flatten)]
    pub policy: PolicyOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    #[arg(long, default_value = "pow(v=0.6)")]
    pub psi1: String,
    #[arg(long, default_value = "pow(v=0.8)")]
    pub psi2: String,
    #[arg(long, default_value = "pow(s=0.9)")]
    pub h: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    /// Level range `l..L`.
    #[arg(long, default_value = "6..13")]
    pub levels: String,
    /// Radius excised around zeros of f″; defaults to 5% of the interval.
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub eta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DimensionArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    #[arg(long, default_value = "pow(v=0.8)")]
    pub psi1: String,
    #[arg(long, default_value = "pow(v=0.6)")]
    pub psi2: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[arg(long, default_value = "6..13")]
    pub levels: String,
    /// Lowest levels dropped from the fit.
    #[arg(long, default_value_t = 2)]
    pub burn_in: usize,
    /// Largest decay exponent; read from power-law inputs when omitted.
    #[arg(long)]
    pub v_max: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub eta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SamplingOpts {
    /// Denominator window `lo..hi`.
    #[arg(long, default_value = "1..2^13")]
    pub window: String,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LebesgueArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    #[arg(long, default_value = "pow(v=0.5)")]
    pub psi1: String,
    #[arg(long, default_value = "pow(v=0.5)")]
    pub psi2: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[command(flatten)]
    pub sampling: SamplingOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MemberArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    /// Abscissae to test, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "pow(v=0.5)")]
    pub psi1: String,
    #[arg(long, default_value = "pow(v=0.5)")]
    pub psi2: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[arg(long, default_value = "1..1024")]
    pub window: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tau: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MultArgs {
    #[command(flatten)]
    pub curve: CurveOpts,
    #[arg(long, default_value = "pow(v=1)")]
    pub psi: String,
    #[command(flatten)]
    pub shift: ShiftOpts,
    #[command(flatten)]
    pub sampling: SamplingOpts,
    /// Test these abscissae instead of sampling.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tau: f64,
}
