//! Experiment driver for `curvapprox-core`.
//!
//! Every subcommand validates its whole configuration first, computes in
//! memory, and only then writes `<table>.csv`, the JSON mirrors and
//! `manifest.json` to `--out`. Outputs other than the manifest do not depend
//! on the thread count.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parse;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use curvapprox_core::limsup::{BATCH, DEFAULT_BURN_IN};
use curvapprox_core::resonant::{DEFAULT_TAU, ORACLE_MAX_Q};
use curvapprox_core::series::SeriesConfig;
use curvapprox_core::ubiquity::default_c_grid;
use curvapprox_core::Threads;

pub use args::Cli;
use args::{Command, Format};
pub use error::{CliError, CliResult};
use output::{OutputRecord, Report};

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    /// Files written, manifest last; empty without `--out`.
    pub files: Vec<PathBuf>,
    /// Text destined for stdout.
    pub stdout: String,
}

/// Library constants that shape results without appearing as flags.
fn fixed_defaults() -> Value {
    let series = SeriesConfig::default();
    json!({
        "tau": DEFAULT_TAU,
        "oracle_max_q": ORACLE_MAX_Q,
        "c_grid": default_c_grid(),
        "slope_burn_in": DEFAULT_BURN_IN,
        "margin_fraction_of_interval": 0.05,
        "monte_carlo_batch": BATCH,
        "monte_carlo_generator": "ChaCha8, stream k for batch k",
        "series_levels": series.levels,
        "series_window": series.window,
        "series_converge_ratio": series.converge_ratio,
    })
}

fn dispatch(cli: &Cli, ctx: &commands::Context) -> CliResult<Report> {
    match &cli.command {
        Command::Series(a) => commands::series(a),
        Command::Count(a) => commands::count(a, ctx),
        Command::Ubiquity(a) => commands::ubiquity(a, ctx),
        Command::Cover(a) => commands::cover(a, ctx),
        Command::Dimension(a) => commands::dimension(a, ctx),
        Command::Lebesgue(a) => commands::lebesgue(a, ctx),
        Command::Member(a) => commands::member(a),
        Command::Mult(a) => commands::mult(a, ctx),
    }
}

fn stdout_text(cli: &Cli, report: &Report) -> CliResult<String> {
    let table = if cli.global.out.is_none() { report.primary.map(|i| &report.tables[i]) } else { None };
    Ok(match table {
        Some(t) if cli.global.format == Format::Json => {
            serde_json::to_string_pretty(&t.to_json()).map_err(|e| CliError::Io(e.to_string()))? + "\n"
        }
        Some(t) => String::from_utf8(t.to_csv()?).map_err(|e| CliError::Io(e.to_string()))?,
        None => report.lines.iter().map(|l| format!("{l}\n")).collect(),
    })
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CliResult<RunOutcome> {
    let start = Instant::now();
    let threads = if cli.global.threads == 0 { Threads::Auto } else { Threads::Fixed(cli.global.threads) };
    let ctx = commands::Context { threads, timing: cli.global.timing };
    let report = dispatch(cli, &ctx)?;
    let stdout = stdout_text(cli, &report)?;
    let files = match &cli.global.out {
        None => Vec::new(),
        Some(dir) => output::write_outputs(dir, cli.global.format, &report, |outputs: &[OutputRecord]| {
            json!({
                "tool": "curvapprox",
                "version": env!("CARGO_PKG_VERSION"),
                "core_version": curvapprox_core::VERSION,
                "subcommand": cli.command.name(),
                "config_file": cli.global.config,
                "arguments": cli,
                "defaults": fixed_defaults(),
                "seed": report.seed,
                "threads": threads.count(),
                "wall_seconds": start.elapsed().as_secs_f64(),
                "outputs": outputs,
                "warnings": report.warnings,
            })
        })?,
    };
    Ok(RunOutcome { report, files, stdout })
}

/// Parses `argv` (including the program name), runs it, prints results and
/// returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let merged = match config::merge(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(merged) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { CliError::Config(String::new()).exit_code() } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.report.warnings {
                eprintln!("warning: {w}");
            }
            if cli.global.out.is_none() && outcome.report.primary.is_some() {
                for l in &outcome.report.lines {
                    eprintln!("{l}");
                }
            }
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.stdout.as_bytes()).and_then(|_| out.flush()).is_err() {
                return CliError::Io(String::new()).exit_code();
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
