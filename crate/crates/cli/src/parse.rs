//! Flag value syntax shared by the subcommands.

use curvapprox_core::funcs::parse::parse_number;
use curvapprox_core::Interval;

use crate::error::{CliError, CliResult};

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn number(text: &str) -> CliResult<f64> {
    parse_number(text).ok_or_else(|| config(format!("`{}` is not a number", text.trim())))
}

/// `N` or `2^k`.
pub fn parse_count(text: &str) -> CliResult<u64> {
    let t = text.trim();
    if let Some(k) = t.strip_prefix("2^") {
        let k: u32 = k.trim().parse().map_err(|_| config(format!("bad exponent in `{t}`")))?;
        if k > 62 {
            return Err(config(format!("`{t}` is too large")));
        }
        return Ok(1 << k);
    }
    t.parse().map_err(|_| config(format!("`{t}` is not a nonnegative integer")))
}

fn power_of_two_exponent(text: &str) -> CliResult<u32> {
    let t = text.trim();
    t.strip_prefix("2^")
        .and_then(|k| k.trim().parse().ok())
        .filter(|&k: &u32| k <= 62)
        .ok_or_else(|| config(format!("sweep endpoint `{t}` must be written 2^k")))
}

/// `256`, `64,128,256` or the geometric sweep `2^8..2^14`.
pub fn parse_q_list(text: &str) -> CliResult<Vec<u64>> {
    let qs = match text.split_once("..") {
        Some((a, b)) => {
            let (lo, hi) = (power_of_two_exponent(a)?, power_of_two_exponent(b)?);
            if lo > hi {
                return Err(config(format!("empty sweep `{text}`")));
            }
            (lo..=hi).map(|k| 1u64 << k).collect()
        }
        None => text.split(',').map(parse_count).collect::<CliResult<Vec<_>>>()?,
    };
    if qs.is_empty() || qs.contains(&0) {
        return Err(CliError::Validation(format!("Q values must be positive, got `{text}`")));
    }
    Ok(qs)
}

/// `1` .. `2` style positive real grid: `2^0..2^8` or a comma list.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    match text.split_once("..") {
        Some(_) => Ok(parse_q_list(text)?.into_iter().map(|q| q as f64).collect()),
        None => text.split(',').map(number).collect(),
    }
}

/// Denominator window `lo..hi` or `lo,hi`.
pub fn parse_q_window(text: &str) -> CliResult<(u64, u64)> {
    let (a, b) = text
        .split_once("..")
        .or_else(|| text.split_once(','))
        .ok_or_else(|| config(format!("window `{text}` must be written lo..hi")))?;
    Ok((parse_count(a)?, parse_count(b)?))
}

/// Dyadic level range `l..L`.
pub fn parse_levels(text: &str) -> CliResult<(u32, u32)> {
    let (a, b) = text.split_once("..").ok_or_else(|| config(format!("levels `{text}` must be written l..L")))?;
    let lvl = |s: &str| s.trim().parse::<u32>().map_err(|_| config(format!("`{}` is not a level", s.trim())));
    let (l, big_l) = (lvl(a)?, lvl(b)?);
    if l > big_l {
        return Err(CliError::Validation(format!("need l ≤ L, got {l}..{big_l}")));
    }
    Ok((l, big_l))
}

/// `a,b` or `[a,b]`.
pub fn parse_interval(text: &str) -> CliResult<Interval> {
    let t = text.trim();
    let inner = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')).unwrap_or(t);
    let (a, b) = inner.split_once(',').ok_or_else(|| config(format!("interval `{t}` must be written a,b")))?;
    Ok(Interval::new(number(a)?, number(b)?)?)
}

pub fn parse_reals(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(number).collect()
}

/// `δ` as a constant or as `k*pow(Q,e)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaExpr {
    Constant(f64),
    Power { factor: f64, exponent: f64 },
}

impl DeltaExpr {
    pub fn parse(text: &str) -> CliResult<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (factor, rest) = match compact.split_once('*') {
            Some((k, rest)) => (number(k)?, rest.to_string()),
            None => (1.0, compact.clone()),
        };
        if let Some(body) = rest.strip_prefix("pow(").and_then(|s| s.strip_suffix(')')) {
            let exponent = body
                .strip_prefix("Q,")
                .or_else(|| body.strip_prefix("q,"))
                .ok_or_else(|| config(format!("`{text}`: expected pow(Q,e)")))?;
            return Ok(DeltaExpr::Power { factor, exponent: number(exponent)? });
        }
        if compact.contains('*') {
            return Err(config(format!("`{text}`: expected k*pow(Q,e)")));
        }
        Ok(DeltaExpr::Constant(number(&compact)?))
    }

    pub fn eval(&self, q: u64) -> f64 {
        match *self {
            DeltaExpr::Constant(d) => d,
            DeltaExpr::Power { factor, exponent } => factor * (q as f64).powf(exponent),
        }
    }
}
