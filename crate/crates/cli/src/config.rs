//! JSON config files, spliced into the argument list so that later
//! command-line flags override them.

use std::ffi::OsString;
use std::fs;

use serde_json::Value;

use crate::args::SUBCOMMANDS;
use crate::error::{CliError, CliResult};

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut iter = argv.iter().skip(1);
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--" {
            return None;
        }
        if s == "--config" {
            return iter.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

fn scalar(key: &str, v: &Value) -> CliResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        _ => Err(CliError::Config(format!("config key `{key}`: lists may only hold strings and numbers"))),
    }
}

/// Flags encoded by one config entry; `--key=value` keeps values that start
/// with `-` from being read as flags.
fn flags_for(key: &str, v: &Value) -> CliResult<Vec<OsString>> {
    let flag = format!("--{}", key.replace('_', "-"));
    Ok(match v {
        Value::Null | Value::Bool(false) => vec![],
        Value::Bool(true) => vec![flag.into()],
        Value::Array(items) => {
            let parts = items.iter().map(|i| scalar(key, i)).collect::<CliResult<Vec<_>>>()?;
            vec![format!("{flag}={}", parts.join(",")).into()]
        }
        Value::Object(_) => return Err(CliError::Config(format!("config key `{key}` must not be an object"))),
        other => vec![format!("{flag}={}", scalar(key, other)?).into()],
    })
}

/// Returns `argv` with the entries of the `--config` file (if any) inserted
/// right after the subcommand name.
pub fn merge(argv: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let shown = path.to_string_lossy().into_owned();
    let text = fs::read_to_string(&path).map_err(|e| CliError::Config(format!("cannot read {shown}: {e}")))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{shown}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(CliError::Config(format!("{shown}: top level must be an object")));
    };
    let mut file_subcommand = None;
    let mut flags = Vec::new();
    for (key, v) in &map {
        match key.as_str() {
            "config" => {}
            "subcommand" => file_subcommand = Some(scalar(key, v)?),
            _ => flags.extend(flags_for(key, v)?),
        }
    }
    let position = argv.iter().skip(1).position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s))).map(|p| p + 1);
    let mut out = argv;
    match (position, file_subcommand) {
        (Some(p), Some(sub)) if out[p] != *sub.as_str() => {
            return Err(CliError::Config(format!(
                "{shown} is for `{sub}` but the command line selects `{}`",
                out[p].to_string_lossy()
            )));
        }
        (Some(p), _) => {
            out.splice(p + 1..p + 1, flags);
        }
        (None, Some(sub)) => {
            if !SUBCOMMANDS.contains(&sub.as_str()) {
                return Err(CliError::Config(format!("{shown}: unknown subcommand `{sub}`")));
            }
            let at = 1.min(out.len());
            out.splice(at..at, std::iter::once(OsString::from(sub)).chain(flags));
        }
        (None, None) => return Err(CliError::Config(format!("{shown}: no subcommand on the command line or in the file"))),
    }
    Ok(out)
}
