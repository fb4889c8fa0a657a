use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvapprox")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn weighted_series_verdict() {
    let o = bin(&["series", "--criterion", "t04", "--psi1", "pow(v=0.6)", "--psi2", "pow(v=0.8)", "--h", "pow(s=0.9)"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("t04: Converges"), "{text}");
    let below = bin(&["series", "--criterion", "t04", "--psi1", "pow(v=0.6)", "--psi2", "pow(v=0.8)", "--h", "pow(s=0.7)"]);
    assert!(stdout(&below).starts_with("t04: Diverges"));
}

#[test]
fn other_series_criteria() {
    let cases: [(&[&str], &str); 5] = [
        (&["--criterion", "t02", "--psi1", "pow(v=0.6)", "--psi2", "pow(v=0.6)"], "Converges"),
        (&["--criterion", "t02", "--psi1", "pow(v=0.5)", "--psi2", "pow(v=0.5)"], "Diverges"),
        (&["--criterion", "kj", "--psi", "pow(v=0.6667)", "--s", "2"], "Converges"),
        (&["--criterion", "gallagher", "--psi", "powlog(v=1,a=3)"], "Converges"),
        (&["--criterion", "curve", "--psi", "pow(v=1)", "--s", "0.9"], "Converges"),
    ];
    for (args, want) in cases {
        let mut a = vec!["series"];
        a.extend_from_slice(args);
        let o = bin(&a);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        assert!(stdout(&o).contains(want), "{args:?}: {}", stdout(&o));
    }
    let missing = bin(&["series", "--criterion", "kj", "--psi", "pow(v=1)"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn count_with_oracle_gives_equal_counts() {
    let o = bin(&["count", "--curve", "parabola", "--Q", "256", "--delta", "0.1", "--theta", "0,0", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("Q,delta,count,count_over_deltaQ2,seconds,oracle_count"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "256");
    assert_eq!(row[4], "");
    assert_eq!(row[2], row[5]);
}

#[test]
fn exit_codes_are_distinct() {
    assert_eq!(bin(&["count", "--interval", "0.5,0.2"]).status.code(), Some(3));
    assert_eq!(bin(&["count", "--delta", "0.7"]).status.code(), Some(3));
    assert_eq!(bin(&["count", "--Q", "1024", "--oracle"]).status.code(), Some(4));
    assert_eq!(bin(&["count", "--Q", "many"]).status.code(), Some(2));
    assert_eq!(bin(&["count", "--nonsense"]).status.code(), Some(2));
    assert_eq!(bin(&["cover", "--eta", "1.2"]).status.code(), Some(3));
    assert_eq!(bin(&["member", "--x", "3"]).status.code(), Some(3));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = bin(&["count", "--interval", "1,0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn config_file_values_yield_to_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"subcommand": "count", "Q": "2^4..2^6", "delta": 0.2, "theta": ["1/3", -0.25], "threads": 2}"#).unwrap();
    let out = tmp.path().join("run");
    let o = bin(&["--config", cfg.to_str().unwrap(), "--Q", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("count.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("64,0.2,"));
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "count");
    assert_eq!(m["arguments"]["command"]["shift"]["theta"], "1/3,-0.25");
    assert_eq!(m["arguments"]["global"]["threads"], 2);
    assert_eq!(m["config_file"], cfg.to_str().unwrap());

    fs::write(&cfg, r#"{"subcommand": "series", "unknown_key": 1}"#).unwrap();
    assert_eq!(bin(&["--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(bin(&["count", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn manifest_records_run() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("mc");
    let o = bin(&["lebesgue", "--samples", "500", "--seed", "11", "--window", "1..256", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["seed"], 11);
    assert!(m["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(m["defaults"]["tau"], 1e-12);
    assert_eq!(m["arguments"]["command"]["sampling"]["samples"], 500);
    let files: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["file"].as_str().unwrap()).collect();
    for f in &files {
        assert!(out.join(f).exists(), "{f}");
    }
    assert!(files.contains(&"lebesgue.csv") && files.contains(&"lebesgue_samples.csv"));
    let csv = fs::read_to_string(out.join("lebesgue.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("samples,window_lo,window_hi,fraction,seed"));
    let samples = fs::read_to_string(out.join("lebesgue_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 501);
}

#[test]
fn outputs_repeat_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let read = |name: &str, threads: &str| {
        let dir = tmp.path().join(format!("{name}-{threads}"));
        let o = bin(&["--threads", threads, "mult", "--samples", "2000", "--window", "1..512", "--psi", "pow(v=1.2)", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        (fs::read(dir.join("mult.csv")).unwrap(), fs::read(dir.join("mult_samples.csv")).unwrap())
    };
    let a = read("a", "1");
    assert_eq!(a, read("b", "1"));
    assert_eq!(a, read("c", "6"));
}

#[test]
fn remaining_subcommands_produce_documented_tables() {
    let cases: [(&[&str], &str); 5] = [
        (&["ubiquity", "--Q", "2^5..2^6", "--c-grid", "1,4"], "Q,C,fraction,minimal_C_flag,points_used"),
        (&["cover", "--levels", "3..5"], "t,count_exact,count_sufficient,h_contrib"),
        (&["dimension", "--levels", "3..8"], "t,count,used"),
        (&["member", "--x", "0.3,0.7071", "--window", "1..64"], "x,q,p1,p2,residual1,residual2"),
        (&["mult", "--x", "0.25", "--window", "1..64"], "x1,x2,q,residual1,residual2"),
    ];
    for (args, header) in cases {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().next(), Some(header), "{args:?}");
    }
}

#[test]
fn json_only_format() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("j");
    let o = bin(&["--format", "json", "cover", "--levels", "3..4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!out.join("cover.csv").exists());
    let v: Value = serde_json::from_slice(&fs::read(out.join("cover.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let s: Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert!(s["exact"]["tails"].is_array());
}
