use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    U(u64),
    I(i64),
    F(f64),
    S(String),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::I(v) => v.to_string(),
            Cell::F(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::U(v) => json!(v),
            Cell::I(v) => json!(v),
            Cell::F(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::U(u64::from(v))
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::U(u64::from(v))
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&'static str]) -> Self {
        Self { name: name.to_string(), headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.headers).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::text)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Object(self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect::<Map<_, _>>()))
            .collect();
        json!({ "columns": self.headers, "rows": rows })
    }
}

/// Everything a subcommand produced, before anything touches the disk.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Table echoed to stdout when no output directory is given; `None`
    /// prints the summary lines instead.
    pub primary: Option<usize>,
    /// Deterministic results beyond the tables (fits, tails, flags).
    pub summary: Value,
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub file: String,
    pub rows: usize,
}

fn write(dir: &Path, name: &str, bytes: &[u8], written: &mut Vec<PathBuf>) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

fn pretty(v: &impl Serialize) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Renders all files in memory, then writes them; the manifest goes last.
pub fn write_outputs(
    dir: &Path,
    format: Format,
    report: &Report,
    manifest: impl FnOnce(&[OutputRecord]) -> Value,
) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<(String, Vec<u8>, usize)> = Vec::new();
    for t in &report.tables {
        if format != Format::Json {
            files.push((format!("{}.csv", t.name), t.to_csv()?, t.rows.len()));
        }
        if format != Format::Csv {
            files.push((format!("{}.json", t.name), pretty(&t.to_json())?, t.rows.len()));
        }
    }
    if format != Format::Csv && !report.summary.is_null() {
        files.push(("summary.json".into(), pretty(&report.summary)?, 0));
    }
    let records: Vec<OutputRecord> = files.iter().map(|(f, _, rows)| OutputRecord { file: f.clone(), rows: *rows }).collect();
    let manifest_bytes = pretty(&manifest(&records))?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, bytes, _) in &files {
        write(dir, name, bytes, &mut written)?;
    }
    write(dir, "manifest.json", &manifest_bytes, &mut written)?;
    Ok(written)
}
