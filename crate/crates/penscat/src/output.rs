//! CSV tables and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

/// Seventeen significant digits, enough to read every `f64` back exactly.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// A named table written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }
}

/// Writes a table as comma-separated text with a header row and LF line endings.
pub fn csv_write(path: &Path, table: &Table) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    w.write_record(&table.header).map_err(|e| csv_error(path, e))?;
    for row in &table.rows {
        if row.len() != table.header.len() {
            return Err(CliError::Schema {
                path: table.name.clone(),
                message: format!("row has {} fields, header has {}", row.len(), table.header.len()),
            });
        }
        w.write_record(row.iter().map(Cell::render)).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Reads a CSV written by [`csv_write`] back into header and string rows.
pub fn csv_read(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = r.headers().map_err(|e| csv_error(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(|e| csv_error(path, e))?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// A tolerance check recorded in the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, threshold: format!("< {limit:e}"), pass: value < limit }
    }

    pub fn above(name: &str, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, threshold: format!("> {limit:e}"), pass: value > limit }
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Check { name: name.into(), value, threshold: format!("in ({lo}, {hi})"), pass: lo < value && value < hi }
    }

    pub fn holds(name: &str, pass: bool) -> Self {
        Check { name: name.into(), value: f64::from(u8::from(pass)), threshold: "true".into(), pass }
    }
}

/// Everything a command produced.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub diagnostics: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Artifacts {
    pub fn diag(&mut self, key: &str, value: impl ToString) {
        self.diagnostics.push((key.into(), value.to_string()));
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const MANIFEST: &str = "manifest.txt";

/// Writes every table and the manifest into `dir`; returns the files written.
pub fn write_artifacts(dir: &Path, echo: &str, art: &Artifacts) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut files = Vec::new();
    for t in &art.tables {
        let p = dir.join(t.file_name());
        csv_write(&p, t)?;
        files.push(p);
    }
    let p = dir.join(MANIFEST);
    fs::write(&p, manifest_text(echo, art, &files)).map_err(|e| CliError::io(&p, e))?;
    files.push(p);
    Ok(files)
}

fn manifest_text(echo: &str, art: &Artifacts, files: &[PathBuf]) -> String {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut s = String::new();
    let _ = writeln!(s, "# penscat {} run manifest", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "timestamp = {stamp}");
    let _ = writeln!(s, "\n[config]\n{}", echo.trim_end());
    let _ = writeln!(s, "\n[diagnostics]");
    for (k, v) in &art.diagnostics {
        let _ = writeln!(s, "{k} = {v}");
    }
    let _ = writeln!(s, "\n[checks]");
    for c in &art.checks {
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{verdict} {}: {} ({})", c.name, format_float(c.value), c.threshold);
    }
    let _ = writeln!(s, "\n[files]");
    for f in files {
        if let Some(name) = f.file_name() {
            let _ = writeln!(s, "{}", name.to_string_lossy());
        }
    }
    s
}
