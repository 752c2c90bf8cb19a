//! CSV and JSON writers. Numbers are written with Rust's shortest
//! round-trip formatting, so identical results give identical bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;

/// A rectangular table with a fixed header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }
}

/// `x` as text; `inf`, `-inf` and `NaN` are spelled out.
pub fn num(x: f64) -> String {
    x.to_string()
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    String::from(if b { "true" } else { "false" })
}

/// Creates `dir` and returns `dir/name.ext` for the chosen format.
pub fn target(dir: &Path, name: &str, format: Format) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    Ok(dir.join(format!("{name}.{ext}")))
}

pub fn write_csv(path: &Path, table: &Table) -> io::Result<()> {
    fs::write(path, table.to_csv()?)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Writes `table` as CSV or `json` as JSON, depending on `format`.
pub fn write_either<T: Serialize + ?Sized>(
    dir: &Path,
    name: &str,
    format: Format,
    table: &Table,
    json: &T,
) -> io::Result<PathBuf> {
    let path = target(dir, name, format)?;
    match format {
        Format::Csv => write_csv(&path, table)?,
        Format::Json => write_json(&path, json)?,
    }
    Ok(path)
}
