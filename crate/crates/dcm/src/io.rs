//! Delimited text ingestion and export.
//!
//! Files hold one header row of variable names followed by one row per
//! sample. Comma or tab separated; `.tsv`, `.tab` and `.txt` default to tab,
//! anything else to comma.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::Path;

use dcm_core::DataMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Delimiter {
    Comma,
    Tab,
}

impl Delimiter {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("tsv" | "tab" | "txt") => Delimiter::Tab,
            _ => Delimiter::Comma,
        }
    }

    pub fn byte(self) -> u8 {
        match self {
            Delimiter::Comma => b',',
            Delimiter::Tab => b'\t',
        }
    }
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    if err.is_io_error() {
        match err.into_kind() {
            csv::ErrorKind::Io(source) => return Error::io(path, source),
            _ => unreachable!(),
        }
    }
    let message = match err.kind() {
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => format!(
            "ragged row{}: expected {expected_len} fields, found {len}",
            pos.as_ref().map(|p| format!(" at line {}", p.line())).unwrap_or_default()
        ),
        _ => err.to_string(),
    };
    Error::Parse { path: path.to_path_buf(), message }
}

/// Reads a sample-by-variable matrix. Every field must parse as a finite
/// decimal number; names must be unique.
pub fn ingest(path: &Path, delimiter: Option<Delimiter>) -> Result<DataMatrix> {
    let delimiter = delimiter.unwrap_or_else(|| Delimiter::from_path(path));
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().delimiter(delimiter.byte()).has_headers(true).from_reader(file);

    let names: Vec<String> =
        reader.headers().map_err(|e| csv_error(path, e))?.iter().map(|h| h.trim().to_string()).collect();
    let parse_err = |message: String| Error::Parse { path: path.to_path_buf(), message };
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(parse_err("missing header row".into()));
    }
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(parse_err(format!("duplicate variable `{name}`")));
        }
    }

    let mut rows = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = r + 2;
        let mut row = Vec::with_capacity(names.len());
        for (field, name) in record.iter().zip(&names) {
            let value: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(format!("line {line}: non-numeric value `{field}` for `{name}`")))?;
            if !value.is_finite() {
                return Err(parse_err(format!("line {line}: non-finite value `{field}` for `{name}`")));
            }
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err("no sample rows".into()));
    }
    Ok(DataMatrix::from_rows(names, &rows)?)
}

/// Reorders `second`'s columns to follow `first`'s variable names.
///
/// Fails when the name sets differ, listing up to five offending names.
pub fn align_to(first: &DataMatrix, second: &DataMatrix) -> Result<DataMatrix> {
    let index: HashMap<&str, usize> = second.names().iter().enumerate().map(|(j, n)| (n.as_str(), j)).collect();
    let in_first: HashSet<&str> = first.names().iter().map(String::as_str).collect();
    let mut offending: Vec<&str> = first.names().iter().map(String::as_str).filter(|n| !index.contains_key(n)).collect();
    offending.extend(second.names().iter().map(String::as_str).filter(|n| !in_first.contains(n)));
    if !offending.is_empty() {
        let shown: Vec<String> = offending.iter().take(5).map(|n| format!("`{n}`")).collect();
        let more = if offending.len() > 5 { format!(" and {} more", offending.len() - 5) } else { String::new() };
        return Err(Error::Validation(format!(
            "variable names differ between conditions: {}{more}",
            shown.join(", ")
        )));
    }
    let order: Vec<usize> = first.names().iter().map(|n| index[n.as_str()]).collect();
    Ok(second.select_columns(&order)?)
}

/// Writes `data` with a header row, using Rust's shortest round-trip float
/// formatting.
pub fn write_matrix(path: &Path, data: &DataMatrix, delimiter: Delimiter) -> Result<()> {
    let mut out = String::new();
    let sep = delimiter.byte() as char;
    out.push_str(&data.names().join(&sep.to_string()));
    out.push('\n');
    for l in 0..data.n() {
        for j in 0..data.p() {
            if j > 0 {
                out.push(sep);
            }
            out.push_str(&data.value(l, j).to_string());
        }
        out.push('\n');
    }
    let mut file = File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
