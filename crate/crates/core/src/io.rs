//! CSV matrices: rows are observations (or matrix rows), columns are variables. A header
//! row is detected when any field of the first record is not a number.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SymMatrix};

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Option<Vec<String>>,
    pub values: Matrix,
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| io_error(path, e))?;
    parse_table(&text).map_err(|e| match e {
        Error::Parse { reason, .. } => Error::Parse {
            path: path.display().to_string(),
            reason,
        },
        other => other,
    })
}

/// Parses CSV text; errors carry an empty path.
pub fn parse_table(text: &str) -> Result<Table> {
    let parse_err = |reason: String| Error::Parse {
        path: String::new(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(values) => {
                if let Some((r, c)) = values
                    .iter()
                    .position(|v| !v.is_finite())
                    .map(|c| (rows.len(), c))
                {
                    return Err(Error::NonFinite { row: r, col: c });
                }
                if let Some(first) = rows.first() {
                    if first.len() != values.len() {
                        return Err(parse_err(format!(
                            "record {} has {} fields, expected {}",
                            line + 1,
                            values.len(),
                            first.len()
                        )));
                    }
                }
                rows.push(values);
            }
            Err(_) if rows.is_empty() && header.is_none() => {
                header = Some(record.iter().map(str::to_string).collect::<Vec<_>>());
            }
            Err(e) => {
                return Err(parse_err(format!("record {}: {e}", line + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(parse_err("no numeric rows".into()));
    }
    if let Some(h) = &header {
        if h.len() != rows[0].len() {
            return Err(parse_err(format!(
                "header has {} fields but rows have {}",
                h.len(),
                rows[0].len()
            )));
        }
    }
    Ok(Table {
        header,
        values: Matrix::from_rows(&rows)?,
    })
}

/// Reads a square symmetric CSV.
pub fn read_sym_matrix(path: &Path) -> Result<SymMatrix> {
    let table = read_table(path)?;
    SymMatrix::from_matrix(&table.values).map_err(|e| match e {
        Error::DimensionMismatch { .. } => Error::Parse {
            path: path.display().to_string(),
            reason: format!(
                "expected a square matrix, got {}x{}",
                table.values.rows(),
                table.values.cols()
            ),
        },
        other => other,
    })
}

/// CSV text with Rust's shortest round-trip float formatting.
pub fn matrix_to_csv(m: &Matrix, header: Option<&[String]>) -> String {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|x| format!("{x:?}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    File::create(path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .map_err(|e| io_error(path, e))
}

/// Header `V1,..,Vp`.
pub fn default_header(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("V{i}")).collect()
}
