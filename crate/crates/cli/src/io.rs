//! Matrix JSON, trace CSV and report writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use aluthge_core::aluthge::IterationTrace;
use aluthge_core::{ComplexMatrix, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// `{"dim": n, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            dim: m.dim(),
            data: m.row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Validates against the matrix contract; `prefix` locates this object
    /// in the enclosing document for diagnostics.
    pub fn to_matrix(&self, prefix: &str) -> CliResult<ComplexMatrix> {
        let at = |f: &str| {
            if prefix.is_empty() {
                f.to_string()
            } else {
                format!("{prefix}.{f}")
            }
        };
        if self.dim == 0 {
            return Err(CliError::input(at("dim"), "must be at least 1"));
        }
        let expected = self
            .dim
            .checked_mul(self.dim)
            .ok_or_else(|| CliError::input(at("dim"), format!("{} is too large", self.dim)))?;
        if self.data.len() != expected {
            return Err(CliError::input(
                at("data"),
                format!(
                    "expected {expected} entries for dim {}, got {}",
                    self.dim,
                    self.data.len()
                ),
            ));
        }
        if let Some(k) = self
            .data
            .iter()
            .position(|[re, im]| !(re.is_finite() && im.is_finite()))
        {
            return Err(CliError::input(
                format!("{}[{k}]", at("data")),
                "entry is not finite",
            ));
        }
        let entries: Vec<C64> = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(ComplexMatrix::from_row_major(self.dim, &entries)?)
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parses JSON text into `T`, reporting the path of the first offending field.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> CliResult<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let field = if field == "." {
            "<document>".to_string()
        } else {
            field
        };
        CliError::input(field, e.into_inner().to_string())
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_json(&read_text(path)?)
}

pub fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    read_json::<MatrixFile>(path)?.to_matrix("")
}

/// Pretty JSON to `path`, or stdout when `path` is `None`.
pub fn write_json<T: Serialize + ?Sized>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            }
            fs::write(p, text).map_err(|e| CliError::io(p, e))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

/// CSV text from a header and rows of already-formatted cells.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv writer emits utf-8"))
}

pub const TRACE_COLUMNS: [&str; 4] = ["iter", "op_norm", "step_delta", "normality_defect"];

/// One row per step; row 0 is the input with an empty step delta.
pub fn trace_csv(trace: &IterationTrace) -> CliResult<String> {
    let first = vec![
        "0".to_string(),
        trace.initial_norm.to_string(),
        String::new(),
        trace.initial_defect.to_string(),
    ];
    let rows = std::iter::once(first).chain(trace.steps.iter().map(|s| {
        vec![
            s.index.to_string(),
            s.op_norm.to_string(),
            s.step_delta.to_string(),
            s.normality_defect.to_string(),
        ]
    }));
    csv_text(&TRACE_COLUMNS, rows)
}
