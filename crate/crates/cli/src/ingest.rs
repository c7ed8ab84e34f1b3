//! Reading and writing plain-text samples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;
use weibull_gof::{datasets, Sample};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Builtin(&'static str),
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::File(p) => write!(f, "{}", p.display()),
            Source::Builtin(name) => write!(f, "builtin:{name}"),
        }
    }
}

/// Counts gathered while parsing a file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseReport {
    /// Lines that contributed at least one value.
    pub parsed_lines: usize,
    /// Blank lines and `#` comment lines.
    pub skipped_lines: usize,
    /// Values dropped because they were zero or negative.
    pub skipped_values: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InputDataset {
    pub values: Sample,
    pub source: Source,
    pub parse_report: ParseReport,
}

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}: `{token}` is not a number")]
    MalformedNumber { line: usize, token: String },
    #[error("no positive values in {0}")]
    NoPositiveValues(String),
}

/// Load a builtin dataset by name or parse a file.
pub fn ingest(path_or_builtin: &str) -> Result<InputDataset, IngestError> {
    if let Some(name) = datasets::BUILTIN_NAMES
        .iter()
        .find(|n| **n == path_or_builtin)
    {
        let values = datasets::builtin(name).expect("builtin names resolve");
        let lines = values.len();
        return Ok(InputDataset {
            values,
            source: Source::Builtin(name),
            parse_report: ParseReport {
                parsed_lines: lines,
                ..ParseReport::default()
            },
        });
    }
    let path = Path::new(path_or_builtin);
    let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IngestError::FileNotFound(path.to_path_buf()),
        _ => IngestError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        },
    })?;
    let (values, parse_report) = parse(&text)?;
    let values = Sample::new(values)
        .map_err(|_| IngestError::NoPositiveValues(path.display().to_string()))?;
    Ok(InputDataset {
        values,
        source: Source::File(path.to_path_buf()),
        parse_report,
    })
}

/// Parse whitespace-, comma- or newline-separated decimals. Zero and
/// negative values are dropped and counted; an empty result is an error.
pub fn parse(text: &str) -> Result<(Vec<f64>, ParseReport), IngestError> {
    let mut values = Vec::new();
    let mut report = ParseReport::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            report.skipped_lines += 1;
            continue;
        }
        let mut any = false;
        for token in line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let v: f64 = token
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| IngestError::MalformedNumber {
                    line: i + 1,
                    token: token.to_string(),
                })?;
            if v > 0.0 {
                values.push(v);
            } else {
                report.skipped_values += 1;
            }
            any = true;
        }
        if any {
            report.parsed_lines += 1;
        } else {
            report.skipped_lines += 1;
        }
    }
    if values.is_empty() {
        return Err(IngestError::NoPositiveValues("input".to_string()));
    }
    Ok((values, report))
}

/// One value per line with 17 significant digits, so that parsing the text
/// restores every value exactly.
pub fn write_sample(values: &[f64]) -> String {
    let mut out = String::with_capacity(24 * values.len());
    for v in values {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}
