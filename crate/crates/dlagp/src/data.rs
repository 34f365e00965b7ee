//! Sparse labeled data in the `label index:value` text format.
//!
//! One example per line: a numeric label followed by whitespace-separated
//! `index:value` pairs with 1-based, strictly increasing indices. Absent
//! indices are zero. Parsing reports the offending line number; writing
//! skips zero entries and round-trips values exactly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;

use crate::losses::{Dataset, LabeledPoint};
use crate::{Error, Result};

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Labels and dense feature rows as read from disk, before any label
/// mapping or bias handling.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub labels: Vec<f64>,
    pub features: Vec<Vec<f64>>,
    /// Largest feature index seen anywhere in the file.
    pub dim: usize,
}

impl RawDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

pub fn parse_libsvm(path: impl AsRef<Path>) -> std::result::Result<RawDataset, ParseError> {
    parse_libsvm_reader(BufReader::new(File::open(path)?))
}

pub fn parse_libsvm_reader(
    reader: impl BufRead,
) -> std::result::Result<RawDataset, ParseError> {
    let mut labels = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0;

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let mut tokens = line.split_whitespace();
        let Some(first) = tokens.next() else {
            continue; // blank line
        };
        let label: f64 = first
            .parse()
            .map_err(|_| syntax(lineno, format!("unreadable label `{first}`")))?;
        if !label.is_finite() {
            return Err(syntax(lineno, format!("non-finite label `{first}`")));
        }

        let mut row: Vec<(usize, f64)> = Vec::new();
        let mut prev = 0;
        for tok in tokens {
            let Some((idx_str, val_str)) = tok.split_once(':') else {
                return Err(syntax(lineno, format!("missing `:` in feature `{tok}`")));
            };
            let idx: usize = idx_str
                .parse()
                .map_err(|_| syntax(lineno, format!("unreadable feature index `{idx_str}`")))?;
            if idx == 0 {
                return Err(syntax(lineno, "feature indices are 1-based".to_string()));
            }
            if idx <= prev {
                return Err(syntax(
                    lineno,
                    format!("feature index {idx} does not increase past {prev}"),
                ));
            }
            let value: f64 = val_str
                .parse()
                .map_err(|_| syntax(lineno, format!("unreadable feature value `{val_str}`")))?;
            if !value.is_finite() {
                return Err(syntax(lineno, format!("non-finite feature value `{val_str}`")));
            }
            prev = idx;
            row.push((idx, value));
        }
        dim = dim.max(prev);
        labels.push(label);
        sparse_rows.push(row);
    }

    let features = sparse_rows
        .into_iter()
        .map(|row| {
            let mut dense = vec![0.0; dim];
            for (idx, value) in row {
                dense[idx - 1] = value;
            }
            dense
        })
        .collect();

    Ok(RawDataset {
        labels,
        features,
        dim,
    })
}

/// Writes in the same format, skipping zero entries. Values use the
/// shortest representation that parses back to the same number.
pub fn write_libsvm(path: impl AsRef<Path>, data: &RawDataset) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (label, row) in data.labels.iter().zip(&data.features) {
        let mut line = String::new();
        write!(line, "{label}").expect("string write");
        for (j, value) in row.iter().enumerate() {
            if *value != 0.0 {
                write!(line, " {}:{}", j + 1, value).expect("string write");
            }
        }
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

/// Maps raw label values to the {0, 1} targets the losses expect.
///
/// Parsed from `from=to` pairs separated by commas, e.g. `-1=0,1=1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap(Vec<(f64, f64)>);

impl LabelMap {
    pub fn new(pairs: Vec<(f64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter("empty label map".into()));
        }
        for (_, to) in &pairs {
            if *to != 0.0 && *to != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "label map targets must be 0 or 1, got {to}"
                )));
            }
        }
        Ok(Self(pairs))
    }

    /// The common binary convention: −1 ↦ 0 and +1 ↦ 1.
    pub fn plus_minus_one() -> Self {
        Self(vec![(-1.0, 0.0), (1.0, 1.0)])
    }

    /// `row` is the 1-based example number, used in the error.
    pub fn map(&self, label: f64, row: usize) -> Result<f64> {
        self.0
            .iter()
            .find(|(from, _)| *from == label)
            .map(|(_, to)| *to)
            .ok_or(Error::UnmappedLabel { label, row })
    }
}

impl std::str::FromStr for LabelMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let Some((from, to)) = part.split_once('=') else {
                return Err(Error::InvalidParameter(format!(
                    "label map entry `{part}` is not `from=to`"
                )));
            };
            let from: f64 = from.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("unreadable label `{from}` in label map"))
            })?;
            let to: f64 = to.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("unreadable target `{to}` in label map"))
            })?;
            pairs.push((from, to));
        }
        LabelMap::new(pairs)
    }
}

/// Maps labels, drops the given 1-based feature indices, and appends a
/// constant bias feature of 1.0 to every example.
pub fn preprocess(raw: &RawDataset, map: &LabelMap, drop_dims: &BTreeSet<usize>) -> Result<Dataset> {
    for &d in drop_dims {
        if d == 0 || d > raw.dim {
            return Err(Error::InvalidParameter(format!(
                "cannot drop feature {d}: indices are 1-based up to {}",
                raw.dim
            )));
        }
    }
    let mut points = Vec::with_capacity(raw.len());
    for (i, (label, row)) in raw.labels.iter().zip(&raw.features).enumerate() {
        let y = map.map(*label, i + 1)?;
        let mut x = Vec::with_capacity(raw.dim - drop_dims.len() + 1);
        for (j, value) in row.iter().enumerate() {
            if !drop_dims.contains(&(j + 1)) {
                x.push(*value);
            }
        }
        x.push(1.0);
        points.push(LabeledPoint::new(x, y)?);
    }
    Dataset::new(points)
}
