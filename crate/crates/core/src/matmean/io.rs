//! Dense matrix text and JSON formats.
//!
//! Text: the dimension, then `dim²` entries in row-major order, separated
//! by any whitespace. Lines starting with `#` are ignored.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::PositiveMatrix;
use crate::error::{Error, Result};

/// Largest accepted dimension.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for PositiveMatrix {
    type Error = Error;

    fn try_from(m: MatrixJson) -> Result<Self> {
        if m.dim == 0 || m.dim > MAX_DIM {
            return Err(Error::Parse(format!("dim must be in 1..={MAX_DIM}, got {}", m.dim)));
        }
        if m.entries.len() != m.dim || m.entries.iter().any(|r| r.len() != m.dim) {
            return Err(Error::Parse(format!("entries must be {0}x{0}", m.dim)));
        }
        PositiveMatrix::from_rows(&m.entries)
    }
}

impl From<PositiveMatrix> for MatrixJson {
    fn from(m: PositiveMatrix) -> Self {
        let n = m.dim();
        MatrixJson { dim: n, entries: (0..n).map(|i| (0..n).map(|j| m.entries()[(i, j)]).collect()).collect() }
    }
}

pub fn matrix_from_text(text: &str) -> Result<PositiveMatrix> {
    let mut tokens = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace);
    let dim_token = tokens.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dim: usize = dim_token.parse().map_err(|_| Error::Parse(format!("bad dimension {dim_token:?}")))?;
    if dim == 0 || dim > MAX_DIM {
        return Err(Error::Parse(format!("dim must be in 1..={MAX_DIM}, got {dim}")));
    }
    let mut values = Vec::with_capacity(dim * dim);
    for tok in tokens {
        if values.len() == dim * dim {
            return Err(Error::Parse("trailing entries".into()));
        }
        values.push(tok.parse::<f64>().map_err(|_| Error::Parse(format!("bad entry {tok:?}")))?);
    }
    if values.len() != dim * dim {
        return Err(Error::Parse(format!("expected {} entries, found {}", dim * dim, values.len())));
    }
    PositiveMatrix::new(DMatrix::from_row_slice(dim, dim, &values))
}

pub fn matrix_to_text(m: &PositiveMatrix) -> String {
    let n = m.dim();
    let mut out = format!("{n}\n");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{:e}", m.entries()[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn matrix_from_json(text: &str) -> Result<PositiveMatrix> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_to_json(m: &PositiveMatrix) -> String {
    serde_json::to_string(m).expect("matrices serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let m = PositiveMatrix::from_rows(&[vec![2.0, 0.5, 0.0], vec![0.5, 3.0, 0.1], vec![0.0, 0.1, 1.0]]).unwrap();
        let back = matrix_from_text(&matrix_to_text(&m)).unwrap();
        assert_eq!(back.entries(), m.entries());
        let commented = "# a comment\n2\n1 0\n0 1\n";
        assert_eq!(matrix_from_text(commented).unwrap().entries(), PositiveMatrix::identity(2).entries());
    }

    #[test]
    fn json_round_trip() {
        let m = PositiveMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let json = matrix_to_json(&m);
        assert_eq!(json, r#"{"dim":2,"entries":[[2.0,0.5],[0.5,3.0]]}"#);
        assert_eq!(matrix_from_json(&json).unwrap().entries(), m.entries());
    }

    #[test]
    fn malformed_inputs() {
        for bad in ["", "0", "2\n1 0 0", "2\n1 0 0 1 5", "x", "1\nnan", "2\n1 2 2 1", "100000000000000000000\n1"] {
            assert!(matrix_from_text(bad).is_err(), "{bad:?}");
        }
        for bad in ["{}", r#"{"dim":2,"entries":[[1,0]]}"#, r#"{"dim":1,"entries":[[1]],"x":1}"#, r#"{"dim":1,"entries":[[-1]]}"#] {
            assert!(matrix_from_json(bad).is_err(), "{bad:?}");
        }
    }
}
