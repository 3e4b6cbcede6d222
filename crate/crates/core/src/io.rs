//! JSON matrix files: `{"rows": r, "cols": c, "data": [[[re, im], ...], ...]}`.
//!
//! Output uses sorted keys and 17 significant digits per float so any matrix
//! written here reads back bit-identical.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matcore::{ensure_finite, Complex64, ComplexMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let data = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "declared shape {}x{} is empty",
                self.rows, self.cols
            )));
        }
        if self.data.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "declared {} rows, found {}",
                self.rows,
                self.data.len()
            )));
        }
        if let Some((i, row)) = self.data.iter().enumerate().find(|(_, r)| r.len() != self.cols) {
            return Err(Error::DimensionMismatch(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                self.cols
            )));
        }
        let m = ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i][j];
            Complex64::new(re, im)
        });
        ensure_finite(&m)?;
        Ok(m)
    }
}

pub fn parse_matrix_str(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn parse_matrix_bytes(bytes: &[u8]) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn parse_matrix_file(path: impl AsRef<Path>) -> Result<ComplexMatrix> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix_bytes(&bytes)
}

/// Compact JSON with every float printed as `d.dddddddddddddddde±x`.
struct FullPrecision;

impl Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn write_null<W: ?Sized + Write>(&mut self, writer: &mut W) -> std::io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// Deterministic rendering: keys sorted (via `Value`'s ordered map), floats
/// at full precision.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable value");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision);
    value.serialize(&mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

pub fn matrix_to_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("serializable matrix")
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_canonical_json(&MatrixFile::from_matrix(m))
}

pub fn write_matrix_file(path: impl AsRef<Path>, m: &ComplexMatrix) -> std::io::Result<()> {
    let mut text = matrix_to_json(m);
    text.push('\n');
    std::fs::write(path, text)
}
