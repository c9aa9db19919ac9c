//! JSON matrix documents:
//! `{"dim": 2, "mode": "rational", "entries": [["2","0"],["0","-2"]]}`.
//! Rational entries are `"n"` or `"n/d"` strings, float entries are numbers.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::{Entries, Matrix};
use super::scalar::{parse_big_rational, Mode, Scalar};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub dim: usize,
    pub mode: Mode,
    pub entries: Vec<Vec<Value>>,
}

impl MatrixDocument {
    pub fn to_matrix(&self) -> Result<Matrix> {
        if self.entries.len() != self.dim || self.entries.iter().any(|r| r.len() != self.dim) {
            return Err(Error::Parse(format!("entries must be a {0}x{0} array", self.dim)));
        }
        let flat = self.entries.iter().flatten();
        match self.mode {
            Mode::Rational => {
                let v = flat
                    .map(|e| match e {
                        Value::String(s) => parse_big_rational(s),
                        Value::Number(n) if n.is_i64() => {
                            Ok(num_rational::BigRational::from_integer(n.as_i64().unwrap().into()))
                        }
                        other => Err(Error::Parse(format!(
                            "rational entries must be strings like \"n/d\", found {other}"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matrix::from_rational(self.dim, v)
            }
            Mode::Float => {
                let v = flat
                    .map(|e| {
                        e.as_f64()
                            .ok_or_else(|| Error::Parse(format!("float entry expected, found {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matrix::from_f64(self.dim, v)
            }
        }
    }

    pub fn from_matrix(m: &Matrix) -> Self {
        let d = m.dim();
        let entries = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| match (m.entries(), m.get(i, j)) {
                        (Entries::Rational(_), s) => Value::String(s.to_string()),
                        (Entries::Float(_), Scalar::Float(x)) => serde_json::Number::from_f64(x)
                            .map(Value::Number)
                            .unwrap_or(Value::Null),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        MatrixDocument {
            dim: d,
            mode: m.mode(),
            entries,
        }
    }
}

pub fn parse_matrix_json(text: &str) -> Result<Matrix> {
    let doc: MatrixDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_matrix()
}

pub fn matrix_to_json(m: &Matrix) -> String {
    serde_json::to_string(&MatrixDocument::from_matrix(m)).expect("serializable")
}
