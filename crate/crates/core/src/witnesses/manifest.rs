//! Serializable recipe that rebuilds a witness family bit for bit.

use serde::{Deserialize, Serialize};

use super::families::{
    case1_witness, case2_witness, delta_witness, multiscale_witness, single_scale_witness, FamilyKind, WitnessFamily,
};
use super::separation::{find_separating_points, SearchConfig, SeparationData};
use crate::error::{Error, Result};
use crate::matrices::{ExpansiveMatrix, MatrixDocument};
use crate::orbit::{Exponent, SpaceDocument};

pub const DEFAULT_CASE2_DELTA: f64 = 0.1;

/// `size` is `j0` for the delta family, the number of unit entries for
/// single-scale, `N` for the pair constructions and `L` for multiscale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessManifest {
    pub family: FamilyKind,
    pub space: SpaceDocument,
    /// Second dilation for the pair constructions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<MatrixDocument>,
    /// `q` of the second space; defaults to the first space's `q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<Exponent>,
    pub size: i64,
    /// `σ` (case 1), `τ` (case 2, multiscale) or the single-scale values.
    /// Missing means all ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default)]
    pub search: SearchConfig,
}

/// A built family; the pair constructions also carry the second side.
#[derive(Debug, Clone)]
pub struct BuiltWitness {
    pub a: WitnessFamily,
    pub b: Option<WitnessFamily>,
    pub separation: Option<SeparationData>,
}

impl WitnessManifest {
    pub fn new(family: FamilyKind, space: SpaceDocument, size: i64) -> Self {
        WitnessManifest {
            family,
            space,
            b: None,
            q2: None,
            size,
            weights: None,
            delta: None,
            search: SearchConfig::default(),
        }
    }

    pub fn with_size(&self, size: i64) -> Self {
        WitnessManifest { size, ..self.clone() }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    fn count(&self) -> Result<usize> {
        usize::try_from(self.size).ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidInput(format!(
                "size must be positive for {:?}, got {}",
                self.family, self.size
            ))
        })
    }

    fn weights(&self, n: usize) -> Result<Vec<f64>> {
        match &self.weights {
            None => Ok(vec![1.0; n]),
            Some(w) if w.len() == n => Ok(w.clone()),
            Some(w) => Err(Error::DimensionMismatch {
                expected: n,
                found: w.len(),
            }),
        }
    }

    pub fn build(&self) -> Result<BuiltWitness> {
        let s = self.space.to_params()?;
        let single = |a: WitnessFamily| BuiltWitness {
            a,
            b: None,
            separation: None,
        };
        match self.family {
            FamilyKind::Delta => Ok(single(delta_witness(self.size, &s))),
            FamilyKind::SingleScale => {
                let n = self.count()?;
                let w = self.weights(n)?;
                let entries: Vec<(Vec<i64>, f64)> = w
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        let mut k = vec![0; s.dim()];
                        k[0] = i as i64;
                        (k, v)
                    })
                    .collect();
                Ok(single(single_scale_witness(&entries, &s)?))
            }
            FamilyKind::Multiscale => {
                let n = self.count()?;
                Ok(single(multiscale_witness(&self.weights(n)?, &s)?))
            }
            FamilyKind::Case1 | FamilyKind::Case2 => {
                let n = self.count()?;
                let doc = self
                    .b
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("pair constructions need a second matrix".into()))?;
                let b = ExpansiveMatrix::new(doc.to_matrix()?)?;
                let q2 = self.q2.unwrap_or(s.q);
                let sep = find_separating_points(&s.matrix, &b, n, &self.search)?;
                let w = self.weights(n)?;
                let pair = if self.family == FamilyKind::Case1 {
                    let p = case1_witness(&s, &b, q2, &sep, &w)?;
                    (p.a, p.b)
                } else {
                    let p = case2_witness(&s, &b, q2, &sep, &w, self.delta.unwrap_or(DEFAULT_CASE2_DELTA))?;
                    (p.a, p.b)
                };
                Ok(BuiltWitness {
                    a: pair.0,
                    b: Some(pair.1),
                    separation: Some(sep),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::Matrix;
    use crate::norms::CoefficientSequence;

    fn doc(m: Matrix, p: &str, q: &str) -> SpaceDocument {
        SpaceDocument {
            matrix: MatrixDocument::from_matrix(&m),
            alpha: serde_json::json!(0.0),
            p: p.parse().unwrap(),
            q: q.parse().unwrap(),
        }
    }

    #[test]
    fn json_round_trip_rebuilds_the_same_family() {
        let mut m = WitnessManifest::new(FamilyKind::Case2, doc(Matrix::diag_int(&[2, 2]), "inf", "1"), 3);
        m.b = Some(MatrixDocument::from_matrix(&Matrix::scaled_rotation(2.0, 1.0)));
        let back = WitnessManifest::from_json(&m.to_json()).unwrap();
        let (x, y) = (m.build().unwrap(), back.build().unwrap());
        let (CoefficientSequence::Explicit(e1), CoefficientSequence::Explicit(e2)) = (&x.a.sequence, &y.a.sequence)
        else {
            panic!("case 2 is explicit")
        };
        assert_eq!(e1, e2);
        assert_eq!(x.a.params, y.a.params);
    }

    #[test]
    fn size_validation() {
        let m = WitnessManifest::new(FamilyKind::Multiscale, doc(Matrix::diag_int(&[2, 2]), "1", "1"), 0);
        assert!(m.build().is_err());
        let m = m.with_size(-3);
        assert!(m.build().is_err());
        let d = WitnessManifest::new(FamilyKind::Delta, doc(Matrix::diag_int(&[2, 2]), "1", "1"), -2);
        assert!((d.build().unwrap().a.law.reference() - 0.25).abs() < 1e-12);
        let mut c = WitnessManifest::new(FamilyKind::Case1, doc(Matrix::diag_int(&[2, 2]), "1", "2"), 2);
        assert!(c.build().is_err());
        c.b = Some(MatrixDocument::from_matrix(&Matrix::scaled_rotation(2.0, 1.0)));
        c.weights = Some(vec![1.0]);
        assert!(matches!(c.build(), Err(Error::DimensionMismatch { .. })));
    }
}
