use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

/// Tuning for [`is_expansive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansivenessConfig {
    /// Margin around 1 for the Gelfand test (`d > 3`).
    pub theta: f64,
    /// Largest power tried by the Gelfand test.
    pub n_max: u32,
}

impl Default for ExpansivenessConfig {
    fn default() -> Self {
        ExpansivenessConfig { theta: 1e-6, n_max: 64 }
    }
}

/// How an expansiveness verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Roots of the characteristic polynomial (`d <= 3`). `exact` is set when
    /// the decision came from the rational Schur–Cohn recursion.
    Eigenvalues { min_modulus: f64, exact: bool },
    /// `||M^{-n}||^{1/n}` at step `n` (`d > 3`).
    Gelfand { n: u32, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ExpansiveVerdict {
    Expansive { certificate: Certificate },
    NotExpansive { certificate: Certificate },
    Indeterminate { n_max: u32, last_bound: f64 },
}

impl ExpansiveVerdict {
    pub fn is_expansive(&self) -> bool {
        matches!(self, ExpansiveVerdict::Expansive { .. })
    }
}

/// Decides whether every eigenvalue of `m` has modulus `> 1`.
///
/// For `d <= 3` the characteristic polynomial is examined directly (exactly,
/// via Schur–Cohn, in rational mode). For `d > 3` the Gelfand formula
/// `ρ(M^{-1}) = lim ||M^{-n}||^{1/n}` is used and may return
/// [`ExpansiveVerdict::Indeterminate`].
pub fn is_expansive(m: &Matrix, cfg: &ExpansivenessConfig) -> Result<ExpansiveVerdict> {
    if m.det().is_zero() {
        return Err(Error::Singular);
    }
    let d = m.dim();
    if d <= 3 {
        let poly = m.characteristic_polynomial()?;
        let coeffs: Vec<f64> = poly.iter().map(Scalar::to_f64).collect();
        let min_modulus = polynomial_roots(&coeffs)
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        let (expansive, exact) = match m.mode() {
            Mode::Rational => {
                let exact: Vec<BigRational> = poly
                    .iter()
                    .map(|s| s.as_rational().cloned().expect("rational mode"))
                    .collect();
                (all_roots_outside_unit_circle(&exact), true)
            }
            Mode::Float => (min_modulus > 1.0, false),
        };
        let certificate = Certificate::Eigenvalues { min_modulus, exact };
        return Ok(if expansive {
            ExpansiveVerdict::Expansive { certificate }
        } else {
            ExpansiveVerdict::NotExpansive { certificate }
        });
    }

    let inv = m.inverse()?.to_float();
    let mut power = inv.clone();
    let mut last_bound = f64::NAN;
    for n in 1..=cfg.n_max {
        if n > 1 {
            power = power.mul(&inv)?;
        }
        let bound = power.spectral_norm().powf(1.0 / n as f64);
        last_bound = bound;
        if bound < 1.0 - cfg.theta {
            return Ok(ExpansiveVerdict::Expansive {
                certificate: Certificate::Gelfand { n, bound },
            });
        }
    }
    if last_bound > 1.0 + cfg.theta {
        return Ok(ExpansiveVerdict::NotExpansive {
            certificate: Certificate::Gelfand {
                n: cfg.n_max,
                bound: last_bound,
            },
        });
    }
    Ok(ExpansiveVerdict::Indeterminate {
        n_max: cfg.n_max,
        last_bound,
    })
}

/// Schur–Cohn: are all roots of `p` (ascending coefficients) strictly
/// outside the closed unit disc?
///
/// Equivalent to all roots of the reversed polynomial lying strictly inside
/// the open unit disc, which the recursion decides exactly.
pub(crate) fn all_roots_outside_unit_circle(p: &[BigRational]) -> bool {
    if p.first().is_none_or(|c| c.is_zero()) {
        // zero is a root
        return false;
    }
    let mut c: Vec<BigRational> = p.iter().rev().cloned().collect();
    while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    while c.len() > 1 {
        let n = c.len() - 1;
        if c[0].abs() >= c[n].abs() {
            return false;
        }
        let next: Vec<BigRational> = (0..n).map(|k| &c[n] * &c[k + 1] - &c[0] * &c[n - 1 - k]).collect();
        c = next;
    }
    true
}

/// Roots of a real polynomial (ascending coefficients, degree `<= 3` in
/// practice) by Durand–Kerner iteration.
pub(crate) fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    match n {
        0 => vec![],
        1 => vec![Complex64::new(-monic[0], 0.0)],
        2 => {
            let (b, c) = (monic[1], monic[0]);
            let disc = Complex64::new(b * b - 4.0 * c, 0.0).sqrt();
            vec![(-b + disc) / 2.0, (-b - disc) / 2.0]
        }
        _ => {
            let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c);
            let radius = 1.0 + monic[..n].iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let seed = Complex64::new(0.4, 0.9);
            let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32) * radius).collect();
            for _ in 0..500 {
                let mut delta = 0.0f64;
                for i in 0..n {
                    let mut denom = Complex64::new(1.0, 0.0);
                    for j in 0..n {
                        if i != j {
                            denom *= roots[i] - roots[j];
                        }
                    }
                    let step = eval(roots[i]) / denom;
                    roots[i] -= step;
                    delta = delta.max(step.norm());
                }
                if delta < 1e-15 * radius {
                    break;
                }
            }
            roots
        }
    }
}

/// An invertible matrix whose eigenvalues all have modulus `> 1`.
///
/// Integer powers are memoized; the cache is guarded by a mutex so the value
/// can be shared across threads.
pub struct ExpansiveMatrix {
    matrix: Matrix,
    inverse: Matrix,
    det: Scalar,
    det_abs: f64,
    certificate: Certificate,
    powers: Mutex<HashMap<i64, Arc<Matrix>>>,
    float_powers: Mutex<HashMap<i64, Arc<Vec<f64>>>>,
    ladder: Mutex<[Vec<Arc<Matrix>>; 2]>,
}

impl fmt::Debug for ExpansiveMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpansiveMatrix")
            .field("matrix", &self.matrix)
            .field("det_abs", &self.det_abs)
            .field("certificate", &self.certificate)
            .finish()
    }
}

impl Clone for ExpansiveMatrix {
    fn clone(&self) -> Self {
        ExpansiveMatrix {
            matrix: self.matrix.clone(),
            inverse: self.inverse.clone(),
            det: self.det.clone(),
            det_abs: self.det_abs,
            certificate: self.certificate.clone(),
            powers: Mutex::new(HashMap::new()),
            float_powers: Mutex::new(HashMap::new()),
            ladder: Mutex::new([Vec::new(), Vec::new()]),
        }
    }
}

impl PartialEq for ExpansiveMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl ExpansiveMatrix {
    pub fn new(matrix: Matrix) -> Result<Self> {
        Self::with_config(matrix, &ExpansivenessConfig::default())
    }

    pub fn with_config(matrix: Matrix, cfg: &ExpansivenessConfig) -> Result<Self> {
        let certificate = match is_expansive(&matrix, cfg)? {
            ExpansiveVerdict::Expansive { certificate } => certificate,
            ExpansiveVerdict::NotExpansive { certificate } => {
                return Err(Error::NotExpansive(format!("{certificate:?}")))
            }
            ExpansiveVerdict::Indeterminate { n_max, last_bound } => {
                return Err(Error::Indeterminate { n_max, last_bound })
            }
        };
        let inverse = matrix.inverse()?;
        let det = matrix.det();
        let det_abs = matrix.abs_det_f64();
        Ok(ExpansiveMatrix {
            matrix,
            inverse,
            det,
            det_abs,
            certificate,
            powers: Mutex::new(HashMap::new()),
            float_powers: Mutex::new(HashMap::new()),
            ladder: Mutex::new([Vec::new(), Vec::new()]),
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn mode(&self) -> Mode {
        self.matrix.mode()
    }

    pub fn det(&self) -> &Scalar {
        &self.det
    }

    /// `|det A|` as a double.
    pub fn det_abs(&self) -> f64 {
        self.det_abs
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `M^j` for any integer `j`; exact in rational mode, memoized.
    pub fn power(&self, j: i64) -> Arc<Matrix> {
        if let Some(m) = self.powers.lock().expect("power cache").get(&j) {
            return Arc::clone(m);
        }
        let mut e = j.unsigned_abs();
        let mut result = Matrix::identity(self.dim(), self.mode());
        let mut bit = 0usize;
        while e > 0 {
            if e & 1 == 1 {
                let rung = self.ladder_rung(j < 0, bit);
                result = result.mul(&rung).expect("same dimension and mode");
            }
            e >>= 1;
            bit += 1;
        }
        let result = Arc::new(result);
        self.powers.lock().expect("power cache").insert(j, Arc::clone(&result));
        result
    }

    /// `M^{±2^bit}`, extending the cached squaring ladder as needed.
    fn ladder_rung(&self, negative: bool, bit: usize) -> Arc<Matrix> {
        let mut ladders = self.ladder.lock().expect("ladder cache");
        let ladder = &mut ladders[usize::from(negative)];
        if ladder.is_empty() {
            let base = if negative { &self.inverse } else { &self.matrix };
            ladder.push(Arc::new(base.clone()));
        }
        while ladder.len() <= bit {
            let last = ladder.last().expect("nonempty");
            let next = last.mul(last).expect("same dimension and mode");
            ladder.push(Arc::new(next));
        }
        Arc::clone(&ladder[bit])
    }

    /// Row-major `f64` copy of `M^j`.
    pub fn power_f64(&self, j: i64) -> Arc<Vec<f64>> {
        if let Some(m) = self.float_powers.lock().expect("power cache").get(&j) {
            return Arc::clone(m);
        }
        let v = Arc::new(self.power(j).to_f64_vec());
        self.float_powers.lock().expect("power cache").insert(j, Arc::clone(&v));
        v
    }

    /// `|det M|^x`.
    pub fn det_abs_pow(&self, x: f64) -> f64 {
        self.det_abs.powf(x)
    }

    /// `|det M|^n` exactly, in rational mode.
    pub fn det_abs_pow_exact(&self, n: i64) -> Option<BigRational> {
        let r = self.det.as_rational()?.abs();
        Some(if n >= 0 {
            num_traits::pow(r, n as usize)
        } else {
            num_traits::pow(r.recip(), n.unsigned_abs() as usize)
        })
    }

    /// Operator 2-norm of `M^j`.
    pub fn power_norm(&self, j: i64) -> f64 {
        super::matrix::spectral_norm_f64(&self.power_f64(j), self.dim())
    }
}

/// Exact entrywise equality (rational) or max deviation `<= tol` (float).
pub fn matrix_equal(a: &Matrix, b: &Matrix, tol: f64) -> Result<bool> {
    if tol < 0.0 || tol.is_nan() {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    a.approx_eq(b, tol)
}
