use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::{rational_to_f64, Mode, Scalar};
use crate::error::{Error, Result};

/// Row-major entries of a square matrix in one scalar mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Rational(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A dense square matrix over exact rationals or doubles.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    entries: Entries,
}

/// Minimal field interface shared by the two scalar modes.
trait FieldOps: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Larger is a better pivot.
    fn pivot_score(&self) -> f64;
}

impl FieldOps for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivot_score(&self) -> f64 {
        // any nonzero pivot is exact; prefer the first one found
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
}

impl FieldOps for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn pivot_score(&self) -> f64 {
        self.abs()
    }
}

fn mul_generic<T: FieldOps>(a: &[T], b: &[T], n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = &a[i * n + k];
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = aik.mul(&b[k * n + j]);
                out[i * n + j] = out[i * n + j].add(&t);
            }
        }
    }
    out
}

fn identity_generic<T: FieldOps>(n: usize) -> Vec<T> {
    let mut out = vec![T::zero(); n * n];
    for i in 0..n {
        out[i * n + i] = T::one();
    }
    out
}

/// Gauss–Jordan elimination. Returns `None` when singular.
fn inverse_generic<T: FieldOps>(a: &[T], n: usize) -> Option<Vec<T>> {
    let mut m = a.to_vec();
    let mut inv = identity_generic::<T>(n);
    for col in 0..n {
        let mut best = None;
        let mut best_score = 0.0;
        for row in col..n {
            let s = m[row * n + col].pivot_score();
            if s > best_score {
                best_score = s;
                best = Some(row);
            }
        }
        let piv = best?;
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
                inv.swap(piv * n + j, col * n + j);
            }
        }
        let p = m[col * n + col].clone();
        for j in 0..n {
            m[col * n + j] = m[col * n + j].div(&p);
            inv[col * n + j] = inv[col * n + j].div(&p);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = m[row * n + col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..n {
                let t = f.mul(&m[col * n + j]);
                m[row * n + j] = m[row * n + j].sub(&t);
                let t = f.mul(&inv[col * n + j]);
                inv[row * n + j] = inv[row * n + j].sub(&t);
            }
        }
    }
    Some(inv)
}

fn det_generic<T: FieldOps>(a: &[T], n: usize) -> T {
    let mut m = a.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let mut best = None;
        let mut best_score = 0.0;
        for row in col..n {
            let s = m[row * n + col].pivot_score();
            if s > best_score {
                best_score = s;
                best = Some(row);
            }
        }
        let Some(piv) = best else {
            return T::zero();
        };
        if piv != col {
            for j in 0..n {
                m.swap(piv * n + j, col * n + j);
            }
            det = T::zero().sub(&det);
        }
        let p = m[col * n + col].clone();
        det = det.mul(&p);
        for row in col + 1..n {
            let f = m[row * n + col].div(&p);
            if f.is_zero() {
                continue;
            }
            for j in col..n {
                let t = f.mul(&m[col * n + j]);
                m[row * n + j] = m[row * n + j].sub(&t);
            }
        }
    }
    det
}

impl Matrix {
    pub fn from_rational(dim: usize, entries: Vec<BigRational>) -> Result<Self> {
        check_len(dim, entries.len())?;
        Ok(Matrix {
            dim,
            entries: Entries::Rational(entries),
        })
    }

    pub fn from_f64(dim: usize, entries: Vec<f64>) -> Result<Self> {
        check_len(dim, entries.len())?;
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Matrix {
            dim,
            entries: Entries::Float(entries),
        })
    }

    /// Builds an exact matrix from integer `(numerator, denominator)` rows.
    pub fn from_ratio_rows(rows: &[&[(i64, i64)]]) -> Result<Self> {
        let dim = rows.len();
        let mut out = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix must be square".into()));
            }
            for &(n, d) in row.iter() {
                if d == 0 {
                    return Err(Error::InvalidInput("zero denominator".into()));
                }
                out.push(BigRational::new(n.into(), d.into()));
            }
        }
        Matrix::from_rational(dim, out)
    }

    /// Builds an exact matrix from integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        let dim = rows.len();
        let mut out = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix must be square".into()));
            }
            out.extend(row.iter().map(|&v| BigRational::from_integer(v.into())));
        }
        Matrix::from_rational(dim, out)
    }

    pub fn from_f64_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut out = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InvalidInput("matrix must be square".into()));
            }
            out.extend_from_slice(row);
        }
        Matrix::from_f64(dim, out)
    }

    pub fn from_scalars(dim: usize, entries: Vec<Scalar>) -> Result<Self> {
        check_len(dim, entries.len())?;
        let mode = entries.first().map(Scalar::mode).unwrap_or(Mode::Rational);
        match mode {
            Mode::Rational => {
                let v = entries
                    .into_iter()
                    .map(|s| match s {
                        Scalar::Rational(r) => Ok(r),
                        Scalar::Float(_) => Err(Error::MixedMode),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matrix::from_rational(dim, v)
            }
            Mode::Float => {
                let v = entries
                    .into_iter()
                    .map(|s| match s {
                        Scalar::Float(x) => Ok(x),
                        Scalar::Rational(_) => Err(Error::MixedMode),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matrix::from_f64(dim, v)
            }
        }
    }

    pub fn identity(dim: usize, mode: Mode) -> Self {
        let entries = match mode {
            Mode::Rational => Entries::Rational(identity_generic(dim)),
            Mode::Float => Entries::Float(identity_generic(dim)),
        };
        Matrix { dim, entries }
    }

    /// Exact diagonal matrix with integer entries.
    pub fn diag_int(values: &[i64]) -> Self {
        let n = values.len();
        let mut v = vec![<BigRational as Zero>::zero(); n * n];
        for (i, &x) in values.iter().enumerate() {
            v[i * n + i] = BigRational::from_integer(x.into());
        }
        Matrix {
            dim: n,
            entries: Entries::Rational(v),
        }
    }

    pub fn diag_f64(values: &[f64]) -> Self {
        let n = values.len();
        let mut v = vec![0.0; n * n];
        for (i, &x) in values.iter().enumerate() {
            v[i * n + i] = x;
        }
        Matrix {
            dim: n,
            entries: Entries::Float(v),
        }
    }

    /// `scale · R_phi`, the planar rotation by `phi` radians, in float mode.
    pub fn scaled_rotation(scale: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Matrix {
            dim: 2,
            entries: Entries::Float(vec![scale * c, -scale * s, scale * s, scale * c]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        match self.entries {
            Entries::Rational(_) => Mode::Rational,
            Entries::Float(_) => Mode::Float,
        }
    }

    pub fn entries(&self) -> &Entries {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match &self.entries {
            Entries::Rational(v) => Scalar::Rational(v[i * self.dim + j].clone()),
            Entries::Float(v) => Scalar::Float(v[i * self.dim + j]),
        }
    }

    /// Row-major `f64` copy of the entries.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.entries {
            Entries::Rational(v) => v.iter().map(rational_to_f64).collect(),
            Entries::Float(v) => v.clone(),
        }
    }

    /// The same matrix in float mode.
    pub fn to_float(&self) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: Entries::Float(self.to_f64_vec()),
        }
    }

    fn check_compatible(&self, other: &Matrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.mode() != other.mode() {
            return Err(Error::MixedMode);
        }
        Ok(())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_compatible(other)?;
        let entries = match (&self.entries, &other.entries) {
            (Entries::Rational(a), Entries::Rational(b)) => Entries::Rational(mul_generic(a, b, self.dim)),
            (Entries::Float(a), Entries::Float(b)) => Entries::Float(mul_generic(a, b, self.dim)),
            _ => unreachable!("modes checked above"),
        };
        Ok(Matrix { dim: self.dim, entries })
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let entries = match &self.entries {
            Entries::Rational(a) => Entries::Rational(inverse_generic(a, self.dim).ok_or(Error::Singular)?),
            Entries::Float(a) => {
                let inv = inverse_generic(a, self.dim).ok_or(Error::Singular)?;
                if inv.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Singular);
                }
                Entries::Float(inv)
            }
        };
        Ok(Matrix { dim: self.dim, entries })
    }

    pub fn det(&self) -> Scalar {
        match &self.entries {
            Entries::Rational(a) => Scalar::Rational(det_generic(a, self.dim)),
            Entries::Float(a) => Scalar::Float(det_generic(a, self.dim)),
        }
    }

    pub fn trace(&self) -> Scalar {
        let mut t = Scalar::zero(self.mode());
        for i in 0..self.dim {
            t = t.add(&self.get(i, i)).expect("same mode");
        }
        t
    }

    pub fn scale(&self, factor: &Scalar) -> Result<Matrix> {
        let v = match &self.entries {
            Entries::Rational(a) => {
                let f = factor.as_rational().ok_or(Error::MixedMode)?;
                Entries::Rational(a.iter().map(|x| x * f).collect())
            }
            Entries::Float(a) => match factor {
                Scalar::Float(f) => Entries::Float(a.iter().map(|x| x * f).collect()),
                Scalar::Rational(_) => return Err(Error::MixedMode),
            },
        };
        Ok(Matrix {
            dim: self.dim,
            entries: v,
        })
    }

    /// `P · self · P^{-1}`.
    pub fn conjugate_by(&self, p: &Matrix) -> Result<Matrix> {
        p.mul(self)?.mul(&p.inverse()?)
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> f64 {
        self.to_f64_vec().iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Operator 2-norm (largest singular value), computed in floating point.
    pub fn spectral_norm(&self) -> f64 {
        spectral_norm_f64(&self.to_f64_vec(), self.dim)
    }

    /// Coefficients `c_0..c_d` (ascending) of `det(λI − M)` for `d ≤ 3`.
    pub fn characteristic_polynomial(&self) -> Result<Vec<Scalar>> {
        let d = self.dim;
        let mode = self.mode();
        let g = |i, j| self.get(i, j);
        let one = Scalar::one(mode);
        match d {
            1 => Ok(vec![g(0, 0).neg(), one]),
            2 => {
                let tr = self.trace();
                Ok(vec![self.det(), tr.neg(), one])
            }
            3 => {
                let tr = self.trace();
                let minor =
                    |a: usize, b: usize| -> Result<Scalar> { g(a, a).mul(&g(b, b))?.sub(&g(a, b).mul(&g(b, a))?) };
                let c1 = minor(0, 1)?.add(&minor(0, 2)?)?.add(&minor(1, 2)?)?;
                Ok(vec![self.det().neg(), c1, tr.neg(), one])
            }
            _ => Err(Error::InvalidInput(format!(
                "characteristic polynomial only implemented for d <= 3, got {d}"
            ))),
        }
    }

    /// Exact entrywise equality for rationals; max-entry deviation `<= tol`
    /// for floats.
    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(match (&self.entries, &other.entries) {
            (Entries::Rational(a), Entries::Rational(b)) => a == b,
            (Entries::Float(a), Entries::Float(b)) => a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol),
            _ => unreachable!(),
        })
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        match &self.entries {
            Entries::Rational(a) => (0..self.dim).all(|i| {
                (0..self.dim).all(|j| {
                    let x = &a[i * self.dim + j];
                    if i == j {
                        x.is_one()
                    } else {
                        Zero::is_zero(x)
                    }
                })
            }),
            Entries::Float(a) => (0..self.dim).all(|i| {
                (0..self.dim).all(|j| {
                    let target = if i == j { 1.0 } else { 0.0 };
                    (a[i * self.dim + j] - target).abs() <= tol
                })
            }),
        }
    }

    /// Hashable exact key (rational mode only).
    pub(crate) fn rational_key(&self) -> Option<&[BigRational]> {
        match &self.entries {
            Entries::Rational(v) => Some(v),
            Entries::Float(_) => None,
        }
    }

    pub fn abs_det_f64(&self) -> f64 {
        match self.det() {
            Scalar::Rational(r) => rational_to_f64(&r.abs()),
            Scalar::Float(x) => x.abs(),
        }
    }
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if len != dim * dim {
        return Err(Error::InvalidInput(format!(
            "expected {} entries for a {dim}x{dim} matrix, found {len}",
            dim * dim
        )));
    }
    Ok(())
}

/// `y = M x` for a row-major `f64` matrix.
#[inline]
pub fn apply_f64(m: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let mut s = 0.0;
        for j in 0..n {
            s += m[i * n + j] * x[j];
        }
        out[i] = s;
    }
}

/// Largest singular value of a row-major `f64` matrix.
pub fn spectral_norm_f64(m: &[f64], n: usize) -> f64 {
    match n {
        1 => m[0].abs(),
        2 => {
            let fro2: f64 = m.iter().map(|x| x * x).sum();
            let det = m[0] * m[3] - m[1] * m[2];
            let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0);
            ((fro2 + disc.sqrt()) / 2.0).sqrt()
        }
        _ => {
            // power iteration on M^T M
            let mut mtm = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    mtm[i * n + j] = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum();
                }
            }
            let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
            let mut w = vec![0.0; n];
            let mut lambda = 0.0;
            for _ in 0..500 {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return 0.0;
                }
                v.iter_mut().for_each(|x| *x /= norm);
                apply_f64(&mtm, &v, &mut w);
                let next: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                std::mem::swap(&mut v, &mut w);
                if (next - lambda).abs() <= 1e-15 * next.abs() {
                    lambda = next;
                    break;
                }
                lambda = next;
            }
            lambda.max(0.0).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_inverse_and_det() {
        let m = Matrix::from_int_rows(&[&[0, 2], &[2, 0]]).unwrap();
        let inv = m.inverse().unwrap();
        let expected = Matrix::from_ratio_rows(&[&[(0, 1), (1, 2)], &[(1, 2), (0, 1)]]).unwrap();
        assert_eq!(inv, expected);
        assert_eq!(m.det(), Scalar::from_int(-4));
        assert!(m.mul(&inv).unwrap().is_identity(0.0));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[2, 4]]).unwrap();
        assert_eq!(m.inverse(), Err(Error::Singular));
        let f = Matrix::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(f.inverse().is_err());
    }

    #[test]
    fn mixed_mode_products_are_rejected() {
        let a = Matrix::diag_int(&[2, 2]);
        let b = Matrix::diag_f64(&[2.0, 2.0]);
        assert_eq!(a.mul(&b), Err(Error::MixedMode));
    }

    #[test]
    fn characteristic_polynomials() {
        let m = Matrix::from_int_rows(&[&[1, 2], &[3, 4]]).unwrap();
        let cp = m.characteristic_polynomial().unwrap();
        assert_eq!(
            cp,
            vec![Scalar::from_int(-2), Scalar::from_int(-5), Scalar::from_int(1)]
        );
        let m3 = Matrix::diag_int(&[2, 3, 5]);
        let cp = m3.characteristic_polynomial().unwrap();
        // (λ-2)(λ-3)(λ-5) = λ^3 - 10λ^2 + 31λ - 30
        assert_eq!(
            cp,
            vec![
                Scalar::from_int(-30),
                Scalar::from_int(31),
                Scalar::from_int(-10),
                Scalar::from_int(1)
            ]
        );
    }

    #[test]
    fn spectral_norms() {
        let r = Matrix::scaled_rotation(1.0, 1.0);
        assert!((r.spectral_norm() - 1.0).abs() < 1e-14);
        let d = Matrix::diag_f64(&[3.0, -5.0, 0.5]);
        assert!((d.spectral_norm() - 5.0).abs() < 1e-10);
        let s = Matrix::from_f64_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        // golden ratio
        assert!((s.spectral_norm() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn float_det_with_pivoting() {
        let m = Matrix::from_f64_rows(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 3.0], &[4.0, -3.0, 8.0]]).unwrap();
        assert!((m.det().to_f64() - (-2.0)).abs() < 1e-12);
    }
}
