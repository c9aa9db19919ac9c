//! Finiteness of the orbit `{B^j A^{-j} : j ∈ ℤ}`, its decomposition into
//! residue classes, and classification of when two parameter sets describe
//! the same sequence space.
//!
//! The orbit is finite exactly when `A^m = B^m` for some `m >= 1`: a repeat
//! `D_j = D_{j'}` with `j < j'` gives `B^{j'-j} = A^{j'-j}`, and conversely
//! `A^m = B^m` makes `j ↦ D_j` periodic with period `m`.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrices::{parse_big_rational, rational_to_f64, ExpansiveMatrix, Matrix, MatrixDocument, Mode};

pub const DEFAULT_M_MAX: u32 = 64;
pub const DEFAULT_ORBIT_TOL: f64 = 1e-9;
const LOG_IDENTITY_TOL: f64 = 1e-9;

/// An integrability or summability exponent in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn finite(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator in exponent".into()));
        }
        let r = Rational64::new(num, den);
        if r <= Rational64::zero() {
            return Err(Error::InvalidInput(format!("exponent must be positive, got {r}")));
        }
        Ok(Exponent::Finite(r))
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::finite(n, 1)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn recip_f64(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.denom() as f64 / *r.numer() as f64,
            Exponent::Infinite => 0.0,
        }
    }

    /// `1/p` exactly.
    pub fn recip_exact(&self) -> BigRational {
        match self {
            Exponent::Finite(r) => BigRational::new(BigInt::from(*r.denom()), BigInt::from(*r.numer())),
            Exponent::Infinite => BigRational::zero(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(Exponent::Infinite);
        }
        let r = parse_big_rational(t)?;
        let (n, d) = (r.numer().to_i64(), r.denom().to_i64());
        match (n, d) {
            (Some(n), Some(d)) => Exponent::finite(n, d),
            _ => Err(Error::Parse(format!("exponent {t:?} is out of range"))),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let s = match v {
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("bad exponent {other}"))),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One space: dilation matrix together with smoothness `α` and exponents
/// `p`, `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceParams {
    pub matrix: ExpansiveMatrix,
    pub alpha: f64,
    pub p: Exponent,
    pub q: Exponent,
}

impl SpaceParams {
    pub fn new(matrix: ExpansiveMatrix, alpha: f64, p: Exponent, q: Exponent) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be finite, got {alpha}")));
        }
        Ok(SpaceParams { matrix, alpha, p, q })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `α + 1/2 - 1/p`, the exponent of `|det A|` in the single-scale law.
    pub fn det_exponent(&self) -> f64 {
        self.alpha + 0.5 - self.p.recip_f64()
    }

    fn det_exponent_exact(&self) -> Option<BigRational> {
        let a = BigRational::from_float(self.alpha)?;
        Some(a + BigRational::new(1.into(), 2.into()) - self.p.recip_exact())
    }
}

/// Serialized form: `{"matrix": {...}, "alpha": 0.0, "p": "2", "q": "inf"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceDocument {
    pub matrix: MatrixDocument,
    #[serde(default)]
    pub alpha: Value,
    pub p: Exponent,
    pub q: Exponent,
}

impl SpaceDocument {
    pub fn to_params(&self) -> Result<SpaceParams> {
        let alpha = match &self.alpha {
            Value::Null => 0.0,
            Value::Number(n) => n.as_f64().unwrap_or(f64::NAN),
            Value::String(s) => rational_to_f64(&parse_big_rational(s)?),
            other => return Err(Error::Parse(format!("bad alpha {other}"))),
        };
        SpaceParams::new(ExpansiveMatrix::new(self.matrix.to_matrix()?)?, alpha, self.p, self.q)
    }

    pub fn from_params(s: &SpaceParams) -> Self {
        SpaceDocument {
            matrix: MatrixDocument::from_matrix(s.matrix.matrix()),
            alpha: serde_json::Number::from_f64(s.alpha)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            p: s.p,
            q: s.q,
        }
    }
}

pub fn parse_space_json(text: &str) -> Result<SpaceParams> {
    let doc: SpaceDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_params()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrbitVerdict {
    /// Minimal `m` with `A^m = B^m`. `tol` is set for float-mode decisions.
    Finite { period: u32, tol: Option<f64> },
    /// No `m <= m_max` works; `D_0, ..., D_{m_max}` are then pairwise
    /// distinct, which is the reported `witness_count`.
    InfiniteUpTo {
        m_max: u32,
        witness_count: u64,
        tol: Option<f64>,
    },
}

impl OrbitVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self, OrbitVerdict::Finite { .. })
    }

    pub fn period(&self) -> Option<u32> {
        match self {
            OrbitVerdict::Finite { period, .. } => Some(*period),
            OrbitVerdict::InfiniteUpTo { .. } => None,
        }
    }
}

/// Brings both matrices to a common mode; float wins.
fn common_mode<'a>(
    a: &'a ExpansiveMatrix,
    b: &'a ExpansiveMatrix,
) -> Result<(Cow<'a, ExpansiveMatrix>, Cow<'a, ExpansiveMatrix>)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let lift = |m: &'a ExpansiveMatrix| -> Result<Cow<'a, ExpansiveMatrix>> {
        if m.mode() == Mode::Float {
            Ok(Cow::Borrowed(m))
        } else {
            Ok(Cow::Owned(ExpansiveMatrix::new(m.matrix().to_float())?))
        }
    };
    if a.mode() == b.mode() {
        Ok((Cow::Borrowed(a), Cow::Borrowed(b)))
    } else {
        Ok((lift(a)?, lift(b)?))
    }
}

/// Equality of matrix powers: exact for rationals, and relative to the
/// larger entry for floats so that large powers are compared fairly.
fn powers_equal(x: &Matrix, y: &Matrix, tol: f64) -> Result<bool> {
    match x.mode() {
        Mode::Rational => x.approx_eq(y, 0.0),
        Mode::Float => {
            let scale = x.max_abs_entry().max(y.max_abs_entry()).max(1.0);
            x.approx_eq(y, tol * scale)
        }
    }
}

pub fn orbit_is_finite(a: &ExpansiveMatrix, b: &ExpansiveMatrix, m_max: u32) -> Result<OrbitVerdict> {
    orbit_is_finite_with_tol(a, b, m_max, DEFAULT_ORBIT_TOL)
}

pub fn orbit_is_finite_with_tol(
    a: &ExpansiveMatrix,
    b: &ExpansiveMatrix,
    m_max: u32,
    tol: f64,
) -> Result<OrbitVerdict> {
    if m_max == 0 {
        return Err(Error::InvalidInput("m_max must be positive".into()));
    }
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    let (a, b) = common_mode(a, b)?;
    let float_tol = (a.mode() == Mode::Float).then_some(tol);
    let mut am = Matrix::identity(a.dim(), a.mode());
    let mut bm = am.clone();
    for m in 1..=m_max {
        am = am.mul(a.matrix())?;
        bm = bm.mul(b.matrix())?;
        if powers_equal(&am, &bm, tol)? {
            return Ok(OrbitVerdict::Finite {
                period: m,
                tol: float_tol,
            });
        }
    }
    Ok(OrbitVerdict::InfiniteUpTo {
        m_max,
        witness_count: u64::from(m_max) + 1,
        tol: float_tol,
    })
}

/// `D_j = B^j A^{-j}` for `j = -range..=range`, by the recurrences
/// `D_{j+1} = B D_j A^{-1}` and `D_{j-1} = B^{-1} D_j A`.
fn orbit_window(a: &ExpansiveMatrix, b: &ExpansiveMatrix, range: u32) -> Result<Vec<Matrix>> {
    let id = Matrix::identity(a.dim(), a.mode());
    let mut up = Vec::with_capacity(range as usize);
    let mut cur = id.clone();
    for _ in 0..range {
        cur = b.matrix().mul(&cur)?.mul(a.inverse())?;
        up.push(cur.clone());
    }
    let mut out = Vec::with_capacity(2 * range as usize + 1);
    cur = id.clone();
    let mut down = Vec::with_capacity(range as usize);
    for _ in 0..range {
        cur = b.inverse().mul(&cur)?.mul(a.matrix())?;
        down.push(cur.clone());
    }
    out.extend(down.into_iter().rev());
    out.push(id);
    out.extend(up);
    Ok(out)
}

/// Number of pairwise distinct `B^j A^{-j}` with `|j| <= j_range`, compared
/// with [`crate::matrices::matrix_equal`].
pub fn brute_force_orbit_count(a: &ExpansiveMatrix, b: &ExpansiveMatrix, j_range: u32, tol: f64) -> Result<usize> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
    }
    let (a, b) = common_mode(a, b)?;
    let window = orbit_window(&a, &b, j_range)?;
    if a.mode() == Mode::Rational {
        let mut seen: HashMap<Vec<BigRational>, ()> = HashMap::new();
        for m in &window {
            seen.insert(m.rational_key().expect("rational").to_vec(), ());
        }
        return Ok(seen.len());
    }
    let mut reps: Vec<&Matrix> = Vec::new();
    for m in &window {
        let mut found = false;
        for r in &reps {
            if crate::matrices::matrix_equal(m, r, tol)? {
                found = true;
                break;
            }
        }
        if !found {
            reps.push(m);
        }
    }
    Ok(reps.len())
}

/// The finite orbit `{M_1, ..., M_N}` together with the residue classes mod
/// the period on which each `M_t` is attained.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitDecomposition {
    pub period: u32,
    pub representatives: Vec<Matrix>,
    /// `classes[t]` lists the residues `r ∈ [0, period)` with `D_j = M_t`
    /// for all `j ≡ r`.
    pub classes: Vec<Vec<u32>>,
    pub tol: Option<f64>,
}

impl OrbitDecomposition {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    /// Index `t` with `j ∈ J_t`.
    pub fn class_of(&self, j: i64) -> usize {
        let r = j.rem_euclid(i64::from(self.period)) as u32;
        self.classes
            .iter()
            .position(|c| c.contains(&r))
            .expect("classes partition the residues")
    }

    pub fn representative_for(&self, j: i64) -> &Matrix {
        &self.representatives[self.class_of(j)]
    }
}

pub fn orbit_decomposition(a: &ExpansiveMatrix, b: &ExpansiveMatrix, m_max: u32) -> Result<OrbitDecomposition> {
    orbit_decomposition_with_tol(a, b, m_max, DEFAULT_ORBIT_TOL)
}

pub fn orbit_decomposition_with_tol(
    a: &ExpansiveMatrix,
    b: &ExpansiveMatrix,
    m_max: u32,
    tol: f64,
) -> Result<OrbitDecomposition> {
    let verdict = orbit_is_finite_with_tol(a, b, m_max, tol)?;
    let (period, vtol) = match verdict {
        OrbitVerdict::Finite { period, tol } => (period, tol),
        OrbitVerdict::InfiniteUpTo { m_max, .. } => {
            return Err(Error::InvalidState(format!(
                "orbit is not finite up to m_max = {m_max}"
            )))
        }
    };
    let (a, b) = common_mode(a, b)?;
    let mut representatives: Vec<Matrix> = Vec::new();
    let mut classes: Vec<Vec<u32>> = Vec::new();
    let mut d = Matrix::identity(a.dim(), a.mode());
    for r in 0..period {
        if r > 0 {
            d = b.matrix().mul(&d)?.mul(a.inverse())?;
        }
        let mut hit = None;
        for (t, m) in representatives.iter().enumerate() {
            if powers_equal(&d, m, tol)? {
                hit = Some(t);
                break;
            }
        }
        match hit {
            Some(t) => classes[t].push(r),
            None => {
                representatives.push(d.clone());
                classes.push(vec![r]);
            }
        }
    }
    Ok(OrbitDecomposition {
        period,
        representatives,
        classes,
        tol: vtol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    pub m_max: u32,
    /// Report `Unknown` instead of `NotEqual` when the orbit search up to
    /// `m_max` is inconclusive and decides the outcome.
    pub m_max_insufficient: bool,
    pub tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            m_max: DEFAULT_M_MAX,
            m_max_insufficient: false,
            tol: DEFAULT_ORBIT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum EqualReason {
    OrbitFinite { period: u32 },
    DeterminantIdentity { exact: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotEqualReason {
    IntegrabilityDiffers,
    /// `α` or `q` differ and the `p = q` determinant clause does not apply.
    ExponentsDiffer {
        determinant_clause_checked: bool,
    },
    OrbitInfinite {
        m_max: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Classification {
    Equal(EqualReason),
    NotEqual(NotEqualReason),
    Unknown { m_max: u32 },
}

impl Classification {
    pub fn same_verdict(&self, other: &Classification) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub classification: Classification,
    /// Set when any matrix is in float mode.
    pub numerical: bool,
}

/// Finds `g` and positive integers `a, b` with `x = g^a`, `y = g^b`, for
/// rationals `x, y > 1`, by a multiplicative Euclidean algorithm.
fn common_base(x: &BigRational, y: &BigRational, depth: u32) -> Option<(BigRational, u64, u64)> {
    if depth == 0 || x <= &BigRational::one() || y <= &BigRational::one() {
        return None;
    }
    if x.numer().bits().max(x.denom().bits()) > 4096 {
        return None;
    }
    if x == y {
        return Some((x.clone(), 1, 1));
    }
    if x < y {
        let (g, b, a) = common_base(y, x, depth)?;
        return Some((g, a, b));
    }
    let z = x / y;
    let (g, a, b) = common_base(&z, y, depth - 1)?;
    Some((g, a + b, b))
}

/// Whether `|det A|^{e_A} = |det B|^{e_B}` with `e = α + 1/2 - 1/p`.
/// Returns the answer and whether it was decided exactly.
pub fn determinant_identity(sa: &SpaceParams, sb: &SpaceParams) -> (bool, bool) {
    let da = sa.matrix.det().as_rational().map(|r| r.abs());
    let db = sb.matrix.det().as_rational().map(|r| r.abs());
    if let (Some(da), Some(db), Some(ea), Some(eb)) = (da, db, sa.det_exponent_exact(), sb.det_exponent_exact()) {
        if ea.is_zero() || eb.is_zero() {
            return (ea.is_zero() && eb.is_zero(), true);
        }
        if let Some((_, a, b)) = common_base(&da, &db, 128) {
            let lhs = ea * BigRational::from_integer(a.into());
            let rhs = eb * BigRational::from_integer(b.into());
            return (lhs == rhs, true);
        }
    }
    let lhs = sa.det_exponent() * sa.matrix.det_abs().ln();
    let rhs = sb.det_exponent() * sb.matrix.det_abs().ln();
    ((lhs - rhs).abs() <= LOG_IDENTITY_TOL, false)
}

pub fn classify_spaces(sa: &SpaceParams, sb: &SpaceParams, opts: &ClassifyOptions) -> Result<ClassifyReport> {
    if sa.dim() != sb.dim() {
        return Err(Error::DimensionMismatch {
            expected: sa.dim(),
            found: sb.dim(),
        });
    }
    let numerical = sa.matrix.mode() == Mode::Float || sb.matrix.mode() == Mode::Float;
    let report = |classification| ClassifyReport {
        classification,
        numerical,
    };
    if sa.p != sb.p {
        return Ok(report(Classification::NotEqual(NotEqualReason::IntegrabilityDiffers)));
    }
    let pq_case = sa.p == sa.q && sb.q == sa.p;
    if pq_case {
        let (holds, exact) = determinant_identity(sa, sb);
        if holds {
            return Ok(report(Classification::Equal(EqualReason::DeterminantIdentity {
                exact,
            })));
        }
    }
    if sa.alpha != sb.alpha || sa.q != sb.q {
        return Ok(report(Classification::NotEqual(NotEqualReason::ExponentsDiffer {
            determinant_clause_checked: pq_case,
        })));
    }
    let c = match orbit_is_finite_with_tol(&sa.matrix, &sb.matrix, opts.m_max, opts.tol)? {
        OrbitVerdict::Finite { period, .. } => Classification::Equal(EqualReason::OrbitFinite { period }),
        OrbitVerdict::InfiniteUpTo { m_max, .. } if opts.m_max_insufficient => Classification::Unknown { m_max },
        OrbitVerdict::InfiniteUpTo { m_max, .. } => Classification::NotEqual(NotEqualReason::OrbitInfinite { m_max }),
    };
    Ok(report(c))
}
