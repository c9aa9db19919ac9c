//! Coefficient sequences `c_{j,k}`: finitely supported maps, or families
//! given by a per-scale membership predicate over an index box.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finitely supported sequence. Zero values are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSequence {
    dim: usize,
    scales: BTreeMap<i64, BTreeMap<Vec<i64>, Complex64>>,
}

impl ExplicitSequence {
    pub fn new(dim: usize) -> Self {
        ExplicitSequence {
            dim,
            scales: BTreeMap::new(),
        }
    }

    /// `δ_{(j, k)}` with value 1.
    pub fn delta(j: i64, k: Vec<i64>) -> Self {
        let mut s = Self::new(k.len());
        s.insert(j, k, 1.0).expect("dimension matches");
        s
    }

    /// `c_{j,k} = a_k` on a single scale.
    pub fn single_scale(dim: usize, j: i64, a: impl IntoIterator<Item = (Vec<i64>, f64)>) -> Result<Self> {
        let mut s = Self::new(dim);
        for (k, v) in a {
            s.insert(j, k, v)?;
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sets `c_{j,k}`; a zero value removes the entry.
    pub fn insert(&mut self, j: i64, k: Vec<i64>, value: impl Into<Complex64>) -> Result<()> {
        if k.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: k.len(),
            });
        }
        let v = value.into();
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::InvalidInput(format!(
                "coefficient at ({j}, {k:?}) is not finite"
            )));
        }
        if v == Complex64::new(0.0, 0.0) {
            if let Some(level) = self.scales.get_mut(&j) {
                level.remove(&k);
                if level.is_empty() {
                    self.scales.remove(&j);
                }
            }
        } else {
            self.scales.entry(j).or_default().insert(k, v);
        }
        Ok(())
    }

    pub fn get(&self, j: i64, k: &[i64]) -> Complex64 {
        self.scales.get(&j).and_then(|l| l.get(k)).copied().unwrap_or_default()
    }

    pub fn scales(&self) -> Vec<i64> {
        self.scales.keys().copied().collect()
    }

    /// `(j_min, j_max)`, or `None` when empty.
    pub fn scale_range(&self) -> Option<(i64, i64)> {
        Some((*self.scales.keys().next()?, *self.scales.keys().next_back()?))
    }

    pub fn indices(&self, j: i64) -> Vec<&Vec<i64>> {
        self.scales.get(&j).map(|l| l.keys().collect()).unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.scales.values().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Vec<i64>, Complex64)> + '_ {
        self.scales
            .iter()
            .flat_map(|(j, l)| l.iter().map(move |(k, v)| (*j, k, *v)))
    }

    pub fn scaled(&self, lambda: Complex64) -> Self {
        let mut out = Self::new(self.dim);
        for (j, k, v) in self.iter() {
            out.insert(j, k.clone(), v * lambda).expect("same dimension");
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut out = self.clone();
        for (j, k, v) in other.iter() {
            let s = out.get(j, k) + v;
            out.insert(j, k.clone(), s)?;
        }
        Ok(out)
    }

    /// Entries with `keep(j, k)` true.
    pub fn filter(&self, mut keep: impl FnMut(i64, &[i64]) -> bool) -> Self {
        let mut out = Self::new(self.dim);
        for (j, k, v) in self.iter() {
            if keep(j, k) {
                out.insert(j, k.clone(), v).expect("same dimension");
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: SequenceDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.to_sequence()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SequenceDocument::from_sequence(self)).expect("serializable")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub j: i64,
    pub k: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// `{"entries": [{"j": 0, "k": [0, 0], "re": 1.0, "im": 0.0}, ...]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDocument {
    #[serde(default)]
    pub dim: Option<usize>,
    pub entries: Vec<SequenceEntry>,
}

impl SequenceDocument {
    pub fn to_sequence(&self) -> Result<ExplicitSequence> {
        let dim = match (self.dim, self.entries.first()) {
            (Some(d), _) => d,
            (None, Some(e)) => e.k.len(),
            (None, None) => return Err(Error::Parse("empty sequence needs an explicit \"dim\"".into())),
        };
        if dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut s = ExplicitSequence::new(dim);
        for e in &self.entries {
            let prev = s.get(e.j, &e.k);
            s.insert(e.j, e.k.clone(), prev + Complex64::new(e.re, e.im))?;
        }
        Ok(s)
    }

    pub fn from_sequence(s: &ExplicitSequence) -> Self {
        SequenceDocument {
            dim: Some(s.dim),
            entries: s
                .iter()
                .map(|(j, k, v)| SequenceEntry {
                    j,
                    k: k.clone(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }
}

pub type Membership = Arc<dyn Fn(&[i64]) -> bool + Send + Sync>;
pub type ModulusFn = Arc<dyn Fn(&[i64]) -> f64 + Send + Sync>;

/// One scale of an implicit family: members are the `k` in the inclusive
/// index box `lo..=hi` accepted by `member`, with modulus `modulus(k)`.
#[derive(Clone)]
pub struct ImplicitScale {
    pub j: i64,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub member: Membership,
    pub modulus: ModulusFn,
    /// Exact maximum of `modulus` over members.
    pub max_modulus: f64,
}

impl fmt::Debug for ImplicitScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImplicitScale")
            .field("j", &self.j)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("max_modulus", &self.max_modulus)
            .finish()
    }
}

impl ImplicitScale {
    /// Constant modulus `value` on the members.
    pub fn constant(j: i64, lo: Vec<i64>, hi: Vec<i64>, value: f64, member: Membership) -> Self {
        ImplicitScale {
            j,
            lo,
            hi,
            member,
            modulus: Arc::new(move |_| value),
            max_modulus: value.abs(),
        }
    }

    pub fn index_count(&self) -> u128 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| if b < a { 0 } else { (b - a + 1) as u128 })
            .product()
    }

    pub fn in_box(&self, k: &[i64]) -> bool {
        k.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| a <= x && x <= b)
    }

    pub fn value(&self, k: &[i64]) -> f64 {
        if self.in_box(k) && (self.member)(k) {
            (self.modulus)(k)
        } else {
            0.0
        }
    }
}

/// Predicate-defined family. Coefficients outside the declared scales and
/// index boxes are zero.
#[derive(Debug, Clone)]
pub struct ImplicitSequence {
    dim: usize,
    scales: Vec<ImplicitScale>,
}

impl ImplicitSequence {
    pub fn new(dim: usize, mut scales: Vec<ImplicitScale>) -> Result<Self> {
        for s in &scales {
            if s.lo.len() != dim || s.hi.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: s.lo.len(),
                });
            }
            if !(s.max_modulus >= 0.0) || !s.max_modulus.is_finite() {
                return Err(Error::InvalidInput(format!("scale {} has an invalid max modulus", s.j)));
            }
        }
        scales.sort_by_key(|s| s.j);
        if scales.windows(2).any(|w| w[0].j == w[1].j) {
            return Err(Error::InvalidInput("implicit scales must be distinct".into()));
        }
        Ok(ImplicitSequence { dim, scales })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scales(&self) -> &[ImplicitScale] {
        &self.scales
    }

    pub fn modulus(&self, j: i64, k: &[i64]) -> f64 {
        self.scales.iter().find(|s| s.j == j).map_or(0.0, |s| s.value(k))
    }

    /// Enumerates all members. Fails when the index boxes hold more than
    /// `budget` indices.
    pub fn materialize(&self, budget: usize) -> Result<ExplicitSequence> {
        let total: u128 = self.scales.iter().map(|s| s.index_count()).sum();
        if total > budget as u128 {
            return Err(Error::Capacity {
                what: "implicit sequence indices",
                count: total.min(usize::MAX as u128) as usize,
                budget,
            });
        }
        let mut out = ExplicitSequence::new(self.dim);
        for s in &self.scales {
            if s.index_count() == 0 {
                continue;
            }
            let mut k = s.lo.clone();
            loop {
                let v = s.value(&k);
                if v != 0.0 {
                    out.insert(s.j, k.clone(), v)?;
                }
                // odometer over the box
                let mut i = 0;
                while i < self.dim {
                    if k[i] < s.hi[i] {
                        k[i] += 1;
                        break;
                    }
                    k[i] = s.lo[i];
                    i += 1;
                }
                if i == self.dim {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Samples indices in a margin around each index box and checks that
    /// the predicate accepts none of them, and that sampled members stay
    /// below the declared maximum. Returns the number of violations.
    pub fn spot_check<R: Rng>(&self, rng: &mut R, samples: usize) -> usize {
        let mut bad = 0;
        for s in &self.scales {
            if s.index_count() == 0 {
                continue;
            }
            for _ in 0..samples {
                let k: Vec<i64> =
                    s.lo.iter()
                        .zip(&s.hi)
                        .map(|(a, b)| {
                            let w = (b - a + 1).max(1);
                            rng.gen_range(a - w..=b + w)
                        })
                        .collect();
                let inside = s.in_box(&k);
                if !inside && (s.member)(&k) && (s.modulus)(&k) != 0.0 {
                    bad += 1;
                }
                if inside && s.value(&k) > s.max_modulus * (1.0 + 1e-12) {
                    bad += 1;
                }
            }
        }
        bad
    }
}

/// Either kind of coefficient sequence.
#[derive(Debug, Clone)]
pub enum CoefficientSequence {
    Explicit(ExplicitSequence),
    Implicit(ImplicitSequence),
}

impl CoefficientSequence {
    pub fn dim(&self) -> usize {
        match self {
            CoefficientSequence::Explicit(s) => s.dim(),
            CoefficientSequence::Implicit(s) => s.dim(),
        }
    }

    pub fn as_explicit(&self) -> Option<&ExplicitSequence> {
        match self {
            CoefficientSequence::Explicit(s) => Some(s),
            CoefficientSequence::Implicit(_) => None,
        }
    }

    pub fn modulus(&self, j: i64, k: &[i64]) -> f64 {
        match self {
            CoefficientSequence::Explicit(s) => s.get(j, k).norm(),
            CoefficientSequence::Implicit(s) => s.modulus(j, k),
        }
    }
}

impl From<ExplicitSequence> for CoefficientSequence {
    fn from(s: ExplicitSequence) -> Self {
        CoefficientSequence::Explicit(s)
    }
}

impl From<ImplicitSequence> for CoefficientSequence {
    fn from(s: ImplicitSequence) -> Self {
        CoefficientSequence::Implicit(s)
    }
}
