//! Pointwise evaluation of the weighted indicator stack
//! `x ↦ (Σ_j Σ_k (|det A|^{-j(α+1/2)} |c_{j,k}| 1_{Q_{j,k}}(x))^q)^{1/q}`.

use rustc_hash::FxHashMap;

use super::sequence::{CoefficientSequence, ImplicitScale};
use crate::error::{Error, Result};
use crate::matrices::{apply_f64, ExpansiveMatrix};
use crate::orbit::SpaceParams;

pub(crate) enum Lookup {
    /// `k ↦ (weight |c_{j,k}|)^q`, or `weight |c_{j,k}|` for `q = ∞`.
    Explicit(FxHashMap<Vec<i64>, f64>),
    Implicit(ImplicitScale),
}

pub(crate) struct ScaleData {
    pub j: i64,
    /// Row-major `A^{-j}`.
    pub minv: Vec<f64>,
    /// Row-major `A^j`.
    pub fwd: Vec<f64>,
    /// `|det A|^{-j(α+1/2)}`.
    pub weight: f64,
    /// Inclusive index box holding every nonzero coefficient.
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub max_modulus: f64,
    pub lookup: Lookup,
}

impl ScaleData {
    /// Contribution of `Q_{j,k}` to the raw stack value.
    #[inline]
    pub fn term(&self, k: &[i64], q: f64) -> f64 {
        if !k
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| a <= x && x <= b)
        {
            return 0.0;
        }
        match &self.lookup {
            Lookup::Explicit(m) => m.get(k).copied().unwrap_or(0.0),
            Lookup::Implicit(s) => {
                if (s.member)(k) {
                    raise(self.weight * (s.modulus)(k), q)
                } else {
                    0.0
                }
            }
        }
    }

    /// Volume of the parallelepiped `A^j([lo, hi + 1])`.
    pub fn box_volume(&self, det_abs: f64) -> f64 {
        let count: f64 = self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1) as f64).product();
        count * det_abs.powf(self.j as f64)
    }

    /// Origin and edge matrix of `A^j([lo, hi + 1])`.
    pub fn support_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.lo.len();
        let lo: Vec<f64> = self.lo.iter().map(|&v| v as f64).collect();
        let mut origin = vec![0.0; d];
        apply_f64(&self.fwd, &lo, &mut origin);
        let mut edges = self.fwd.clone();
        for c in 0..d {
            let w = (self.hi[c] - self.lo[c] + 1) as f64;
            for r in 0..d {
                edges[r * d + c] *= w;
            }
        }
        (origin, edges)
    }
}

/// Precomputed per-scale data for one `(sequence, space)` pair.
pub struct StackEvaluator {
    pub(crate) dim: usize,
    pub(crate) q: f64,
    pub(crate) det_abs: f64,
    pub(crate) scales: Vec<ScaleData>,
}

impl StackEvaluator {
    pub fn new(c: &CoefficientSequence, s: &SpaceParams) -> Result<Self> {
        let d = s.dim();
        if c.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.dim(),
            });
        }
        let a = &s.matrix;
        let shift = s.alpha + 0.5;
        let q = s.q.to_f64();
        let mk = |j: i64, lo: Vec<i64>, hi: Vec<i64>, max_modulus: f64, lookup: Lookup| ScaleData {
            j,
            minv: a.power_f64(-j).to_vec(),
            fwd: a.power_f64(j).to_vec(),
            weight: a.det_abs_pow(-(j as f64) * shift),
            lo,
            hi,
            max_modulus,
            lookup,
        };
        let scales = match c {
            CoefficientSequence::Explicit(e) => e
                .scales()
                .into_iter()
                .map(|j| {
                    let mut lo = vec![i64::MAX; d];
                    let mut hi = vec![i64::MIN; d];
                    let weight = a.det_abs_pow(-(j as f64) * shift);
                    let mut map = FxHashMap::default();
                    let mut max_modulus: f64 = 0.0;
                    for k in e.indices(j) {
                        for i in 0..d {
                            lo[i] = lo[i].min(k[i]);
                            hi[i] = hi[i].max(k[i]);
                        }
                        let m = e.get(j, k).norm();
                        max_modulus = max_modulus.max(m);
                        map.insert(k.clone(), raise(weight * m, q));
                    }
                    mk(j, lo, hi, max_modulus, Lookup::Explicit(map))
                })
                .collect(),
            CoefficientSequence::Implicit(im) => im
                .scales()
                .iter()
                .filter(|sc| sc.index_count() > 0 && sc.max_modulus > 0.0)
                .map(|sc| {
                    mk(
                        sc.j,
                        sc.lo.clone(),
                        sc.hi.clone(),
                        sc.max_modulus,
                        Lookup::Implicit(sc.clone()),
                    )
                })
                .collect(),
        };
        Ok(StackEvaluator {
            dim: d,
            q: s.q.to_f64(),
            det_abs: a.det_abs(),
            scales,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn scale_range(&self) -> Option<(i64, i64)> {
        Some((self.scales.first()?.j, self.scales.last()?.j))
    }

    /// `Σ_{j <= cap} Σ_k (w_j |c_{j,k}| 1_Q(x))^q`, or the max for `q = ∞`.
    #[inline]
    pub fn raw(&self, x: &[f64], cap: Option<i64>) -> f64 {
        self.raw_capped(x, cap).0
    }

    /// Uncapped raw value and the number of scales contributing at `x`.
    #[inline]
    pub fn raw_and_hits(&self, x: &[f64]) -> (f64, usize) {
        self.raw_capped(x, None)
    }

    /// Like [`raw_and_hits`](Self::raw_and_hits) but ignoring the scale at
    /// position `skip`.
    #[inline]
    pub(crate) fn raw_and_hits_without(&self, x: &[f64], skip: usize) -> (f64, usize) {
        self.raw_inner(x, None, Some(skip))
    }

    fn raw_capped(&self, x: &[f64], cap: Option<i64>) -> (f64, usize) {
        self.raw_inner(x, cap, None)
    }

    fn raw_inner(&self, x: &[f64], cap: Option<i64>, skip: Option<usize>) -> (f64, usize) {
        let d = self.dim;
        let mut ua = [0.0f64; 8];
        let mut ka = [0i64; 8];
        let (mut ub, mut kb);
        let (u, k): (&mut [f64], &mut [i64]) = if d <= 8 {
            (&mut ua[..d], &mut ka[..d])
        } else {
            ub = vec![0.0; d];
            kb = vec![0; d];
            (&mut ub[..], &mut kb[..])
        };
        let mut acc = 0.0f64;
        let mut hits = 0;
        for (i, s) in self.scales.iter().enumerate() {
            if cap.is_some_and(|c| s.j > c) {
                break;
            }
            if skip == Some(i) {
                continue;
            }
            apply_f64(&s.minv, x, u);
            for i in 0..d {
                k[i] = u[i].floor() as i64;
            }
            let t = s.term(k, self.q);
            if t == 0.0 {
                continue;
            }
            hits += 1;
            if self.q.is_infinite() {
                acc = acc.max(t);
            } else {
                acc += t;
            }
        }
        (acc, hits)
    }

    /// Adds one term to a raw value.
    #[inline]
    pub(crate) fn join(&self, raw: f64, term: f64) -> f64 {
        if self.q.is_infinite() {
            raw.max(term)
        } else {
            raw + term
        }
    }

    /// Stack value from a raw value.
    #[inline]
    pub fn root(&self, raw: f64) -> f64 {
        if self.q.is_infinite() {
            raw
        } else {
            pow(raw, 1.0 / self.q)
        }
    }

    /// `root(raw)^p` with a single power.
    #[inline]
    pub fn root_pow(&self, raw: f64, p: f64) -> f64 {
        if self.q.is_infinite() {
            pow(raw, p)
        } else {
            pow(raw, p / self.q)
        }
    }

    /// The stack value `(raw)^{1/q}`.
    #[inline]
    pub fn value(&self, x: &[f64], cap: Option<i64>) -> f64 {
        self.root(self.raw(x, cap))
    }

    /// Number of scales whose support box `A^j([lo, hi+1))` holds `x`.
    pub(crate) fn cover_count(&self, x: &[f64]) -> usize {
        let d = self.dim;
        let mut u = vec![0.0; d];
        self.scales
            .iter()
            .filter(|s| {
                apply_f64(&s.minv, x, &mut u);
                (0..d).all(|i| {
                    let v = u[i].floor() as i64;
                    s.lo[i] <= v && v <= s.hi[i]
                })
            })
            .count()
    }
}

/// `x^e` with the common exponents done without `powf`.
#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 0.5 {
        x.sqrt()
    } else {
        x.powf(e)
    }
}

/// `w^q`, or `w` itself for `q = ∞`.
#[inline]
fn raise(w: f64, q: f64) -> f64 {
    if q.is_infinite() {
        w
    } else {
        pow(w, q)
    }
}

/// Stack value at `x`, summing only scales `j <= j_cap` when a cap is given.
pub fn stack_value(c: &CoefficientSequence, s: &SpaceParams, x: &[f64], j_cap: Option<i64>) -> Result<f64> {
    if x.len() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: x.len(),
        });
    }
    Ok(StackEvaluator::new(c, s)?.value(x, j_cap))
}

/// `|det A|^{-j(α+1/2)}`.
pub fn scale_weight(a: &ExpansiveMatrix, alpha: f64, j: i64) -> f64 {
    a.det_abs_pow(-(j as f64) * (alpha + 0.5))
}
