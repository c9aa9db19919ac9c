//! Coefficient families with known norm laws.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::separation::SeparationData;
use crate::error::{Error, Result};
use crate::geometry::{
    cube_of_point, cube_polytope, cubes_meeting_region, ConvexPolygon, ConvexPolytope, Coord, Region,
};
use crate::matrices::{apply_f64, ExpansiveMatrix, Mode};
use crate::norms::{CoefficientSequence, ExplicitSequence, ImplicitScale, ImplicitSequence};
use crate::orbit::{Exponent, SpaceParams};
use num_rational::BigRational;

/// Index sets larger than this are refused.
pub const MAX_WITNESS_INDICES: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Delta,
    SingleScale,
    Case1,
    Case2,
    Multiscale,
}

/// What the norm of a family is expected to be.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NormLaw {
    Exact {
        value: f64,
    },
    /// Equal to `driver` up to constants independent of the size parameter.
    Comparable {
        driver: f64,
    },
    AtLeast {
        bound: f64,
    },
    AtMost {
        bound: f64,
    },
}

impl NormLaw {
    /// The number the law is stated in terms of.
    pub fn reference(&self) -> f64 {
        match *self {
            NormLaw::Exact { value } => value,
            NormLaw::Comparable { driver } => driver,
            NormLaw::AtLeast { bound } | NormLaw::AtMost { bound } => bound,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WitnessFamily {
    pub kind: FamilyKind,
    pub sequence: CoefficientSequence,
    /// The space whose norm the law describes.
    pub space: SpaceParams,
    pub law: NormLaw,
    pub params: Map<String, Value>,
}

fn lp_norm(v: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    let v: Vec<f64> = v.into_iter().map(f64::abs).collect();
    if p.is_infinite() {
        v.into_iter().fold(0.0, f64::max)
    } else {
        v.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// `c = δ_{(j0, 0)}` with norm `|det A|^{-j0(α+1/2-1/p)}`.
pub fn delta_witness(j0: i64, s: &SpaceParams) -> WitnessFamily {
    let e = if s.p.is_infinite() {
        s.alpha + 0.5
    } else {
        s.det_exponent()
    };
    WitnessFamily {
        kind: FamilyKind::Delta,
        sequence: ExplicitSequence::delta(j0, vec![0; s.dim()]).into(),
        space: s.clone(),
        law: NormLaw::Exact {
            value: s.matrix.det_abs_pow(-(j0 as f64) * e),
        },
        params: json!({ "j0": j0 }).as_object().cloned().unwrap_or_default(),
    }
}

/// `c_{j,k} = δ_{0,j} a_k` with norm `‖a‖_{ℓ^p}`.
pub fn single_scale_witness(a: &[(Vec<i64>, f64)], s: &SpaceParams) -> Result<WitnessFamily> {
    let seq = ExplicitSequence::single_scale(s.dim(), 0, a.iter().cloned())?;
    Ok(WitnessFamily {
        kind: FamilyKind::SingleScale,
        sequence: seq.into(),
        space: s.clone(),
        law: NormLaw::Exact {
            value: lp_norm(a.iter().map(|x| x.1), s.p.to_f64()),
        },
        params: json!({ "entries": a.len() }).as_object().cloned().unwrap_or_default(),
    })
}

/// `α_2` with `|det A|^{α_1+1/2-1/p} = |det B|^{α_2+1/2-1/p}`.
pub fn matched_alpha(a: &ExpansiveMatrix, alpha1: f64, b: &ExpansiveMatrix, p: Exponent) -> f64 {
    let inv_p = p.recip_f64();
    (alpha1 + 0.5 - inv_p) * a.det_abs().ln() / b.det_abs().ln() - 0.5 + inv_p
}

fn index_box(ks: &[Vec<i64>], d: usize) -> (Vec<i64>, Vec<i64>) {
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for k in ks {
        for i in 0..d {
            lo[i] = lo[i].min(k[i]);
            hi[i] = hi[i].max(k[i]);
        }
    }
    (lo, hi)
}

fn set_scale(j: i64, ks: &[Vec<i64>], value: f64, d: usize) -> ImplicitScale {
    let (lo, hi) = index_box(ks, d);
    let set: HashSet<Vec<i64>> = ks.iter().cloned().collect();
    ImplicitScale::constant(j, lo, hi, value, Arc::new(move |k: &[i64]| set.contains(k)))
}

fn check_count(n: usize) -> Result<()> {
    if n > MAX_WITNESS_INDICES {
        return Err(Error::Capacity {
            what: "witness indices",
            count: n,
            budget: MAX_WITNESS_INDICES,
        });
    }
    Ok(())
}

/// Geometry shared by the two sides of the first construction.
#[derive(Debug, Clone)]
pub struct Case1Geometry {
    pub separation: SeparationData,
    /// `max_t √d ‖A^{j_t}‖`, a bound on cube diameters.
    pub diameter_bound: f64,
    pub radius: f64,
    pub center: Vec<f64>,
    /// Radius `Rε/2` of the ball `P_R`.
    pub inner_radius: f64,
    /// `I_{t,R}` for every `t`.
    pub index_sets: Vec<Arc<Vec<Vec<i64>>>>,
}

#[derive(Debug, Clone)]
pub struct PairWitness<G> {
    pub a: WitnessFamily,
    pub b: WitnessFamily,
    pub geometry: G,
}

/// Ball construction for `p < ∞`: the same index sets at every `j_t`
/// produce `‖c‖_A ≍ (Rε)^{d/p} ‖σ‖_{q_1}` and `‖c‖_B ≍ (Rε)^{d/p} ‖σ‖_p`,
/// with `τ_t = |det A|^{j_t/p} σ_t`.
pub fn case1_witness(
    sa: &SpaceParams,
    b: &ExpansiveMatrix,
    q2: Exponent,
    sep: &SeparationData,
    sigma: &[f64],
) -> Result<PairWitness<Case1Geometry>> {
    let a = &sa.matrix;
    let d = sa.dim();
    if sa.p.is_infinite() {
        return Err(Error::InvalidCombination("the ball construction needs p < inf".into()));
    }
    if sigma.len() != sep.indices.len() {
        return Err(Error::DimensionMismatch {
            expected: sep.indices.len(),
            found: sigma.len(),
        });
    }
    if d > 2 {
        return Err(Error::InvalidInput("witness geometry is available for d <= 2".into()));
    }
    let p = sa.p.to_f64();
    let det = a.det_abs();
    let sqrt_d = (d as f64).sqrt();
    let diameter_bound = sep
        .indices
        .iter()
        .map(|&j| sqrt_d * a.power_norm(j))
        .fold(0.0, f64::max);
    let radius = 2.0 * diameter_bound / sep.epsilon;
    let center: Vec<f64> = sep.x0.iter().map(|x| radius * x).collect();
    let inner_radius = radius * sep.epsilon / 2.0;
    let ball = Region::ball(center.clone(), inner_radius)?;
    let mut scales = Vec::new();
    let mut index_sets = Vec::new();
    let mut total = 0;
    for (t, &j) in sep.indices.iter().enumerate() {
        let ks = cubes_meeting_region(a, j, &ball, true)?;
        total += ks.len();
        check_count(total)?;
        let tau = det.powf(j as f64 / p) * sigma[t];
        let value = tau.abs() * det.powf(j as f64 * sa.det_exponent());
        if value > 0.0 && !ks.is_empty() {
            scales.push(set_scale(j, &ks, value, d));
        }
        index_sets.push(Arc::new(ks));
    }
    let seq: CoefficientSequence = ImplicitSequence::new(d, scales)?.into();
    let alpha2 = matched_alpha(a, sa.alpha, b, sa.p);
    let sb = SpaceParams::new(b.clone(), alpha2, sa.p, q2)?;
    let pref = (radius * sep.epsilon).powf(d as f64 / p);
    let params = json!({
        "n": sep.indices.len(),
        "indices": sep.indices,
        "x0": sep.x0,
        "epsilon": sep.epsilon,
        "radius": radius,
        "diameter_bound": diameter_bound,
        "sigma": sigma,
        "alpha2": alpha2,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    Ok(PairWitness {
        a: WitnessFamily {
            kind: FamilyKind::Case1,
            sequence: seq.clone(),
            space: sa.clone(),
            law: NormLaw::Comparable {
                driver: pref * lp_norm(sigma.iter().copied(), sa.q.to_f64()),
            },
            params: params.clone(),
        },
        b: WitnessFamily {
            kind: FamilyKind::Case1,
            sequence: seq,
            space: sb,
            law: NormLaw::Comparable {
                driver: pref * lp_norm(sigma.iter().copied(), p),
            },
            params,
        },
        geometry: Case1Geometry {
            separation: sep.clone(),
            diameter_bound,
            radius,
            center,
            inner_radius,
            index_sets,
        },
    })
}

fn cube_vertices(m: &[f64], k: &[i64]) -> Vec<Vec<f64>> {
    let d = k.len();
    (0..1usize << d)
        .map(|mask| {
            let u: Vec<f64> = (0..d).map(|i| (k[i] + ((mask >> i) & 1) as i64) as f64).collect();
            let mut x = vec![0.0; d];
            apply_f64(m, &u, &mut x);
            x
        })
        .collect()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Checks the sandwich `P_R ⊆ Ω_t ⊆ B_{Rε}(R x_0)` (the left inclusion on
/// `samples` seeded points of `P_R`) and that every `Λ_t` lies in the ball
/// of radius `R δ` around `R D_{j_t} x_0`, which makes them pairwise
/// disjoint. Returns the violations.
pub fn case1_audit(w: &PairWitness<Case1Geometry>, samples: usize, seed: u64) -> Vec<String> {
    let g = &w.geometry;
    let a = &w.a.space.matrix;
    let b = &w.b.space.matrix;
    let d = a.dim();
    let sep = &g.separation;
    let outer = g.radius * sep.epsilon;
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..samples)
        .map(|_| loop {
            let u: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            if u.iter().map(|x| x * x).sum::<f64>() < 1.0 {
                break u.iter().zip(&g.center).map(|(x, c)| c + g.inner_radius * x).collect();
            }
        })
        .collect();
    let separated = (0..sep.images.len())
        .all(|s| (s + 1..sep.images.len()).all(|t| dist(&sep.images[s], &sep.images[t]) > 2.0 * sep.delta));
    if !separated {
        bad.push("orbit images are not 2δ apart".into());
    }
    for (t, &j) in sep.indices.iter().enumerate() {
        let ks = &g.index_sets[t];
        let set: HashSet<&Vec<i64>> = ks.iter().collect();
        let fa = a.power_f64(j);
        let fb = b.power_f64(j);
        let img_center: Vec<f64> = sep.images[t].iter().map(|x| g.radius * x).collect();
        for k in ks.iter() {
            if cube_vertices(&fa, k).iter().any(|v| dist(v, &g.center) >= outer) {
                bad.push(format!("cube ({j}, {k:?}) leaves the outer ball"));
                break;
            }
            if cube_vertices(&fb, k)
                .iter()
                .any(|v| dist(v, &img_center) >= g.radius * sep.delta)
            {
                bad.push(format!("transported cube ({j}, {k:?}) leaves its separating ball"));
                break;
            }
        }
        for x in &pts {
            match cube_of_point(a, j, x) {
                Ok(k) if set.contains(&k) => {}
                _ => {
                    bad.push(format!("point {x:?} of the inner ball is not covered at scale {j}"));
                    break;
                }
            }
        }
    }
    bad
}

#[derive(Debug, Clone)]
pub struct Case2Geometry {
    pub separation: SeparationData,
    pub delta: f64,
    pub ell0: i64,
    pub j0: i64,
    pub radius: f64,
    pub k0: Vec<i64>,
    /// `|P_δ| / |Q_{j0,k0}| = (2δ)^d`.
    pub volume_ratio: f64,
    pub index_counts: Vec<usize>,
    /// Whether `R` was enlarged beyond `10 √d ‖A^{j0}‖` to keep
    /// `Q_{j0,k0}` inside `B_{Rε}(R x_0)`.
    pub radius_enlarged: bool,
}

fn contracts_into(a: &ExpansiveMatrix, ell: i64, delta: f64) -> bool {
    let m = a.power_f64(-ell);
    cube_vertices(&m, &vec![0; a.dim()])
        .iter()
        .all(|v| v.iter().all(|x| x.abs() <= delta))
}

/// Whether `A^{j}([0,1]^d + k) ⊆ A^{j0}([0,1]^d + k0)` for every `k`.
fn nested<T: Coord>(a: &ExpansiveMatrix, j: i64, ks: &[Vec<i64>], j0: i64, k0: &[i64]) -> bool {
    let d = a.dim();
    let m: Vec<T> = T::matrix_entries(&a.power(j - j0));
    ks.iter().all(|k| {
        (0..1usize << d).all(|mask| {
            let u: Vec<T> = (0..d)
                .map(|i| T::from_f64((k[i] + ((mask >> i) & 1) as i64) as f64))
                .collect();
            (0..d).all(|r| {
                let y = (0..d).fold(T::zero(), |s, c| s.add(&m[r * d + c].mul(&u[c])));
                let lo = T::from_f64(k0[r] as f64);
                let hi = T::from_f64((k0[r] + 1) as f64);
                lo <= y && y <= hi
            })
        })
    })
}

/// Local-average construction for `p = ∞`: `‖c‖_A ≥ ((2δ)^d Σ|τ_t|^{q_1})^{1/q_1}`
/// while `‖c‖_B ≤ ‖τ‖_∞`.
pub fn case2_witness(
    sa: &SpaceParams,
    b: &ExpansiveMatrix,
    q2: Exponent,
    sep: &SeparationData,
    tau: &[f64],
    delta: f64,
) -> Result<PairWitness<Case2Geometry>> {
    let a = &sa.matrix;
    let d = sa.dim();
    if !sa.p.is_infinite() {
        return Err(Error::InvalidCombination(
            "the local-average construction needs p = inf".into(),
        ));
    }
    if !(delta > 0.0 && delta < 1.0 / 6.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1/6), got {delta}")));
    }
    if tau.len() != sep.indices.len() {
        return Err(Error::DimensionMismatch {
            expected: sep.indices.len(),
            found: tau.len(),
        });
    }
    if d > 2 {
        return Err(Error::InvalidInput("witness geometry is available for d <= 2".into()));
    }
    let j_hi = *sep.indices.iter().max().expect("nonempty");
    let j_lo = *sep.indices.iter().min().expect("nonempty");
    let span = j_hi - j_lo;
    let ell0 = (1..=512)
        .find(|&l| (l..=l + span).all(|m| contracts_into(a, m, delta)))
        .ok_or_else(|| Error::Construction("no contraction level found below 512".into()))?;
    let j0 = ell0 + j_hi;
    let sqrt_d = (d as f64).sqrt();
    let diam = sqrt_d * a.power_norm(j0);
    let base = 10.0 * diam;
    // Q_{j0,k0} sits in the closed ball of radius diam around R x0, which
    // must lie inside B_{Rε}(R x0)
    let radius = if diam < base * sep.epsilon {
        base
    } else {
        2.0 * diam / sep.epsilon
    };
    let radius_enlarged = radius > base;
    let center: Vec<f64> = sep.x0.iter().map(|x| radius * x).collect();
    let k0 = cube_of_point(a, j0, &center)?;
    let fwd = a.power_f64(j0);
    let mut scaled = fwd.to_vec();
    for c in 0..d {
        for r in 0..d {
            scaled[r * d + c] *= 2.0 * delta;
        }
    }
    let corner: Vec<f64> = k0.iter().map(|&k| k as f64 + 0.5 - delta).collect();
    let mut origin = vec![0.0; d];
    apply_f64(&fwd, &corner, &mut origin);
    let p_delta = match cube_polytope(&scaled, &vec![0; d])? {
        ConvexPolytope::Interval([x, y]) => Region::boxed(vec![x + origin[0]], vec![y + origin[0]])?,
        ConvexPolytope::Polygon(p) => {
            let moved: ConvexPolygon<f64> = p.transform(&[1.0, 0.0, 0.0, 1.0], &[origin[0], origin[1]]);
            Region::polygon(&moved)
        }
    };
    let mut seq = ExplicitSequence::new(d);
    let mut index_counts = Vec::new();
    let mut total = 0;
    for (t, &j) in sep.indices.iter().enumerate() {
        let ks = cubes_meeting_region(a, j, &p_delta, true)?;
        total += ks.len();
        check_count(total)?;
        let ok = match a.mode() {
            Mode::Rational => nested::<BigRational>(a, j, &ks, j0, &k0),
            Mode::Float => nested::<f64>(a, j, &ks, j0, &k0),
        };
        if !ok {
            return Err(Error::Construction(format!(
                "cubes at scale {j} leave Q_(j0,k0); widen the contraction level"
            )));
        }
        let value = a.det_abs_pow(j as f64 * (sa.alpha + 0.5)) * tau[t].abs();
        index_counts.push(ks.len());
        if value > 0.0 {
            for k in ks {
                seq.insert(j, k, value)?;
            }
        }
    }
    let q1 = sa.q.to_f64();
    let volume_ratio = (2.0 * delta).powi(d as i32);
    let lower = if q1.is_infinite() {
        lp_norm(tau.iter().copied(), q1)
    } else {
        (volume_ratio * tau.iter().map(|t| t.abs().powf(q1)).sum::<f64>()).powf(1.0 / q1)
    };
    let alpha2 = matched_alpha(a, sa.alpha, b, sa.p);
    let sb = SpaceParams::new(b.clone(), alpha2, sa.p, q2)?;
    let seq: CoefficientSequence = seq.into();
    let params = json!({
        "n": sep.indices.len(),
        "indices": sep.indices,
        "x0": sep.x0,
        "delta": delta,
        "ell0": ell0,
        "j0": j0,
        "radius": radius,
        "k0": k0,
        "tau": tau,
        "alpha2": alpha2,
    })
    .as_object()
    .cloned()
    .unwrap_or_default();
    Ok(PairWitness {
        a: WitnessFamily {
            kind: FamilyKind::Case2,
            sequence: seq.clone(),
            space: sa.clone(),
            law: NormLaw::AtLeast { bound: lower },
            params: params.clone(),
        },
        b: WitnessFamily {
            kind: FamilyKind::Case2,
            sequence: seq,
            space: sb,
            law: NormLaw::AtMost {
                bound: lp_norm(tau.iter().copied(), f64::INFINITY),
            },
            params,
        },
        geometry: Case2Geometry {
            separation: sep.clone(),
            delta,
            ell0,
            j0,
            radius,
            k0,
            volume_ratio,
            index_counts,
            radius_enlarged,
        },
    })
}

/// Closed-cube test `M([0,1]^d + k) ∩ [0,1]^d ≠ ∅` for `d ∈ {1, 2}` by
/// separating axes: the box axes and the cube's own unit axes.
#[derive(Debug, Clone)]
struct UnitBoxMeeting {
    m: Vec<f64>,
    /// Range of `M^{-1}[0,1]^d` along each unit axis.
    u_lo: Vec<f64>,
    u_hi: Vec<f64>,
}

impl UnitBoxMeeting {
    fn new(a: &ExpansiveMatrix, j: i64) -> Self {
        let d = a.dim();
        let minv = a.power_f64(-j);
        let vs = cube_vertices(&minv, &vec![0; d]);
        let u_lo = (0..d)
            .map(|i| vs.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
            .collect();
        let u_hi = (0..d)
            .map(|i| vs.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        UnitBoxMeeting {
            m: a.power_f64(j).to_vec(),
            u_lo,
            u_hi,
        }
    }

    fn index_box(&self) -> (Vec<i64>, Vec<i64>) {
        let lo = self.u_lo.iter().map(|v| v.ceil() as i64 - 1).collect();
        let hi = self.u_hi.iter().map(|v| v.floor() as i64).collect();
        (lo, hi)
    }

    fn meets(&self, k: &[i64]) -> bool {
        let d = k.len();
        for i in 0..d {
            if (k[i] as f64) > self.u_hi[i] || ((k[i] + 1) as f64) < self.u_lo[i] {
                return false;
            }
        }
        // image of the unit cube at k projected on the coordinate axes
        for r in 0..d {
            let base: f64 = (0..d).map(|c| self.m[r * d + c] * k[c] as f64).sum();
            let (mut lo, mut hi) = (base, base);
            for c in 0..d {
                let e = self.m[r * d + c];
                if e < 0.0 {
                    lo += e;
                } else {
                    hi += e;
                }
            }
            if lo > 1.0 || hi < 0.0 {
                return false;
            }
        }
        true
    }
}

/// `c_{j,k} = |det A|^{j(α+1/2)} |τ_{-j}|` for `-(L-1) <= j <= 0` and `k`
/// with closed `Q_{j,k}` meeting `[0,1]^d`. Its norm is `≍ ‖τ‖_{ℓ^q}`, and
/// equals `‖τ‖_{ℓ^q}` for `p = ∞`.
pub fn multiscale_witness(tau: &[f64], s: &SpaceParams) -> Result<WitnessFamily> {
    let a = &s.matrix;
    let d = s.dim();
    if d > 2 {
        return Err(Error::InvalidInput("witness geometry is available for d <= 2".into()));
    }
    let mut scales = Vec::new();
    for (t, &v) in tau.iter().enumerate() {
        let j = -(t as i64);
        let value = a.det_abs_pow(j as f64 * (s.alpha + 0.5)) * v.abs();
        if value == 0.0 {
            continue;
        }
        let test = UnitBoxMeeting::new(a, j);
        let (lo, hi) = test.index_box();
        scales.push(ImplicitScale::constant(
            j,
            lo,
            hi,
            value,
            Arc::new(move |k: &[i64]| test.meets(k)),
        ));
    }
    let q = s.q.to_f64();
    let norm_tau = lp_norm(tau.iter().copied(), q);
    Ok(WitnessFamily {
        kind: FamilyKind::Multiscale,
        sequence: ImplicitSequence::new(d, scales)?.into(),
        space: s.clone(),
        law: if s.p.is_infinite() {
            NormLaw::Exact { value: norm_tau }
        } else {
            NormLaw::Comparable { driver: norm_tau }
        },
        params: json!({ "levels": tau.len(), "tau": tau })
            .as_object()
            .cloned()
            .unwrap_or_default(),
    })
}
