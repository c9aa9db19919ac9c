//! `p = ∞`: supremum over dilated cubes `P` of local averages of the
//! stack truncated at the scale of `P`.
//!
//! Candidate scales are searched outward from the coarsest stored scale.
//! Going up, `avg_P ≤ I_total / |P|` where `I_total` is the integral of the
//! full `q`-stack; going down, `avg_P ≤ Σ_{j ≤ j_P} max_k w_{j,k}^q`. Both
//! bounds shrink monotonically, so the search stops once they drop below
//! the best average found.

use std::collections::BTreeSet;

use super::exact::{atoms, candidate_integrals, meeting_cubes, Atom};
use super::stack::{Lookup, StackEvaluator};
use super::{CoefficientSequence, Diagnostics, Method, MethodTag, NormConfig, NormResult};
use crate::error::{Error, Result};
use crate::geometry::{cube_polytope, sample_unit_cube, McConfig};
use crate::matrices::apply_f64;
use crate::orbit::SpaceParams;

/// Hard stop on coarse scales, far beyond any reachable pruning point.
const MAX_UPWARD_SCALES: i64 = 4096;

/// `‖c‖` for `p = ∞`, `q < ∞`.
pub fn norm_infty_q(c: &CoefficientSequence, s: &SpaceParams, cfg: &NormConfig) -> Result<NormResult> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: c.dim(),
        });
    }
    if !s.p.to_f64().is_infinite() || s.q.to_f64().is_infinite() {
        return Err(Error::InvalidCombination(
            "norm_infty_q needs p = inf and q < inf".into(),
        ));
    }
    if s.dim() > 2 {
        return Err(Error::InvalidCombination(format!(
            "the cube search is available for d <= 2, got d = {}",
            s.dim()
        )));
    }
    match (cfg.method, c) {
        (Method::Exact, CoefficientSequence::Implicit(_)) => Err(Error::InvalidCombination(
            "implicit sequences have no exact evaluation path".into(),
        )),
        (Method::Exact, CoefficientSequence::Explicit(e)) => exact_search(&atoms(e, s), s, cfg),
        (Method::Mc, _) => mc_search(c, s, cfg),
    }
}

struct Search {
    best: f64,
    best_cube: Option<(i64, Vec<i64>)>,
    candidates: usize,
    lo: i64,
    hi: i64,
    bound: f64,
    best_se: f64,
}

impl Search {
    fn new(j: i64) -> Self {
        Search {
            best: 0.0,
            best_cube: None,
            candidates: 0,
            lo: j,
            hi: j,
            bound: 0.0,
            best_se: 0.0,
        }
    }

    fn offer(&mut self, jp: i64, k: &[i64], avg: f64, se: f64) {
        if avg > self.best {
            self.best = avg;
            self.best_se = se;
            self.best_cube = Some((jp, k.to_vec()));
        }
    }

    /// Upward then downward scan; `eval(jp, search)` scores every candidate at `jp`.
    fn run(
        &mut self,
        j_min: i64,
        j_max: i64,
        det: f64,
        i_total: f64,
        finer_bound: impl Fn(i64) -> f64,
        mut eval: impl FnMut(i64, &mut Search) -> Result<()>,
    ) -> Result<()> {
        let mut jp = j_max;
        loop {
            let bound = i_total / det.powf(jp as f64);
            if jp > j_max && bound <= self.best {
                self.bound = self.bound.max(bound);
                break;
            }
            if jp - j_max > MAX_UPWARD_SCALES {
                return Err(Error::Capacity {
                    what: "candidate scales",
                    count: (jp - j_max) as usize,
                    budget: MAX_UPWARD_SCALES as usize,
                });
            }
            eval(jp, self)?;
            self.hi = jp;
            jp += 1;
        }
        for jp in (j_min..j_max).rev() {
            let u = finer_bound(jp);
            if u <= self.best {
                self.bound = self.bound.max(u);
                break;
            }
            eval(jp, self)?;
            self.lo = jp;
        }
        Ok(())
    }

    fn check_budget(&self, budget: usize) -> Result<()> {
        if self.candidates > budget {
            return Err(Error::Capacity {
                what: "candidate cubes",
                count: self.candidates,
                budget,
            });
        }
        Ok(())
    }

    fn finish(self, q: f64, method: MethodTag, notes: Vec<String>) -> NormResult {
        let value = self.best.powf(1.0 / q);
        // first-order propagation through t ↦ t^{1/q}
        let error_bound = if self.best > 0.0 {
            value / (q * self.best) * self.best_se
        } else {
            0.0
        };
        NormResult {
            value,
            method,
            error_bound,
            diagnostics: Diagnostics {
                candidates: Some(self.candidates),
                pruning_bound: Some(self.bound.powf(1.0 / q)),
                best_cube: self.best_cube,
                candidate_scales: Some((self.lo, self.hi)),
                notes,
                ..Default::default()
            },
        }
    }
}

fn prefix_max(per_scale: &[(i64, f64)]) -> impl Fn(i64) -> f64 + '_ {
    move |jp| per_scale.iter().filter(|(j, _)| *j <= jp).map(|(_, m)| m).sum()
}

fn exact_search(at: &[Atom], s: &SpaceParams, cfg: &NormConfig) -> Result<NormResult> {
    let q = s.q.to_f64();
    let tag = if s.dim() == 1 {
        MethodTag::Exact1d
    } else {
        MethodTag::Exact2dOverlay
    };
    if at.is_empty() {
        return Ok(Search::new(0).finish(q, tag, vec![]));
    }
    let a = &s.matrix;
    let det = a.det_abs();
    let j_min = at.iter().map(|x| x.j).min().expect("nonempty");
    let j_max = at.iter().map(|x| x.j).max().expect("nonempty");
    let i_total: f64 = at.iter().map(|x| x.w.powf(q) * det.powf(x.j as f64)).sum();
    let mut per_scale: Vec<(i64, f64)> = Vec::new();
    for x in at {
        let wq = x.w.powf(q);
        match per_scale.iter_mut().find(|(j, _)| *j == x.j) {
            Some(e) => e.1 = e.1.max(wq),
            None => per_scale.push((x.j, wq)),
        }
    }
    let mut search = Search::new(j_max);
    search.run(j_min, j_max, det, i_total, prefix_max(&per_scale), |jp, st| {
        let vol = det.powf(jp as f64);
        let ints = candidate_integrals(a, at, q, jp)?;
        st.candidates += ints.len();
        st.check_budget(cfg.candidate_budget)?;
        for (k, i) in ints {
            st.offer(jp, &k, i / vol, 0.0);
        }
        Ok(())
    })?;
    Ok(search.finish(q, tag, vec![]))
}

/// Cubes at scale `jp` that may meet the support of scale `sc` with positive
/// measure.
fn scale_candidates(ev: &StackEvaluator, idx: usize, minv_p: &[f64], out: &mut BTreeSet<Vec<i64>>) -> Result<()> {
    let sc = &ev.scales[idx];
    let d = ev.dim;
    let mut push = |k: &[i64], fwd: &[f64], width: &[i64]| -> Result<()> {
        let mut m = fwd.to_vec();
        for c in 0..d {
            for r in 0..d {
                m[r * d + c] *= width[c] as f64;
            }
        }
        let origin_k: Vec<f64> = k.iter().map(|&v| v as f64).collect();
        let mut origin = vec![0.0; d];
        apply_f64(fwd, &origin_k, &mut origin);
        // unit cube of `m` translated to `origin`
        let zero = vec![0; d];
        let mut poly = cube_polytope(&m, &zero)?;
        translate(&mut poly, &origin);
        out.extend(meeting_cubes(&poly, minv_p, d));
        Ok(())
    };
    match &sc.lookup {
        Lookup::Explicit(map) => {
            let ones = vec![1; d];
            for k in map.keys() {
                push(k, &sc.fwd, &ones)?;
            }
        }
        Lookup::Implicit(_) => {
            let width: Vec<i64> = sc.lo.iter().zip(&sc.hi).map(|(a, b)| b - a + 1).collect();
            push(&sc.lo, &sc.fwd, &width)?;
        }
    }
    Ok(())
}

fn translate(p: &mut crate::geometry::ConvexPolytope<f64>, t: &[f64]) {
    use crate::geometry::ConvexPolytope;
    match p {
        ConvexPolytope::Interval(iv) => {
            iv[0] += t[0];
            iv[1] += t[0];
        }
        ConvexPolytope::Polygon(poly) => {
            let m = [1.0, 0.0, 0.0, 1.0];
            *poly = poly.transform(&m, &[t[0], t[1]]);
        }
    }
}

fn mc_search(c: &CoefficientSequence, s: &SpaceParams, cfg: &NormConfig) -> Result<NormResult> {
    let q = s.q.to_f64();
    let ev = StackEvaluator::new(c, s)?;
    let Some((j_min, j_max)) = ev.scale_range() else {
        return Ok(Search::new(0).finish(q, MethodTag::MonteCarlo, vec![]));
    };
    let a = &s.matrix;
    let det = ev.det_abs;
    let d = ev.dim;
    let per_scale: Vec<(i64, f64)> = ev
        .scales
        .iter()
        .map(|sc| (sc.j, (sc.weight * sc.max_modulus).powf(q)))
        .collect();
    // rigorous upper bound on the integral of the q-stack
    let i_total: f64 = ev
        .scales
        .iter()
        .zip(&per_scale)
        .map(|(sc, (_, m))| {
            let count = match &sc.lookup {
                Lookup::Explicit(map) => map.len() as f64,
                Lookup::Implicit(_) => sc.lo.iter().zip(&sc.hi).map(|(a, b)| (b - a + 1) as f64).product(),
            };
            m * count * det.powf(sc.j as f64)
        })
        .sum();
    let mut search = Search::new(j_max);
    let mut evaluated = 0u64;
    search.run(j_min, j_max, det, i_total, prefix_max(&per_scale), |jp, st| {
        let minv_p = a.power_f64(-jp);
        let fwd_p = a.power_f64(jp);
        let mut keys = BTreeSet::new();
        for (i, sc) in ev.scales.iter().enumerate() {
            if sc.j <= jp {
                scale_candidates(&ev, i, &minv_p, &mut keys)?;
            }
            if keys.len() > cfg.candidate_budget {
                break;
            }
        }
        st.candidates += keys.len();
        st.check_budget(cfg.candidate_budget)?;
        for k in keys {
            let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
            let mc = McConfig {
                samples: cfg.mc_candidate_samples,
                seed: cfg.mc.seed ^ (evaluated.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            };
            evaluated += 1;
            let (mean, se) = sample_unit_cube(d, &mc, |u| {
                let mut y = [0.0f64; 2];
                let mut x = [0.0f64; 2];
                for i in 0..d {
                    y[i] = kf[i] + u[i];
                }
                apply_f64(&fwd_p, &y[..d], &mut x[..d]);
                ev.raw(&x[..d], Some(jp))
            })?;
            st.offer(jp, &k, mean, se);
        }
        Ok(())
    })?;
    let notes = vec![format!(
        "per-candidate averages from {} samples; the maximum of noisy averages is biased upward",
        cfg.mc_candidate_samples
    )];
    Ok(search.finish(q, MethodTag::MonteCarlo, notes))
}

/// `‖c‖` for `p = q = ∞`: `sup_{j,k} |det A|^{-j(α+1/2)} |c_{j,k}|`.
pub fn norm_sup_sup(c: &CoefficientSequence, s: &SpaceParams) -> Result<NormResult> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: c.dim(),
        });
    }
    let ev = StackEvaluator::new(c, s)?;
    let value = ev
        .scales
        .iter()
        .map(|sc| sc.weight * sc.max_modulus)
        .fold(0.0, f64::max);
    let mut notes = Vec::new();
    if matches!(c, CoefficientSequence::Implicit(_)) {
        notes.push("uses the declared per-scale maximum modulus".into());
    }
    Ok(NormResult {
        value,
        method: MethodTag::SupFormula,
        error_bound: 0.0,
        diagnostics: Diagnostics {
            notes,
            ..Default::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{ExpansiveMatrix, Matrix};
    use crate::norms::ExplicitSequence;

    fn space(m: Matrix, p: &str, q: &str) -> SpaceParams {
        SpaceParams::new(
            ExpansiveMatrix::new(m).unwrap(),
            0.0,
            p.parse().unwrap(),
            q.parse().unwrap(),
        )
        .unwrap()
    }

    fn diag2(q: &str) -> SpaceParams {
        space(Matrix::diag_int(&[2, 2]), "inf", q)
    }

    #[test]
    fn delta_at_scale_one() {
        let c = ExplicitSequence::delta(1, vec![0, 0]).into();
        let r = norm_infty_q(&c, &diag2("2"), &NormConfig::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.diagnostics.best_cube, Some((1, vec![0, 0])));
    }

    #[test]
    fn delta_at_scale_zero_any_q() {
        let c = ExplicitSequence::delta(0, vec![0, 0]).into();
        for q in ["1/2", "1", "3"] {
            let r = norm_infty_q(&c, &diag2(q), &NormConfig::default()).unwrap();
            assert!((r.value - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn single_scale_disjoint_gives_max() {
        let a = [(vec![0, 0], 0.3), (vec![2, 1], 1.7), (vec![-1, 4], 0.9)];
        let c = ExplicitSequence::single_scale(2, 0, a.iter().cloned()).unwrap().into();
        let r = norm_infty_q(&c, &diag2("2"), &NormConfig::default()).unwrap();
        assert!((r.value - 1.7).abs() < 1e-14);
        // oracle: sweep the scale-0 cubes directly
        let oracle = a.iter().map(|x| x.1).fold(0.0, f64::max);
        assert!((r.value - oracle).abs() < 1e-14);
    }

    #[test]
    fn coarse_cube_wins_when_atoms_pile_up() {
        // four scale-0 atoms tiling Q_{1,0}: every P sees average at most 1
        // except Q_{1,0}, which sees the full stack
        let mut e = ExplicitSequence::new(2);
        for k in [[0, 0], [1, 0], [0, 1], [1, 1]] {
            e.insert(0, k.to_vec(), 1.0).unwrap();
        }
        e.insert(1, vec![0, 0], 2.0).unwrap();
        let c = e.into();
        let r = norm_infty_q(&c, &diag2("1"), &NormConfig::default()).unwrap();
        // average over Q_{1,0}: 1 + 2·4^{-1/2} = 2
        assert!((r.value - 2.0).abs() < 1e-14);
        let m = norm_infty_q(
            &c,
            &diag2("1"),
            &NormConfig {
                method: Method::Mc,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sup_sup_examples() {
        let s = diag2("inf");
        let r = norm_sup_sup(&ExplicitSequence::delta(1, vec![0, 0]).into(), &s).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        let mut e = ExplicitSequence::new(2);
        e.insert(0, vec![0, 0], 1.0).unwrap();
        e.insert(-1, vec![0, 0], 1.0).unwrap();
        assert!((norm_sup_sup(&e.into(), &s).unwrap().value - 2.0).abs() < 1e-15);
        assert_eq!(norm_sup_sup(&ExplicitSequence::new(2).into(), &s).unwrap().value, 0.0);
    }

    #[test]
    fn candidate_budget_is_enforced() {
        let c = ExplicitSequence::single_scale(2, 0, (0..10).map(|i| (vec![3 * i, 0], 1.0)))
            .unwrap()
            .into();
        let cfg = NormConfig {
            candidate_budget: 3,
            ..Default::default()
        };
        assert!(matches!(
            norm_infty_q(&c, &diag2("1"), &cfg),
            Err(Error::Capacity { .. })
        ));
    }
}
