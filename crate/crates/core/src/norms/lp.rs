//! `p < ∞`: exact cell integration or Monte Carlo over the atom union.

use super::exact::{atoms, integrate_cells, stack_cells};
use super::stack::StackEvaluator;
use super::{CoefficientSequence, Diagnostics, Method, MethodTag, NormConfig, NormResult};
use crate::error::{Error, Result};
use crate::geometry::{sample_unit_cube, McConfig};
use crate::matrices::apply_f64;
use crate::orbit::SpaceParams;

/// Samples given to every sampling box regardless of its volume share.
const MIN_BOX_SAMPLES: u64 = 1024;
/// Explicit sequences with more atoms are sampled per scale instead of per atom.
const MAX_ATOM_BOXES: usize = 4096;

/// `‖c‖` for `p < ∞`.
pub fn norm_lp(c: &CoefficientSequence, s: &SpaceParams, cfg: &NormConfig) -> Result<NormResult> {
    if s.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: c.dim(),
        });
    }
    let p = s.p.to_f64();
    if p.is_infinite() {
        return Err(Error::InvalidCombination("norm_lp needs p < inf".into()));
    }
    let q = s.q.to_f64();
    match (cfg.method, c) {
        (Method::Exact, CoefficientSequence::Implicit(_)) => Err(Error::InvalidCombination(
            "implicit sequences have no exact evaluation path".into(),
        )),
        (Method::Exact, CoefficientSequence::Explicit(e)) => {
            let at = atoms(e, s);
            let tag = if s.dim() == 1 {
                MethodTag::Exact1d
            } else {
                MethodTag::Exact2dOverlay
            };
            match stack_cells(&s.matrix, &at, q, cfg.overlay_budget) {
                Ok(cells) => Ok(NormResult {
                    value: integrate_cells(&cells, p, q).powf(1.0 / p),
                    method: tag,
                    error_bound: 0.0,
                    diagnostics: Diagnostics {
                        cells: Some(cells.len()),
                        ..Default::default()
                    },
                }),
                Err(err @ (Error::Capacity { .. } | Error::InvalidCombination(_))) => {
                    let mut r = lp_mc(c, s, &cfg.mc)?;
                    r.diagnostics
                        .notes
                        .push(format!("exact path unavailable ({err}); used Monte Carlo"));
                    Ok(r)
                }
                Err(e) => Err(e),
            }
        }
        (Method::Mc, _) => lp_mc(c, s, &cfg.mc),
    }
}

fn mix_seed(seed: u64, i: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct SampleBox {
    origin: Vec<f64>,
    edges: Vec<f64>,
    volume: f64,
    /// For atom boxes: position of the atom's scale and its raw term. Every
    /// sample lies in that atom, and no other atom of the same scale.
    own: Option<(usize, f64)>,
}

/// Monte Carlo estimate of `∫ stack^p` as a sum over sampling boxes of
/// `∫_box stack^p / n`, where `n(x)` counts the boxes holding `x`.
fn lp_mc(c: &CoefficientSequence, s: &SpaceParams, mc: &McConfig) -> Result<NormResult> {
    let p = s.p.to_f64();
    let ev = StackEvaluator::new(c, s)?;
    let d = ev.dim;
    let det = ev.det_abs;
    let per_atom = match c {
        CoefficientSequence::Explicit(e) => e.len() <= MAX_ATOM_BOXES,
        CoefficientSequence::Implicit(_) => false,
    };
    let boxes: Vec<SampleBox> = if per_atom {
        let e = c.as_explicit().expect("explicit");
        let mut out = Vec::with_capacity(e.len());
        for (si, sc) in ev.scales.iter().enumerate() {
            for k in e.indices(sc.j) {
                let kf: Vec<f64> = k.iter().map(|&v| v as f64).collect();
                let mut origin = vec![0.0; d];
                apply_f64(&sc.fwd, &kf, &mut origin);
                out.push(SampleBox {
                    origin,
                    edges: sc.fwd.clone(),
                    volume: det.powf(sc.j as f64),
                    own: Some((si, sc.term(k, ev.q))),
                });
            }
        }
        out
    } else {
        ev.scales
            .iter()
            .map(|sc| {
                let (origin, edges) = sc.support_box();
                SampleBox {
                    origin,
                    edges,
                    volume: sc.box_volume(det),
                    own: None,
                }
            })
            .collect()
    };
    let mut diagnostics = Diagnostics {
        sampling_boxes: Some(boxes.len()),
        ..Default::default()
    };
    if boxes.is_empty() {
        return Ok(NormResult {
            value: 0.0,
            method: MethodTag::MonteCarlo,
            error_bound: 0.0,
            diagnostics,
        });
    }
    let total_vol: f64 = boxes.iter().map(|b| b.volume).sum();
    let mut integral = 0.0;
    let mut var = 0.0;
    let mut used = 0u64;
    for (i, b) in boxes.iter().enumerate() {
        let n = ((mc.samples as f64) * b.volume / total_vol).round() as u64;
        let n = n.max(MIN_BOX_SAMPLES);
        used += n;
        let cfg = McConfig {
            samples: n,
            seed: mix_seed(mc.seed, i as u64),
        };
        let alone = ev.scales.len() == 1;
        let (mean, se) = sample_unit_cube(d, &cfg, |u| {
            if let (true, Some((_, t))) = (alone, b.own) {
                return ev.root_pow(t, p);
            }
            let mut x = [0.0f64; 8];
            let mut xs = Vec::new();
            let x: &mut [f64] = if d <= 8 {
                &mut x[..d]
            } else {
                xs.resize(d, 0.0);
                &mut xs
            };
            apply_f64(&b.edges, u, x);
            for (xi, o) in x.iter_mut().zip(&b.origin) {
                *xi += o;
            }
            let (raw, count) = match b.own {
                Some((si, t)) => {
                    let (raw, hits) = ev.raw_and_hits_without(x, si);
                    (ev.join(raw, t), hits + 1)
                }
                None => (ev.raw_and_hits(x).0, ev.cover_count(x)),
            };
            if count == 0 || raw == 0.0 {
                return 0.0;
            }
            ev.root_pow(raw, p) / count as f64
        })?;
        integral += mean * b.volume;
        var += (se * b.volume).powi(2);
    }
    let se_i = var.sqrt();
    let value = integral.powf(1.0 / p);
    // first-order propagation through t ↦ t^{1/p}
    let error_bound = if integral > 0.0 {
        value / (p * integral) * se_i
    } else {
        0.0
    };
    diagnostics.samples = Some(used);
    Ok(NormResult {
        value,
        method: MethodTag::MonteCarlo,
        error_bound,
        diagnostics,
    })
}
