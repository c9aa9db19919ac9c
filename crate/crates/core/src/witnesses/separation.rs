//! Indices `j_1..j_N` and a base point `x_0` whose images under
//! `D_j = B^j A^{-j}` are well separated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{apply_f64, spectral_norm_f64, ExpansiveMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Initial half-width of the `j` window.
    pub window: i64,
    /// The window doubles up to this half-width before giving up.
    pub max_window: i64,
    pub distance_floor: f64,
    /// Random unit vectors tried after the standard basis.
    pub random_points: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            window: 64,
            max_window: 256,
            distance_floor: 1e-6,
            random_points: 16,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationData {
    pub indices: Vec<i64>,
    pub x0: Vec<f64>,
    pub epsilon: f64,
    /// Bound on `‖D_{j_t}‖` (at least `1 + 1e-6`).
    pub r_prime: f64,
    pub delta: f64,
    pub min_distance: f64,
    /// The images `D_{j_t} x_0`.
    pub images: Vec<Vec<f64>>,
    /// Half-width of the window that produced the indices.
    pub window: i64,
}

/// `D_j = B^j A^{-j}` as row-major `f64`.
pub fn mismatch_f64(a: &ExpansiveMatrix, b: &ExpansiveMatrix, j: i64) -> Vec<f64> {
    let d = a.dim();
    let bj = b.power_f64(j);
    let ainv = a.power_f64(-j);
    let mut out = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = (0..d).map(|i| bj[r * d + i] * ainv[i * d + c]).sum();
        }
    }
    out
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Order in which indices are tried: `1, 2, …, w, 0, -1, …, -w`.
fn window_order(w: i64) -> impl Iterator<Item = i64> {
    (1..=w).chain(std::iter::once(0)).chain((1..=w).map(|v| -v))
}

fn greedy(
    a: &ExpansiveMatrix,
    b: &ExpansiveMatrix,
    x0: &[f64],
    n: usize,
    w: i64,
    floor: f64,
) -> Option<(Vec<i64>, Vec<Vec<f64>>)> {
    let d = a.dim();
    let mut js = Vec::new();
    let mut imgs: Vec<Vec<f64>> = Vec::new();
    for j in window_order(w) {
        let m = mismatch_f64(a, b, j);
        let mut y = vec![0.0; d];
        apply_f64(&m, x0, &mut y);
        if y.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if imgs.iter().all(|z| dist(z, &y) >= floor) {
            js.push(j);
            imgs.push(y);
            if js.len() == n {
                return Some((js, imgs));
            }
        }
    }
    None
}

pub fn find_separating_points(
    a: &ExpansiveMatrix,
    b: &ExpansiveMatrix,
    n: usize,
    cfg: &SearchConfig,
) -> Result<SeparationData> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.dim(),
        });
    }
    if n < 2 {
        return Err(Error::InvalidInput("need at least two indices".into()));
    }
    if cfg.window < 1 || cfg.max_window < cfg.window || !(cfg.distance_floor > 0.0) {
        return Err(Error::InvalidInput("bad search configuration".into()));
    }
    let mut candidates: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.random_points {
        let v: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            candidates.push(v.iter().map(|x| x / norm).collect());
        }
    }
    let mut w = cfg.window;
    loop {
        for x0 in &candidates {
            let Some((indices, images)) = greedy(a, b, x0, n, w, cfg.distance_floor) else {
                continue;
            };
            let mut min_distance = f64::INFINITY;
            for s in 0..n {
                for t in s + 1..n {
                    min_distance = min_distance.min(dist(&images[s], &images[t]));
                }
            }
            let delta = 0.5 * min_distance * (1.0 - 1e-9);
            let r_prime = indices
                .iter()
                .map(|&j| spectral_norm_f64(&mismatch_f64(a, b, j), d))
                .fold(1.0 + 1e-6, f64::max);
            let epsilon = 0.99 * delta / (r_prime * (d as f64).sqrt());
            return Ok(SeparationData {
                indices,
                x0: x0.clone(),
                epsilon,
                r_prime,
                delta,
                min_distance,
                images,
                window: w,
            });
        }
        if w >= cfg.max_window {
            return Err(Error::NotFound(format!(
                "no {n} separated orbit points for j in [-{w}, {w}]; the orbit may be finite or the window too small"
            )));
        }
        w = (2 * w).min(cfg.max_window);
    }
}

impl SeparationData {
    /// Recomputes every stated invariant; returns the violated ones.
    pub fn audit(&self, a: &ExpansiveMatrix, b: &ExpansiveMatrix) -> Vec<String> {
        let d = a.dim();
        let mut bad = Vec::new();
        let imgs: Vec<Vec<f64>> = self
            .indices
            .iter()
            .map(|&j| {
                let mut y = vec![0.0; d];
                apply_f64(&mismatch_f64(a, b, j), &self.x0, &mut y);
                y
            })
            .collect();
        let mut min_d = f64::INFINITY;
        for s in 0..imgs.len() {
            for t in s + 1..imgs.len() {
                min_d = min_d.min(dist(&imgs[s], &imgs[t]));
            }
        }
        if !(min_d > 0.0) {
            bad.push("images are not pairwise distinct".into());
        }
        if !(self.delta < 0.5 * min_d) {
            bad.push(format!("delta {} is not below half the distance {}", self.delta, min_d));
        }
        let max_norm = self
            .indices
            .iter()
            .map(|&j| spectral_norm_f64(&mismatch_f64(a, b, j), d))
            .fold(0.0, f64::max);
        if max_norm > self.r_prime || self.r_prime <= 1.0 {
            bad.push(format!("r' = {} does not bound the norms {max_norm}", self.r_prime));
        }
        if !(self.epsilon < self.delta / (self.r_prime * (d as f64).sqrt())) {
            bad.push("epsilon too large".into());
        }
        bad
    }

    /// Whether the transported balls `D_{j_t} B_{Rε}(R x_0)` are pairwise
    /// disjoint: each lies in the ball of radius `R δ` around `R D_{j_t} x_0`.
    pub fn transported_balls_disjoint(&self, radius_scale: f64) -> bool {
        let r = radius_scale;
        let n = self.images.len();
        let ok_inside = r * self.epsilon * self.r_prime < r * self.delta;
        let ok_apart =
            (0..n).all(|s| (s + 1..n).all(|t| dist(&self.images[s], &self.images[t]) * r > 2.0 * r * self.delta));
        ok_inside && ok_apart
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::Matrix;

    fn pair() -> (ExpansiveMatrix, ExpansiveMatrix) {
        (
            ExpansiveMatrix::new(Matrix::diag_int(&[2, 2])).unwrap(),
            ExpansiveMatrix::new(Matrix::scaled_rotation(2.0, 1.0)).unwrap(),
        )
    }

    #[test]
    fn rotation_pair() {
        let (a, b) = pair();
        let s = find_separating_points(&a, &b, 3, &SearchConfig::default()).unwrap();
        assert_eq!(s.indices, vec![1, 2, 3]);
        assert_eq!(s.x0, vec![1.0, 0.0]);
        for (t, &j) in s.indices.iter().enumerate() {
            let jf = j as f64;
            assert!((s.images[t][0] - jf.cos()).abs() < 1e-12 && (s.images[t][1] - jf.sin()).abs() < 1e-12);
        }
        let md = 2.0 * 0.5f64.sin();
        assert!((s.min_distance - md).abs() < 1e-12);
        assert!(s.delta < md / 2.0 && s.delta > 0.4794);
        assert!((s.r_prime - (1.0 + 1e-6)).abs() < 1e-12);
        assert!((s.epsilon - 0.99 * s.delta / (s.r_prime * 2f64.sqrt())).abs() < 1e-15);
        assert!((s.epsilon - 0.3356).abs() < 1e-4);
        assert!(s.audit(&a, &b).is_empty());
        for r in [0.5, 1.0, 37.0] {
            assert!(s.transported_balls_disjoint(r));
        }
    }

    #[test]
    fn equal_matrices_have_no_separation() {
        let (a, _) = pair();
        let cfg = SearchConfig {
            window: 8,
            max_window: 16,
            random_points: 2,
            ..Default::default()
        };
        assert!(matches!(
            find_separating_points(&a, &a, 2, &cfg),
            Err(Error::NotFound(_))
        ));
    }
}
