//! Reproducible Monte Carlo integration.
//!
//! Samples are split into fixed chunks of `CHUNK` points; chunk `c` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` on stream `c`. Per-chunk moments
//! are merged in a fixed pairwise tree, so the result depends only on
//! `(seed, samples)` and not on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::region::Region;
use crate::error::{Error, Result};

pub const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let n = a.n + b.n;
        let delta = b.mean - a.mean;
        let mean = a.mean + delta * (b.n as f64 / n as f64);
        let m2 = a.m2 + b.m2 + delta * delta * (a.n as f64 * b.n as f64 / n as f64);
        Moments { n, mean, m2 }
    }
}

fn merge_tree(mut v: Vec<Moments>) -> Moments {
    if v.is_empty() {
        return Moments::default();
    }
    while v.len() > 1 {
        v = v
            .chunks(2)
            .map(|c| if c.len() == 2 { Moments::merge(c[0], c[1]) } else { c[0] })
            .collect();
    }
    v[0]
}

/// Mean and standard error of `g(u)` for `u` uniform on `[0,1)^dim`.
pub fn sample_unit_cube<G>(dim: usize, cfg: &McConfig, g: G) -> Result<(f64, f64)>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    if cfg.samples < 2 {
        return Err(Error::InvalidInput("Monte Carlo needs at least 2 samples".into()));
    }
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let mut u = vec![0.0; dim];
            let mut m = Moments::default();
            for _ in 0..n {
                for x in u.iter_mut() {
                    *x = rng.gen::<f64>();
                }
                m.push(g(&u));
            }
            m
        })
        .collect();
    let m = merge_tree(parts);
    let var = m.m2 / (m.n - 1) as f64;
    Ok((m.mean, (var / m.n as f64).sqrt()))
}

/// `∫_X f` by uniform sampling over the bounding box of `X`; points outside
/// `X` contribute zero.
pub fn integrate_mc<F>(f: F, region: &Region, cfg: &McConfig) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    region.validate()?;
    let (lo, hi) = region.bbox();
    let vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    if !(vol > 0.0) {
        return Err(Error::InvalidInput("region has zero volume".into()));
    }
    let d = lo.len();
    let is_box = matches!(region, Region::Box { .. });
    let (mean, se) = sample_unit_cube(d, cfg, |u| {
        let mut x = [0.0f64; 8];
        let mut xs = vec![];
        let x: &mut [f64] = if d <= 8 {
            &mut x[..d]
        } else {
            xs.resize(d, 0.0);
            &mut xs
        };
        for i in 0..d {
            x[i] = lo[i] + (hi[i] - lo[i]) * u[i];
        }
        if is_box || region.contains(x) {
            f(x)
        } else {
            0.0
        }
    })?;
    Ok(McEstimate {
        estimate: mean * vol,
        std_error: se * vol,
        samples: cfg.samples,
    })
}

/// `∫_P f` over the parallelepiped `P = origin + M [0,1]^d`, with `M`
/// row-major.
pub fn integrate_mc_affine<F>(f: F, origin: &[f64], m: &[f64], cfg: &McConfig) -> Result<McEstimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = origin.len();
    if m.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: m.len(),
        });
    }
    let vol = crate::matrices::Matrix::from_f64(d, m.to_vec())?.abs_det_f64();
    if !(vol > 0.0) {
        return Err(Error::InvalidInput("parallelepiped has zero volume".into()));
    }
    let (mean, se) = sample_unit_cube(d, cfg, |u| {
        let mut x = vec![0.0; d];
        crate::matrices::apply_f64(m, u, &mut x);
        for (xi, o) in x.iter_mut().zip(origin) {
            *xi += o;
        }
        f(&x)
    })?;
    Ok(McEstimate {
        estimate: mean * vol,
        std_error: se * vol,
        samples: cfg.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_square() {
        let cfg = McConfig {
            samples: 10_000,
            seed: 3,
        };
        let r = integrate_mc(|_| 1.0, &Region::unit_cube(2), &cfg).unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.std_error, 0.0);
    }

    #[test]
    fn disc_area() {
        let cfg = McConfig::default();
        let sq = Region::boxed(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let r = integrate_mc(|x| if x[0] * x[0] + x[1] * x[1] < 1.0 { 1.0 } else { 0.0 }, &sq, &cfg).unwrap();
        assert!((r.estimate - std::f64::consts::PI).abs() < 3.0 * r.std_error);
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = McConfig {
            samples: 100_003,
            seed: 11,
        };
        let f = |x: &[f64]| (x[0] * 7.0).sin().abs() + x[1];
        let region = Region::ball(vec![0.0, 0.0], 1.0).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| integrate_mc(f, &region, &cfg).unwrap());
        let b = four.install(|| integrate_mc(f, &region, &cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn affine_volume() {
        let cfg = McConfig { samples: 1000, seed: 0 };
        let r = integrate_mc_affine(|_| 2.0, &[1.0, 1.0], &[2.0, 1.0, 0.0, 3.0], &cfg).unwrap();
        assert!((r.estimate - 12.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        let cfg = McConfig { samples: 1, seed: 0 };
        assert!(integrate_mc(|_| 1.0, &Region::unit_cube(2), &cfg).is_err());
        let flat = Region::boxed(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert!(integrate_mc(|_| 1.0, &flat, &McConfig::default()).is_err());
    }
}
