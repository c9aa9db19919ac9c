//! Shared generators for the integration suites.
#![allow(dead_code)]

use rand::Rng;
use tlseq::matrices::{ExpansiveMatrix, Matrix};
use tlseq::norms::ExplicitSequence;
use tlseq::orbit::{Exponent, SpaceParams};

pub fn expansive(m: Matrix) -> ExpansiveMatrix {
    ExpansiveMatrix::new(m).expect("expansive")
}

pub fn exponent(s: &str) -> Exponent {
    s.parse().expect("exponent")
}

pub fn space(m: &ExpansiveMatrix, alpha: f64, p: &str, q: &str) -> SpaceParams {
    SpaceParams::new(m.clone(), alpha, exponent(p), exponent(q)).expect("space")
}

/// Small rational dilations used across the suites.
pub fn matrices(d: usize) -> Vec<ExpansiveMatrix> {
    match d {
        1 => vec![
            expansive(Matrix::diag_int(&[2])),
            expansive(Matrix::diag_int(&[-3])),
            expansive(Matrix::from_ratio_rows(&[&[(3, 2)]]).unwrap()),
        ],
        _ => vec![
            expansive(Matrix::diag_int(&[2, 2])),
            expansive(Matrix::diag_int(&[2, -2])),
            expansive(Matrix::from_int_rows(&[&[0, 2], &[2, 0]]).unwrap()),
            expansive(Matrix::from_int_rows(&[&[1, 1], &[-1, 1]]).unwrap()),
            expansive(Matrix::from_int_rows(&[&[2, 1], &[0, 2]]).unwrap()),
        ],
    }
}

/// Random nonzero real coefficient of modulus in `[0.1, 3]`.
pub fn coefficient<R: Rng>(rng: &mut R) -> f64 {
    let v = rng.gen_range(0.1..3.0);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// Up to `max_atoms` atoms on scales `lo..=hi` with indices near the origin.
pub fn random_sequence<R: Rng>(rng: &mut R, d: usize, lo: i64, hi: i64, max_atoms: usize) -> ExplicitSequence {
    let mut e = ExplicitSequence::new(d);
    let n = rng.gen_range(1..=max_atoms);
    for _ in 0..n {
        let j = rng.gen_range(lo..=hi);
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
        e.insert(j, k, coefficient(rng)).expect("insert");
    }
    e
}

pub fn random_single_scale<R: Rng>(rng: &mut R, d: usize, max_atoms: usize) -> Vec<(Vec<i64>, f64)> {
    let n = rng.gen_range(1..=max_atoms);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    while out.len() < n {
        let k: Vec<i64> = (0..d).map(|_| rng.gen_range(-20..=20)).collect();
        if seen.insert(k.clone()) {
            out.push((k, coefficient(rng)));
        }
    }
    out
}

pub fn lp(v: impl IntoIterator<Item = f64>, p: f64) -> f64 {
    let v: Vec<f64> = v.into_iter().map(f64::abs).collect();
    if p.is_infinite() {
        v.into_iter().fold(0.0, f64::max)
    } else {
        v.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}
