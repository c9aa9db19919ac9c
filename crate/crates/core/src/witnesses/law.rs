//! Measuring how witness norms scale with the size parameter.

use serde::{Deserialize, Serialize};

use super::families::{FamilyKind, WitnessFamily};
use super::manifest::WitnessManifest;
use crate::error::{Error, Result};
use crate::norms::{norm, CoefficientSequence, Method, MethodTag, NormConfig, NormResult};

/// Which number is tracked across sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawTarget {
    /// The first space's norm.
    #[default]
    A,
    /// The second space's norm (pair constructions only).
    B,
    /// `‖c‖_B / ‖c‖_A`.
    Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRow {
    pub size: i64,
    /// Abscissa of the fit: `j0` for the delta family, `ln size` otherwise.
    pub x: f64,
    pub measured: f64,
    /// One standard error of `measured` (zero on exact paths).
    pub error_bound: f64,
    pub predicted: f64,
    /// `measured / predicted`.
    pub ratio: f64,
    pub methods: Vec<MethodTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub family: FamilyKind,
    pub target: LawTarget,
    pub rows: Vec<LawRow>,
    /// Least-squares slope of `ln measured` against `x`.
    pub slope: f64,
    pub intercept: f64,
    /// The same fit applied to the predictions.
    pub expected_slope: f64,
    pub residuals: Vec<f64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Set when the sampling error in `ln measured` exceeds half the fitted
    /// change across the sizes.
    pub inconclusive: bool,
}

/// Least squares `y ≈ a + b x`, returned as `(b, a)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (b, my - b * mx)
}

fn evaluate(f: &WitnessFamily, cfg: &NormConfig) -> Result<NormResult> {
    let mut cfg = cfg.clone();
    if matches!(f.sequence, CoefficientSequence::Implicit(_)) {
        cfg.method = Method::Mc;
    }
    norm(&f.sequence, &f.space, &cfg)
}

/// Builds the manifest at every size and fits the growth of the target.
pub fn verify_norm_law(
    manifest: &WitnessManifest,
    sizes: &[i64],
    target: LawTarget,
    cfg: &NormConfig,
) -> Result<LawReport> {
    if sizes.len() < 2 {
        return Err(Error::InvalidInput("a law needs at least two sizes".into()));
    }
    let paired = matches!(manifest.family, FamilyKind::Case1 | FamilyKind::Case2);
    if target != LawTarget::A && !paired {
        return Err(Error::InvalidCombination(format!(
            "{target:?} is only defined for the pair constructions"
        )));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let built = manifest.with_size(size).build()?;
        let x = if manifest.family == FamilyKind::Delta {
            size as f64
        } else {
            if size <= 0 {
                return Err(Error::InvalidInput(format!("sizes must be positive, got {size}")));
            }
            (size as f64).ln()
        };
        let ra = evaluate(&built.a, cfg)?;
        let (measured, error_bound, predicted, methods) = match target {
            LawTarget::A => (ra.value, ra.error_bound, built.a.law.reference(), vec![ra.method]),
            LawTarget::B | LawTarget::Ratio => {
                let fb = built.b.as_ref().expect("pair construction");
                let rb = evaluate(fb, cfg)?;
                if target == LawTarget::B {
                    (rb.value, rb.error_bound, fb.law.reference(), vec![rb.method])
                } else {
                    let v = rb.value / ra.value;
                    let rel = ((ra.error_bound / ra.value).powi(2) + (rb.error_bound / rb.value).powi(2)).sqrt();
                    (
                        v,
                        v * rel,
                        fb.law.reference() / built.a.law.reference(),
                        vec![ra.method, rb.method],
                    )
                }
            }
        };
        if !(measured > 0.0 && predicted > 0.0) {
            return Err(Error::InvalidInput(format!(
                "size {size} gives a vanishing norm; no log-log law can be fitted"
            )));
        }
        rows.push(LawRow {
            size,
            x,
            measured,
            error_bound,
            predicted,
            ratio: measured / predicted,
            methods,
        });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.x).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.measured.ln()).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r.predicted.ln()).collect();
    let (slope, intercept) = fit_line(&xs, &ys);
    let (expected_slope, _) = fit_line(&xs, &ps);
    let residuals = xs.iter().zip(&ys).map(|(x, y)| y - (intercept + slope * x)).collect();
    let span = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let log_error = rows.iter().map(|r| r.error_bound / r.measured).fold(0.0, f64::max);
    let inconclusive = log_error > 0.5 * (slope * span).abs();
    Ok(LawReport {
        family: manifest.family,
        target,
        min_ratio: rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min),
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        rows,
        slope,
        intercept,
        expected_slope,
        residuals,
        inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{Matrix, MatrixDocument};
    use crate::orbit::SpaceDocument;

    fn doc(p: &str, q: &str, alpha: f64) -> SpaceDocument {
        SpaceDocument {
            matrix: MatrixDocument::from_matrix(&Matrix::diag_int(&[2, 2])),
            alpha: serde_json::json!(alpha),
            p: p.parse().unwrap(),
            q: q.parse().unwrap(),
        }
    }

    #[test]
    fn line_fit() {
        let (b, a) = fit_line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((b - 2.0).abs() < 1e-12 && (a - 1.0).abs() < 1e-12);
    }

    #[test]
    fn delta_law_is_exact() {
        let m = WitnessManifest::new(FamilyKind::Delta, doc("2", "1", 0.5), 0);
        let r = verify_norm_law(&m, &[-2, -1, 0, 1, 2], LawTarget::A, &NormConfig::default()).unwrap();
        // slope of ln ‖c‖ in j0 is -ln 4 · (α + 1/2 - 1/p)
        let want = -(4f64).ln() * 0.5;
        assert!((r.slope - want).abs() < 1e-9);
        assert!((r.expected_slope - want).abs() < 1e-9);
        assert!((r.min_ratio - 1.0).abs() < 1e-9 && (r.max_ratio - 1.0).abs() < 1e-9);
        assert!(!r.inconclusive);
    }

    #[test]
    fn multiscale_sup_law_is_exact() {
        let m = WitnessManifest::new(FamilyKind::Multiscale, doc("inf", "2", 0.0), 1);
        let r = verify_norm_law(&m, &[1, 2, 4], LawTarget::A, &NormConfig::default()).unwrap();
        assert!((r.slope - 0.5).abs() < 0.02, "{r:?}");
    }

    #[test]
    fn targets_need_pairs() {
        let m = WitnessManifest::new(FamilyKind::Delta, doc("1", "1", 0.0), 0);
        assert!(verify_norm_law(&m, &[0, 1], LawTarget::Ratio, &NormConfig::default()).is_err());
        assert!(verify_norm_law(&m, &[0], LawTarget::A, &NormConfig::default()).is_err());
    }
}
