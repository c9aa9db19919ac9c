//! Geometry-free evaluation for `p = q` and the r-triangle defect.

use super::{norm, CoefficientSequence, Diagnostics, MethodTag, NormConfig, NormResult};
use crate::error::{Error, Result};
use crate::orbit::SpaceParams;

/// `(Σ_{j,k} |det A|^{-jp(α+1/2-1/p)} |c_{j,k}|^p)^{1/p}` for `p = q < ∞`.
pub fn norm_closed_form_pq(c: &CoefficientSequence, s: &SpaceParams) -> Result<NormResult> {
    let Some(e) = c.as_explicit() else {
        return Err(Error::InvalidCombination(
            "closed form needs an explicit sequence".into(),
        ));
    };
    if s.p != s.q || s.p.to_f64().is_infinite() {
        return Err(Error::InvalidCombination(format!(
            "closed form needs p = q < inf, got p = {}, q = {}",
            s.p, s.q
        )));
    }
    if e.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: e.dim(),
        });
    }
    let p = s.p.to_f64();
    let shift = s.det_exponent();
    let sum: f64 = e
        .iter()
        .map(|(j, _, v)| s.matrix.det_abs_pow(-(j as f64) * p * shift) * v.norm().powf(p))
        .sum();
    Ok(NormResult {
        value: sum.powf(1.0 / p),
        method: MethodTag::ClosedForm,
        error_bound: 0.0,
        diagnostics: Diagnostics::default(),
    })
}

/// `‖a+b‖^r - ‖a‖^r - ‖b‖^r` with `r = min(1, p, q)`; never positive for a
/// quasi-norm of this kind.
pub fn r_triangle_defect(
    a: &CoefficientSequence,
    b: &CoefficientSequence,
    s: &SpaceParams,
    cfg: &NormConfig,
) -> Result<f64> {
    let (Some(ea), Some(eb)) = (a.as_explicit(), b.as_explicit()) else {
        return Err(Error::InvalidCombination(
            "r-triangle defect needs explicit sequences".into(),
        ));
    };
    let r = 1f64.min(s.p.to_f64()).min(s.q.to_f64());
    let sum: CoefficientSequence = ea.add(eb)?.into();
    let n = |c: &CoefficientSequence| -> Result<f64> { Ok(norm(c, s, cfg)?.value.powf(r)) };
    Ok(n(&sum)? - n(a)? - n(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{ExpansiveMatrix, Matrix};
    use crate::norms::{norm_lp, ExplicitSequence};

    fn space(p: &str, q: &str) -> SpaceParams {
        let a = ExpansiveMatrix::new(Matrix::diag_int(&[2, 2])).unwrap();
        SpaceParams::new(a, 0.0, p.parse().unwrap(), q.parse().unwrap()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let mut e = ExplicitSequence::new(2);
        e.insert(0, vec![0, 0], 3.0).unwrap();
        e.insert(3, vec![-2, 7], 4.0).unwrap();
        let c: CoefficientSequence = e.into();
        let s = space("2", "2");
        assert!((norm_closed_form_pq(&c, &s).unwrap().value - 5.0).abs() < 1e-12);
        let geo = norm_lp(&c, &s, &NormConfig::default()).unwrap().value;
        assert!((geo - 5.0).abs() < 1e-12);

        let d: CoefficientSequence = ExplicitSequence::delta(2, vec![0, 0]).into();
        assert!((norm_closed_form_pq(&d, &space("1", "1")).unwrap().value - 4.0).abs() < 1e-12);

        let scaled: CoefficientSequence = c.as_explicit().unwrap().scaled((-2.5).into()).into();
        assert!((norm_closed_form_pq(&scaled, &s).unwrap().value - 12.5).abs() < 1e-12);
        assert!(matches!(
            norm_closed_form_pq(&c, &space("1", "2")),
            Err(Error::InvalidCombination(_))
        ));
    }

    #[test]
    fn defect_examples() {
        let cfg = NormConfig::default();
        let s = space("1", "1");
        let d: CoefficientSequence = ExplicitSequence::delta(0, vec![0, 0]).into();
        assert!(r_triangle_defect(&d, &d, &s, &cfg).unwrap().abs() < 1e-12);
        let far: CoefficientSequence = ExplicitSequence::delta(1, vec![5, 5]).into();
        assert!(r_triangle_defect(&d, &far, &s, &cfg).unwrap().abs() < 1e-12);
        let mut e = ExplicitSequence::new(2);
        e.insert(0, vec![0, 0], 1.0).unwrap();
        e.insert(-1, vec![1, 0], 0.5).unwrap();
        let c: CoefficientSequence = e.into();
        assert!(r_triangle_defect(&c, &d, &space("1/2", "2"), &cfg).unwrap() <= 1e-9);
    }
}
