//! Essential supremum of the `q`-stack built on sub-boxes of each cube.

use std::sync::Arc;

use super::exact::{atoms, stack_cells_sub, Atom, Combine};
use super::{CoefficientSequence, ExplicitSequence};
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_OVERLAY_BUDGET;
use crate::orbit::SpaceParams;

/// Materialization limit for implicit input.
const MATERIALIZE_BUDGET: usize = 1 << 14;

/// Custom sub-box per atom: `(j, k) ↦ (lo, hi)` inside `[0,1]^d`.
pub type SubBoxCallback = Arc<dyn Fn(i64, &[i64]) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

/// Which part of each unit cube carries the indicator.
#[derive(Clone)]
pub enum SubBoxFamily {
    Full,
    /// Centered box of the given volume fraction.
    Centered {
        fraction: f64,
    },
    Custom(SubBoxCallback),
}

impl std::fmt::Debug for SubBoxFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubBoxFamily::Full => write!(f, "Full"),
            SubBoxFamily::Centered { fraction } => write!(f, "Centered({fraction})"),
            SubBoxFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

fn check_box(d: usize, lo: &[f64], hi: &[f64], eps: f64) -> Result<()> {
    if lo.len() != d || hi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: lo.len(),
        });
    }
    if lo.iter().zip(hi).any(|(a, b)| !(0.0 <= *a && a < b && *b <= 1.0)) {
        return Err(Error::InvalidInput("sub-box must lie inside [0,1]^d".into()));
    }
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    if vol <= eps {
        return Err(Error::InvalidInput(format!("sub-box volume {vol} is not above {eps}")));
    }
    Ok(())
}

/// `ess sup_x (Σ_{j,k} (|det A|^{-j(α+1/2)} |c_{j,k}| 1_{A^j(S_{j,k}+k)}(x))^q)^{1/q}`.
pub fn stacked_sup_norm(c: &CoefficientSequence, s: &SpaceParams, family: &SubBoxFamily, eps: f64) -> Result<f64> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidInput("eps must lie in (0, 1)".into()));
    }
    let d = s.dim();
    let owned: ExplicitSequence;
    let e = match c {
        CoefficientSequence::Explicit(e) => e,
        CoefficientSequence::Implicit(im) => {
            owned = im.materialize(MATERIALIZE_BUDGET)?;
            &owned
        }
    };
    let at = atoms(e, s);
    let centered;
    let sub: Option<Box<dyn Fn(&Atom) -> Option<(Vec<f64>, Vec<f64>)>>> = match family {
        SubBoxFamily::Full => None,
        SubBoxFamily::Centered { fraction } => {
            let side = fraction.powf(1.0 / d as f64);
            centered = (vec![0.5 - side / 2.0; d], vec![0.5 + side / 2.0; d]);
            check_box(d, &centered.0, &centered.1, eps)?;
            let b = centered.clone();
            Some(Box::new(move |_| Some(b.clone())))
        }
        SubBoxFamily::Custom(f) => {
            for a in &at {
                let (lo, hi) = f(a.j, &a.k);
                check_box(d, &lo, &hi, eps)?;
            }
            let f = f.clone();
            Some(Box::new(move |a: &Atom| Some(f(a.j, &a.k))))
        }
    };
    let q = s.q.to_f64();
    let cells = stack_cells_sub(&s.matrix, &at, q, DEFAULT_OVERLAY_BUDGET.max(at.len()), sub.as_deref())?;
    let comb = Combine::new(q);
    Ok(cells
        .iter()
        .filter(|c| c.measure > 0.0)
        .map(|c| comb.root(c.combined))
        .fold(0.0, f64::max))
}
