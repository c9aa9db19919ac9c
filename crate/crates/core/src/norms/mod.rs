//! Quasi-norms of coefficient sequences in all four exponent regimes.

mod closed_form;
mod exact;
mod infty;
mod lp;
mod sequence;
mod stack;
mod stacked;

use serde::{Deserialize, Serialize};

pub use closed_form::{norm_closed_form_pq, r_triangle_defect};
pub use infty::{norm_infty_q, norm_sup_sup};
pub use lp::norm_lp;
pub use sequence::{
    CoefficientSequence, ExplicitSequence, ImplicitScale, ImplicitSequence, Membership, ModulusFn, SequenceDocument,
    SequenceEntry,
};
pub use stack::{scale_weight, stack_value, StackEvaluator};
pub use stacked::{stacked_sup_norm, SubBoxCallback, SubBoxFamily};

use crate::error::Result;
use crate::geometry::{McConfig, DEFAULT_OVERLAY_BUDGET};
use crate::orbit::SpaceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Mc,
}

impl std::str::FromStr for Method {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "mc" => Ok(Method::Mc),
            _ => Err(crate::Error::Parse(format!(
                "unknown method {s:?}, expected exact or mc"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodTag {
    Exact1d,
    Exact2dOverlay,
    MonteCarlo,
    ClosedForm,
    SupFormula,
}

impl MethodTag {
    pub fn is_exact(self) -> bool {
        !matches!(self, MethodTag::MonteCarlo)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormConfig {
    pub method: Method,
    pub mc: McConfig,
    pub overlay_budget: usize,
    pub candidate_budget: usize,
    pub mc_candidate_samples: u64,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig {
            method: Method::Exact,
            mc: McConfig::default(),
            overlay_budget: DEFAULT_OVERLAY_BUDGET,
            candidate_budget: 1 << 16,
            mc_candidate_samples: 1 << 15,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling_boxes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
    /// Largest average any unexamined cube could reach, as a norm value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pruning_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_cube: Option<(i64, Vec<i64>)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_scales: Option<(i64, i64)>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    pub method: MethodTag,
    /// Zero for exact paths, one standard error for Monte Carlo.
    pub error_bound: f64,
    pub diagnostics: Diagnostics,
}

/// `‖c‖` in the space `s`, dispatched on the exponent regime.
pub fn norm(c: &CoefficientSequence, s: &SpaceParams, cfg: &NormConfig) -> Result<NormResult> {
    match (s.p.to_f64().is_infinite(), s.q.to_f64().is_infinite()) {
        (false, _) => norm_lp(c, s, cfg),
        (true, false) => norm_infty_q(c, s, cfg),
        (true, true) => norm_sup_sup(c, s),
    }
}
