//! Coefficient families whose norms follow prescribed laws, and the
//! tooling to measure those laws.

mod families;
mod law;
mod manifest;
mod separation;

pub use families::{
    case1_audit, case1_witness, case2_witness, delta_witness, matched_alpha, multiscale_witness, single_scale_witness,
    Case1Geometry, Case2Geometry, FamilyKind, NormLaw, PairWitness, WitnessFamily, MAX_WITNESS_INDICES,
};
pub use law::{fit_line, verify_norm_law, LawReport, LawRow, LawTarget};
pub use manifest::{BuiltWitness, WitnessManifest, DEFAULT_CASE2_DELTA};
pub use separation::{find_separating_points, mismatch_f64, SearchConfig, SeparationData};
