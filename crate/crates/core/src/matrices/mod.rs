//! Scalars and matrices in exact-rational or floating mode, expansiveness
//! certification and memoized integer powers.

mod expansive;
mod format;
mod matrix;
mod scalar;

pub use expansive::{is_expansive, matrix_equal, Certificate, ExpansiveMatrix, ExpansiveVerdict, ExpansivenessConfig};
pub use format::{matrix_to_json, parse_matrix_json, MatrixDocument};
pub use matrix::{apply_f64, spectral_norm_f64, Entries, Matrix};
pub use scalar::{Mode, Scalar};

pub(crate) use scalar::{parse_big_rational, rational_to_f64};

/// Default tolerance for float-mode matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
