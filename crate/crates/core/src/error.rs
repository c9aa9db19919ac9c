use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("mixed scalar modes are not allowed (rational vs float)")]
    MixedMode,

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not expansive: {0}")]
    NotExpansive(String),

    #[error("expansiveness is indeterminate after {n_max} Gelfand steps (last bound {last_bound})")]
    Indeterminate { n_max: u32, last_bound: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid combination: {0}")]
    InvalidCombination(String),

    #[error("capacity exceeded: {what} ({count} > {budget})")]
    Capacity {
        what: &'static str,
        count: usize,
        budget: usize,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
