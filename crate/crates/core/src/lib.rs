//! Discrete anisotropic Triebel–Lizorkin sequence spaces `f^α_{p,q}(A)` for
//! expansive dilation matrices `A`.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrices`]: exact-rational and floating matrices, expansiveness
//!   certificates and memoized integer powers.
//! * [`orbit`]: finiteness of `{B^j A^{-j}}`, its decomposition into classes,
//!   and the classification of equal spaces.
//! * [`geometry`]: dilated cubes, regions, 2-D polygon overlay and
//!   reproducible Monte Carlo integration.
//! * [`norms`]: the quasi-norms in all four exponent regimes.
//! * [`witnesses`]: coefficient families whose norms follow prescribed laws,
//!   and the tooling to measure those laws.

// `!(x > 0.0)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod matrices;
pub mod norms;
pub mod orbit;
pub mod witnesses;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, ConvexPolytope, DyadicCube, McConfig, McEstimate, Region};
pub use matrices::{ExpansiveMatrix, Matrix, Mode, Scalar};
pub use norms::{CoefficientSequence, ExplicitSequence, Method, NormConfig, NormResult};
pub use orbit::{Exponent, OrbitDecomposition, OrbitVerdict, SpaceParams};
