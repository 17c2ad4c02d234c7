//! Exact secant-variety invariants of parametrized projective varieties.
//!
//! A variety `X ⊂ P^N` is given by a polynomial map
//! `t ↦ [φ_0(t) : … : φ_N(t)]`. Dimensions are ranks of Jacobian-type
//! matrices evaluated at random points over a large prime field (or the
//! rationals), so every invariant is an exact integer that is correct with
//! overwhelming probability.
//!
//! - [`field`]: scalars and seeded sampling
//! - [`poly`]: sparse polynomials and parametrizations
//! - [`linalg`]: rank, kernels, reduction modulo a row space
//! - [`catalog`]: Veronese, Segre, inner projections, cones, ...
//! - [`engine`]: dimension, secant dimension, tangential projection,
//!   second fundamental form, Gauss contact locus
//! - [`classify`]: bounds and case lists near the extremal embedding dimension
//! - [`report`]: run configuration, documents, and the verification matrix

pub mod catalog;
pub mod classify;
pub mod engine;
pub mod error;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod report;

pub use error::{Error, Result};
pub use field::{Field, FieldConfig, Mode, Sampler, Scalar};
pub use linalg::Matrix;
pub use poly::{AffineMap, MultiPoly, Parametrization, Taylor2Data};
