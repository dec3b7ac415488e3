//! Exact, horizon-bounded computations with submeasures and ideals on ω, hypergraph
//! submeasures, and finitely supported measures on `ω ∪ {p}`.
//!
//! Every numeric routine is generic over [`Scalar`]. [`Rational`] is the exact instance used by
//! default; [`Float`] is available for quick exploratory runs.

pub mod constructions;
pub mod error;
pub mod hypergraph;
pub mod omega;
pub mod orders;
pub mod scalar;
pub mod stone;
pub mod submeasure;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact scalar.
pub type Rational = num_rational::BigRational;
/// Approximate scalar for exploration; strict comparisons are not trustworthy.
pub type Float = f64;

pub type ExactSubmeasure = submeasure::Submeasure<Rational>;
pub type FloatSubmeasure = submeasure::Submeasure<Float>;
