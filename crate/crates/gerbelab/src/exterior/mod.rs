//! Exact exterior calculus of polynomial-coefficient differential forms on ℝⁿ.
//!
//! Coefficients live in ℚ(i)[π] so that every algebraic identity (d² = 0, the
//! Cartan formula, cocycle conditions downstream) is checked exactly; numbers
//! only become doubles at evaluation time.

pub mod form;
pub mod fraction;
pub mod poly;
pub mod scalar;

pub use form::{PolyForm, VectorField};
pub use poly::{Poly, PolyMap};
pub use scalar::{GaussRat, Rat, Scalar};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExteriorError {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("degree mismatch: {context}")]
    DegreeMismatch { context: String },
}
