//! Small dense linear algebra and a simplex LP kernel, generic over the scalar.

mod dense;
mod lp;
mod scalar;

pub use dense::{
    det_in_place, determinant, dot, norm, rank, solve_in_place, solve_linear, AffineMap,
};
pub use lp::{maximize_linear, maximize_linear_robust, Constraint, LpOptions, LpResult, Sense};
pub use scalar::Scalar;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearError {
    #[error("matrix is singular within tolerance")]
    Singular,
    #[error("matrix is not square")]
    NotSquare,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry")]
    NonFinite,
    #[error("no constraints given and full-space mode not requested")]
    NoConstraints,
    #[error("simplex lost numerical consistency; retry with exact arithmetic")]
    NumericalInstability,
}
