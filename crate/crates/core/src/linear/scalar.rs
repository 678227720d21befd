use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// Numeric field the linear kernels run over.
///
/// `f64` is the production scalar. [`BigRational`] gives exact arithmetic for
/// degenerate regression cases: its tolerance is always zero, so every sign
/// test is decided exactly.
pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Threshold below which a magnitude is treated as zero, given the
    /// configured floating-point epsilon.
    fn tolerance(eps: f64) -> Self;

    fn from_f64_lossless(x: f64) -> Self {
        Self::from_f64(x).expect("finite input")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance(eps: f64) -> Self {
        eps
    }
}

impl Scalar for BigRational {
    fn tolerance(_eps: f64) -> Self {
        BigRational::zero()
    }
}

pub(crate) fn max_abs<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc })
}
