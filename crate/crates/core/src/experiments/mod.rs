//! Monte Carlo estimators, the configuration decomposition, sweeps, facet
//! tables and report writers.
//!
//! Sample `i` of a run with seed `s` is generated from `derive_seed(s, i)`, and
//! per-sample outcomes are collected in index order before being folded, so
//! reports do not depend on the number of worker threads.

mod deltas;
mod estimate;
mod facets;
mod output;

pub use deltas::{check_c0_relation, estimate_deltas, C0Report, Case3Row, DeltaEntry, DeltaReport};
pub use estimate::{
    conjecture_sweep, detector_agreement, estimate_prob_stable, DetectorAgreement, EstimateOptions,
    EstimateReport, Mode,
};
pub use facets::{facet_report, half_axis_hits, FacetRow};
pub use output::{fmt_sig, sweep_svg, write_csv, write_json, write_rows_csv};

use num_rational::Ratio;
use thiserror::Error;

use crate::arrangement::ArrangementError;
use crate::intercept::InterceptError;
use crate::linear::LinearError;
use crate::network::NetworkError;
use crate::stability::StabilityError;

/// Two-sided 99% standard normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("no closed form for n0 = {n0}, n1 = {n1}; it requires n1 <= n0 + 1")]
    OutOfTheoremRange { n0: usize, n1: usize },
    #[error("closed form overflows 128-bit integers")]
    Overflow,
    #[error("empty or invalid range")]
    InvalidRange,
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Intercept(#[from] InterceptError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error("output error: {0}")]
    Output(String),
}

/// Exact probability that a second-layer neuron is stably unactivated under
/// i.i.d. symmetric parameters: `1 / 2^{n1+1}` for `n1 <= n0` and
/// `(2^{n0} + 1) / 4^{n0+1}` for `n1 = n0 + 1`.
pub fn theorem_probability(n0: usize, n1: usize) -> Result<Ratio<u128>, ExperimentError> {
    if n1 == 0 || n0 == 0 {
        return Err(ExperimentError::InvalidRange);
    }
    let pow2 = |e: usize| {
        1u128
            .checked_shl(e as u32)
            .filter(|_| e < 128)
            .ok_or(ExperimentError::Overflow)
    };
    if n1 <= n0 {
        Ok(Ratio::new(1, pow2(n1 + 1)?))
    } else if n1 == n0 + 1 {
        Ok(Ratio::new(pow2(n0)? + 1, pow2(2 * n0 + 2)?))
    } else {
        Err(ExperimentError::OutOfTheoremRange { n0, n1 })
    }
}

pub fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Wilson score interval for `hits` successes in `n` trials at quantile `z`,
/// clamped so that it contains the point estimate.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// Binomial standard error `sqrt(p (1 - p) / n)`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        assert_eq!(theorem_probability(5, 3).unwrap(), Ratio::new(1, 16));
        assert_eq!(theorem_probability(2, 3).unwrap(), Ratio::new(5, 64));
        assert_eq!(theorem_probability(1, 2).unwrap(), Ratio::new(3, 16));
        let values: Vec<f64> = (1..=4)
            .map(|n0| ratio_to_f64(&theorem_probability(n0, n0 + 1).unwrap()))
            .collect();
        assert_eq!(values, vec![0.1875, 0.078125, 0.03515625, 0.0166015625]);
        assert_eq!(
            theorem_probability(2, 4),
            Err(ExperimentError::OutOfTheoremRange { n0: 2, n1: 4 })
        );
        assert_eq!(
            theorem_probability(127, 127),
            Err(ExperimentError::Overflow)
        );
    }

    #[test]
    fn wilson_contains_estimate() {
        for (h, n) in [(0, 10), (10, 10), (3, 7), (7812, 100_000)] {
            let (lo, hi) = wilson_interval(h, n, Z99);
            let p = h as f64 / n as f64;
            assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
        }
        // reference values for 50 of 100 at 99%
        let (lo, hi) = wilson_interval(50, 100, Z99);
        assert!((lo - 0.375_279_6).abs() < 1e-6 && (hi - 0.624_720_4).abs() < 1e-6);
    }
}
