use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::output::{serialize_sig, serialize_sig_opt};
use super::{ratio_to_f64, theorem_probability, wilson_interval, ExperimentError, Z99};
use crate::network::{
    sample_nondegenerate, Architecture, DegeneracyCheck, Distribution, NetworkParams,
};
use crate::rng::derive_seed;
use crate::stability::{
    all_negative_test, decide_by_vertices, detector_paper_style, Decision, DetectorConfig,
    NeuronRef,
};

/// How each sampled network is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Detector,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Detector => "detector",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateOptions {
    /// `None` picks exact mode up to `exact_cap` hidden neurons and the detector above.
    pub mode: Option<Mode>,
    pub exact_cap: usize,
    /// Margins within `eps` of zero are discarded as marginal.
    pub eps: f64,
    /// Detector settings; `None` uses [`DetectorConfig::for_input_dim`].
    pub detector: Option<DetectorConfig>,
    pub degeneracy: DegeneracyCheck,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            mode: None,
            exact_cap: 20,
            eps: 1e-9,
            detector: None,
            degeneracy: DegeneracyCheck::default(),
        }
    }
}

impl EstimateOptions {
    pub fn resolve_mode(&self, n1: usize) -> Mode {
        self.mode.unwrap_or(if n1 <= self.exact_cap {
            Mode::Exact
        } else {
            Mode::Detector
        })
    }
}

/// Result of one estimation cell. Serialized floats carry 10 significant digits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub n0: usize,
    pub n1: usize,
    pub mode: Mode,
    /// Decided (non-marginal) samples.
    pub samples: u64,
    pub hits: u64,
    pub marginal_discards: u64,
    #[serde(serialize_with = "serialize_sig")]
    pub p_hat: f64,
    #[serde(serialize_with = "serialize_sig")]
    pub ci_low: f64,
    #[serde(serialize_with = "serialize_sig")]
    pub ci_high: f64,
    #[serde(serialize_with = "serialize_sig_opt")]
    pub theory: Option<f64>,
    pub seed: u64,
    /// Hits whose weights and bias are all negative.
    #[serde(skip)]
    pub e_minus_hits: u64,
    /// Degenerate draws that were resampled.
    #[serde(skip)]
    pub rejections: u64,
}

impl EstimateReport {
    pub fn e_minus_hat(&self) -> f64 {
        self.e_minus_hits as f64 / self.samples as f64
    }

    /// Height `1 / 4^{n0+1}` of the reference line.
    pub fn reference(&self) -> f64 {
        0.25f64.powi(self.n0 as i32 + 1)
    }
}

pub(crate) const NEURON: NeuronRef = NeuronRef { layer: 2, index: 0 };

/// One sampled network, in the architecture `(n0, n1, 1)`.
pub(crate) struct Drawn {
    pub params: NetworkParams,
    pub rejections: usize,
    pub seed: u64,
}

pub(crate) fn draw(
    arch: &Architecture,
    dist: &Distribution,
    seed: u64,
    index: u64,
    check: &DegeneracyCheck,
) -> Result<Drawn, ExperimentError> {
    let s = derive_seed(seed, index);
    let sampled = sample_nondegenerate(arch, dist, s, check)?;
    Ok(Drawn {
        params: sampled.params,
        rejections: sampled.rejections,
        seed: s,
    })
}

pub(crate) fn decide(
    drawn: &Drawn,
    mode: Mode,
    opts: &EstimateOptions,
) -> Result<Decision, ExperimentError> {
    Ok(match mode {
        Mode::Exact => decide_by_vertices(&drawn.params, NEURON, opts.eps)?.0,
        Mode::Detector => {
            let cfg = opts
                .detector
                .unwrap_or_else(|| DetectorConfig::for_input_dim(drawn.params.arch().input_dim()));
            // streams 0 and 1 of a seed distinct from the parameter seed
            let seed = derive_seed(drawn.seed, u64::MAX);
            if detector_paper_style(&drawn.params, NEURON, &cfg, seed)? {
                Decision::Stable
            } else {
                Decision::Unstable
            }
        }
    })
}

/// Fraction of i.i.d. networks `(n0, n1, 1)` whose output-layer neuron input,
/// i.e. the single second-layer neuron, is stably unactivated.
pub fn estimate_prob_stable(
    n0: usize,
    n1: usize,
    dist: &Distribution,
    samples: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<EstimateReport, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let arch = Architecture::new(vec![n0, n1, 1])?;
    let mode = opts.resolve_mode(n1);
    let mut check = opts.degeneracy;
    if n1 > opts.exact_cap {
        check.require_generic = false;
    }
    let outcomes = (0..samples)
        .into_par_iter()
        .map(|i| {
            let drawn = draw(&arch, dist, seed, i, &check)?;
            let decision = decide(&drawn, mode, opts)?;
            let negative = all_negative_test(&drawn.params, NEURON)?;
            Ok((decision, negative, drawn.rejections))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let (mut hits, mut marginal, mut e_minus, mut rejections) = (0u64, 0u64, 0u64, 0u64);
    for (decision, negative, rejected) in outcomes {
        rejections += rejected as u64;
        match decision {
            Decision::Marginal => marginal += 1,
            Decision::Stable => {
                hits += 1;
                e_minus += u64::from(negative);
            }
            Decision::Unstable => {}
        }
    }
    let decided = samples - marginal;
    let p_hat = if decided == 0 {
        0.0
    } else {
        hits as f64 / decided as f64
    };
    let (ci_low, ci_high) = wilson_interval(hits, decided, Z99);
    let theory = theorem_probability(n0, n1).ok().map(|r| ratio_to_f64(&r));
    Ok(EstimateReport {
        n0,
        n1,
        mode,
        samples: decided,
        hits,
        marginal_discards: marginal,
        p_hat,
        ci_low,
        ci_high,
        theory,
        seed,
        e_minus_hits: e_minus,
        rejections,
    })
}

/// One [`estimate_prob_stable`] cell per `n1` in `n1_range`; cell `n1` uses
/// seed `derive_seed(seed, n1)`.
pub fn conjecture_sweep(
    n0: usize,
    n1_range: std::ops::RangeInclusive<usize>,
    dist: &Distribution,
    samples_per_cell: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<Vec<EstimateReport>, ExperimentError> {
    if n1_range.is_empty() || *n1_range.start() == 0 {
        return Err(ExperimentError::InvalidRange);
    }
    n1_range
        .map(|n1| {
            estimate_prob_stable(
                n0,
                n1,
                dist,
                samples_per_cell,
                derive_seed(seed, n1 as u64),
                opts,
            )
        })
        .collect()
}

/// Detector verdicts tallied against the exact verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectorAgreement {
    pub n0: usize,
    pub n1: usize,
    pub trials: u64,
    pub marginal_discards: u64,
    pub agreements: u64,
    /// Detector says stable, exact says unstable.
    pub false_positives: u64,
    /// Detector says unstable, exact says stable.
    pub false_negatives: u64,
    pub exact_stable: u64,
    pub seed: u64,
}

impl DetectorAgreement {
    /// Agreement rate over the non-marginal trials.
    pub fn agreement_rate(&self) -> f64 {
        self.agreements as f64 / (self.trials - self.marginal_discards) as f64
    }
}

/// Runs the detector and the exact decision on the same `trials` networks.
pub fn detector_agreement(
    n0: usize,
    n1: usize,
    dist: &Distribution,
    trials: u64,
    seed: u64,
    detector: &DetectorConfig,
    opts: &EstimateOptions,
) -> Result<DetectorAgreement, ExperimentError> {
    if trials == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let arch = Architecture::new(vec![n0, n1, 1])?;
    let with_detector = EstimateOptions {
        detector: Some(*detector),
        ..*opts
    };
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let drawn = draw(&arch, dist, seed, i, &opts.degeneracy)?;
            Ok((
                decide(&drawn, Mode::Exact, opts)?,
                decide(&drawn, Mode::Detector, &with_detector)?,
            ))
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let mut report = DetectorAgreement {
        n0,
        n1,
        trials,
        marginal_discards: 0,
        agreements: 0,
        false_positives: 0,
        false_negatives: 0,
        exact_stable: 0,
        seed,
    };
    for (exact, detected) in outcomes {
        match (exact, detected) {
            (Decision::Marginal, _) => report.marginal_discards += 1,
            (e, d) if e == d => {
                report.agreements += 1;
                report.exact_stable += u64::from(e == Decision::Stable);
            }
            (Decision::Unstable, _) => report.false_positives += 1,
            _ => {
                report.false_negatives += 1;
                report.exact_stable += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_rejected() {
        let d = Distribution::UniformSymmetric { half_width: 1.0 };
        assert_eq!(
            estimate_prob_stable(2, 3, &d, 0, 1, &EstimateOptions::default()),
            Err(ExperimentError::NoSamples)
        );
    }

    #[test]
    fn report_invariants_hold() {
        let d = Distribution::Normal { std_dev: 1.0 };
        let r = estimate_prob_stable(2, 3, &d, 2000, 9, &EstimateOptions::default()).unwrap();
        assert!(r.hits <= r.samples);
        assert_eq!(r.samples + r.marginal_discards, 2000);
        assert!(r.ci_low <= r.p_hat && r.p_hat <= r.ci_high);
        assert_eq!(r.p_hat, r.hits as f64 / r.samples as f64);
        assert_eq!(r.theory, Some(0.078125));
        assert!(r.e_minus_hits <= r.hits);
        assert_eq!(
            r,
            estimate_prob_stable(2, 3, &d, 2000, 9, &EstimateOptions::default()).unwrap()
        );
    }
}
