use rayon::prelude::*;
use serde::Serialize;

use super::estimate::{decide, draw, EstimateOptions, Mode, NEURON};
use super::{binomial_sigma, ExperimentError};
use crate::arrangement::{ArrangementConfig, Hyperplane};
use crate::intercept::{classify, intercept_tuple, InterceptTuple, Membership, PartitionTag};
use crate::network::{
    configuration_codeword, configuration_index, image_intercepts, Architecture,
    ConfigurationIndex, Distribution,
};
use crate::rng::derive_seed;
use crate::stability::{all_negative_test, neuron_row, Decision};

/// Conditional frequency of the event "stable but not all-negative" within one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEntry {
    pub index: usize,
    pub codeword: String,
    pub conditional_samples: u64,
    pub conditional_hits: u64,
    pub delta_hat: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub n0: usize,
    pub n1: usize,
    pub samples: u64,
    pub marginal_discards: u64,
    pub rejections: u64,
    pub seed: u64,
    pub entries: Vec<DeltaEntry>,
    /// Sum of all `delta_hat`.
    pub total: f64,
    pub total_std_err: f64,
    /// Sum of `delta_hat` over the single-minus configurations `1..=n0+1`.
    pub facet_sum: f64,
    pub facet_sum_std_err: f64,
    /// Hits and samples pooled over the configurations after the named ones.
    pub residual_hits: u64,
    pub residual_samples: u64,
}

/// One draw with `n1 = n0 + 1`, reduced to what the decomposition needs.
struct ConfigOutcome {
    index: usize,
    decision: Decision,
    all_negative: bool,
    p: Vec<f64>,
    w: Vec<f64>,
    b: f64,
    rejections: usize,
}

impl ConfigOutcome {
    fn e_plus(&self) -> bool {
        self.decision == Decision::Stable && !self.all_negative
    }
}

fn sample_configurations(
    n0: usize,
    dist: &Distribution,
    samples: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<Vec<ConfigOutcome>, ExperimentError> {
    if samples == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let arch = Architecture::new(vec![n0, n0 + 1, 1])?;
    let arr_cfg = ArrangementConfig {
        eps: opts.degeneracy.eps,
        ..ArrangementConfig::default()
    };
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let drawn = draw(&arch, dist, seed, i, &opts.degeneracy)?;
            let ConfigurationIndex(index) = configuration_index(&drawn.params, &arr_cfg)?;
            let p = image_intercepts(&drawn.params, opts.degeneracy.eps)?
                .values()
                .to_vec();
            let decision = decide(&drawn, Mode::Exact, opts)?;
            let all_negative = all_negative_test(&drawn.params, NEURON)?;
            let (w, b) = neuron_row(&drawn.params, NEURON)?;
            Ok(ConfigOutcome {
                index,
                decision,
                all_negative,
                p,
                w: w.to_vec(),
                b,
                rejections: drawn.rejections,
            })
        })
        .collect()
}

fn named_configurations(n0: usize) -> usize {
    if n0 >= 2 {
        2 * n0 + 3
    } else {
        n0 + 2
    }
}

fn delta_report(n0: usize, seed: u64, outcomes: &[ConfigOutcome]) -> DeltaReport {
    let n1 = n0 + 1;
    let count = 1usize << n1;
    let mut cond = vec![(0u64, 0u64); count];
    let (mut marginal, mut rejections) = (0u64, 0u64);
    for o in outcomes {
        rejections += o.rejections as u64;
        if o.decision == Decision::Marginal {
            marginal += 1;
            continue;
        }
        cond[o.index].0 += 1;
        cond[o.index].1 += u64::from(o.e_plus());
    }
    let entries: Vec<DeltaEntry> = cond
        .iter()
        .enumerate()
        .map(|(index, &(n, h))| {
            let delta_hat = if n == 0 { 0.0 } else { h as f64 / n as f64 };
            DeltaEntry {
                index,
                codeword: configuration_codeword(ConfigurationIndex(index), n0)
                    .expect("index in range")
                    .to_string(),
                conditional_samples: n,
                conditional_hits: h,
                delta_hat,
                std_err: binomial_sigma(delta_hat, n),
            }
        })
        .collect();
    let sum = |range: std::ops::Range<usize>| {
        let slice = &entries[range];
        let value = slice.iter().map(|e| e.delta_hat).sum::<f64>();
        let var = slice.iter().map(|e| e.std_err * e.std_err).sum::<f64>();
        (value, var.sqrt())
    };
    let (total, total_std_err) = sum(0..count);
    let (facet_sum, facet_sum_std_err) = sum(1..n1 + 1);
    let residual = &entries[named_configurations(n0).min(count)..];
    DeltaReport {
        n0,
        n1,
        samples: outcomes.len() as u64 - marginal,
        marginal_discards: marginal,
        rejections,
        seed,
        total,
        total_std_err,
        facet_sum,
        facet_sum_std_err,
        residual_hits: residual.iter().map(|e| e.conditional_hits).sum(),
        residual_samples: residual.iter().map(|e| e.conditional_samples).sum(),
        entries,
    }
}

/// Per-configuration conditional frequencies of "stable but not all-negative"
/// for networks `(n0, n0 + 1, 1)`.
pub fn estimate_deltas(
    n0: usize,
    dist: &Distribution,
    samples: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<DeltaReport, ExperimentError> {
    let outcomes = sample_configurations(n0, dist, samples, seed, opts)?;
    Ok(delta_report(n0, seed, &outcomes))
}

/// Vertex-configuration identity for paper index `i` (1-based): the drop from
/// configuration `i` to `i + n0 + 1` against half the frequency of `S^1_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case3Row {
    pub i: usize,
    pub delta_diff_hat: f64,
    pub delta_diff_std_err: f64,
    pub right_samples: u64,
    pub s1_hits: u64,
    pub half_s1_hat: f64,
    pub half_s1_std_err: f64,
    pub agree: bool,
}

/// Both sides of the configuration-0 identity, estimated from independent
/// sample sets, plus the vertex-configuration rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct C0Report {
    pub n0: usize,
    pub seed: u64,
    pub left_samples: u64,
    pub left_hits: u64,
    pub delta0_hat: f64,
    pub delta0_std_err: f64,
    pub right_samples: u64,
    pub h1_hits: u64,
    pub half_h1_hat: f64,
    pub half_h1_std_err: f64,
    pub combined_sigma: f64,
    pub agree: bool,
    /// Configuration-0 draws of the right-hand set whose hyperplane has undefined intercepts.
    pub undefined_intercepts: u64,
    pub case3: Vec<Case3Row>,
}

fn second_layer_hyperplane(o: &ConfigOutcome) -> Hyperplane {
    Hyperplane {
        normal: o.w.clone(),
        offset: o.b,
    }
}

/// Estimates `delta_0` from one sample set and half the frequency of
/// `H in H^1_p` within configuration 0 from an independent one.
pub fn check_c0_relation(
    n0: usize,
    dist: &Distribution,
    samples: u64,
    seed: u64,
    opts: &EstimateOptions,
) -> Result<C0Report, ExperimentError> {
    let eps = opts.eps;
    let left = sample_configurations(n0, dist, samples, seed, opts)?;
    let right = sample_configurations(n0, dist, samples, derive_seed(seed, u64::MAX), opts)?;
    let deltas = delta_report(n0, seed, &left);

    let membership = |o: &ConfigOutcome| -> Result<Option<Membership>, ExperimentError> {
        let h = second_layer_hyperplane(o);
        if intercept_tuple(&h, eps).is_err() {
            return Ok(None);
        }
        let p = InterceptTuple::new(o.p.clone(), 0.0)?;
        Ok(Some(classify(&p, &h, eps)?))
    };
    let in_h1 = |m: &Membership| {
        m.class()
            .is_some_and(|c| c.lambdas.iter().all(|l| *l <= 1.0 + eps))
    };

    let (mut right_n, mut h1_hits, mut undefined) = (0u64, 0u64, 0u64);
    let mut s1 = vec![(0u64, 0u64); n0 + 2];
    for o in right.iter().filter(|o| o.decision != Decision::Marginal) {
        let vertex_block = n0 >= 2 && (n0 + 2..=2 * n0 + 2).contains(&o.index);
        if o.index != 0 && !vertex_block {
            continue;
        }
        let Some(m) = membership(o)? else {
            undefined += u64::from(o.index == 0);
            continue;
        };
        if o.index == 0 {
            right_n += 1;
            h1_hits += u64::from(in_h1(&m));
        } else {
            let i = o.index - n0 - 1;
            s1[i].0 += 1;
            let tagged = matches!(m.class(), Some(c) if c.tag == PartitionTag::S(i - 1));
            s1[i].1 += u64::from(tagged && in_h1(&m));
        }
    }

    let e0 = &deltas.entries[0];
    let half_h1_hat = if right_n == 0 {
        0.0
    } else {
        0.5 * h1_hits as f64 / right_n as f64
    };
    let half_h1_std_err = 0.5 * binomial_sigma(2.0 * half_h1_hat, right_n);
    let combined_sigma = (e0.std_err.powi(2) + half_h1_std_err.powi(2)).sqrt();

    let case3 = if n0 >= 2 {
        (1..=n0 + 1)
            .map(|i| {
                let (a, b) = (&deltas.entries[i], &deltas.entries[i + n0 + 1]);
                let (n, h) = s1[i];
                let frac = if n == 0 { 0.0 } else { h as f64 / n as f64 };
                let diff = a.delta_hat - b.delta_hat;
                let diff_se = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
                let half_se = 0.5 * binomial_sigma(frac, n);
                Case3Row {
                    i,
                    delta_diff_hat: diff,
                    delta_diff_std_err: diff_se,
                    right_samples: n,
                    s1_hits: h,
                    half_s1_hat: 0.5 * frac,
                    half_s1_std_err: half_se,
                    agree: (diff - 0.5 * frac).abs()
                        <= 3.0 * (diff_se.powi(2) + half_se.powi(2)).sqrt(),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    Ok(C0Report {
        n0,
        seed,
        left_samples: e0.conditional_samples,
        left_hits: e0.conditional_hits,
        delta0_hat: e0.delta_hat,
        delta0_std_err: e0.std_err,
        right_samples: right_n,
        h1_hits,
        half_h1_hat,
        half_h1_std_err,
        combined_sigma,
        agree: (e0.delta_hat - half_h1_hat).abs() <= 3.0 * combined_sigma,
        undefined_intercepts: undefined,
        case3,
    })
}
