use rayon::prelude::*;
use serde::Serialize;

use super::ExperimentError;
use crate::arrangement::{
    enumerate_regions_with_facets, facet_statistics, region_counts, ArrangementConfig, Sign,
};
use crate::linear::{maximize_linear_robust, norm, Constraint, LpOptions};
use crate::network::{
    first_layer_arrangement, sample_nondegenerate, Architecture, DegeneracyCheck, Distribution,
    NetworkParams,
};
use crate::rng::derive_seed;

/// Closed-form facet statistics for one `m`, with an enumeration cross-check on
/// sampled arrangements when the instance is small.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FacetRow {
    pub n0: usize,
    pub m: usize,
    pub regions: u128,
    pub bounded: u128,
    pub unbounded: u128,
    pub total_facets: u128,
    pub avg_numer: u128,
    pub avg_denom: u128,
    pub avg: f64,
    /// Sampled arrangements enumerated for the cross-check (0 when skipped).
    pub trials: usize,
    /// Whether every sampled arrangement matched the closed forms exactly.
    pub empirical_match: Option<bool>,
    /// Mean facet count of a maximally negative region over the trials.
    pub max_negative_facets_mean: Option<f64>,
    /// `2 n0 + 1`.
    pub axis_bound: usize,
}

/// Largest instance enumerated by [`facet_report`].
const EMPIRICAL_LIMIT: (usize, usize) = (10, 3);

/// Facet statistics for `m` in `m_range` hyperplanes in `R^{n0}`. For
/// `m <= 10` and `n0 <= 3`, `trials` first-layer arrangements drawn from `dist`
/// are enumerated and compared with the closed forms.
pub fn facet_report(
    n0: usize,
    m_range: std::ops::RangeInclusive<usize>,
    dist: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<Vec<FacetRow>, ExperimentError> {
    if m_range.is_empty() || *m_range.start() <= n0 || n0 == 0 {
        return Err(ExperimentError::InvalidRange);
    }
    m_range
        .map(|m| facet_row(n0, m, dist, trials, derive_seed(seed, m as u64)))
        .collect()
}

fn facet_row(
    n0: usize,
    m: usize,
    dist: &Distribution,
    trials: usize,
    seed: u64,
) -> Result<FacetRow, ExperimentError> {
    let counts = region_counts(m as u64, n0 as u64)?;
    let stats = facet_statistics(m as u64, n0 as u64)?;
    let avg = *stats.avg_facets.numer() as f64 / *stats.avg_facets.denom() as f64;
    let small = m <= EMPIRICAL_LIMIT.0 && n0 <= EMPIRICAL_LIMIT.1 && trials > 0;
    let (empirical_match, max_negative_facets_mean, trials) = if small {
        let arch = Architecture::new(vec![n0, m, 1])?;
        let cfg = ArrangementConfig::default();
        let per_trial = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let params = sample_nondegenerate(
                    &arch,
                    dist,
                    derive_seed(seed, t),
                    &DegeneracyCheck::default(),
                )?
                .params;
                let regions =
                    enumerate_regions_with_facets(&first_layer_arrangement(&params)?, &cfg)?;
                let facet_sum: usize = regions.iter().map(|r| r.facet_count.unwrap_or(0)).sum();
                let bounded = regions.iter().filter(|r| r.bounded).count();
                let matches = regions.len() as u128 == counts.total
                    && bounded as u128 == counts.bounded
                    && facet_sum as u128 == 2 * stats.total_facets;
                let most = regions
                    .iter()
                    .map(|r| r.codeword.count(Sign::Minus))
                    .max()
                    .unwrap_or(0);
                let negative: Vec<usize> = regions
                    .iter()
                    .filter(|r| r.codeword.count(Sign::Minus) == most)
                    .filter_map(|r| r.facet_count)
                    .collect();
                let mean = negative.iter().sum::<usize>() as f64 / negative.len() as f64;
                Ok((matches, mean))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let all = per_trial.iter().all(|(ok, _)| *ok);
        let mean = per_trial.iter().map(|(_, f)| f).sum::<f64>() / per_trial.len() as f64;
        (Some(all), Some(mean), trials)
    } else {
        (None, None, 0)
    };
    Ok(FacetRow {
        n0,
        m,
        regions: counts.total,
        bounded: counts.bounded,
        unbounded: counts.total - counts.bounded,
        total_facets: stats.total_facets,
        avg_numer: *stats.avg_facets.numer(),
        avg_denom: *stats.avg_facets.denom(),
        avg,
        trials,
        empirical_match,
        max_negative_facets_mean,
        axis_bound: 2 * n0 + 1,
    })
}

/// `hits[j][k]` is whether `lambdas[k] * e_j` lies in the image of the first
/// layer, i.e. whether some `x` has pre-activation `lambdas[k]` on neuron `j`
/// and a non-positive pre-activation on every other neuron.
pub fn half_axis_hits(
    params: &NetworkParams,
    lambdas: &[f64],
    eps: f64,
) -> Result<Vec<Vec<bool>>, ExperimentError> {
    let first = params.layer(1)?;
    let n0 = first.cols();
    let scaled: Vec<(Vec<f64>, f64, f64)> = first
        .matrix
        .iter()
        .zip(&first.offset)
        .map(|(w, b)| {
            let s = norm(w);
            (w.iter().map(|v| v / s).collect(), b / s, s)
        })
        .collect();
    let opts = LpOptions {
        eps,
        ..LpOptions::default()
    };
    let mut hits = Vec::with_capacity(scaled.len());
    for j in 0..scaled.len() {
        let mut row = Vec::with_capacity(lambdas.len());
        for &lambda in lambdas {
            let mut constraints = Vec::with_capacity(scaled.len() + 1);
            for (k, (normal, offset, s)) in scaled.iter().enumerate() {
                if k == j {
                    let shifted = offset - lambda / s;
                    constraints.push(Constraint::at_least_zero(normal.clone(), shifted));
                    constraints.push(Constraint::at_most_zero(normal.clone(), shifted));
                } else {
                    constraints.push(Constraint::at_most_zero(normal.clone(), *offset));
                }
            }
            row.push(maximize_linear_robust(&vec![0.0; n0], &constraints, &opts)?.is_feasible());
        }
        hits.push(row);
    }
    Ok(hits)
}
