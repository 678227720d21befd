//! Whether a second-layer neuron is stably unactivated, i.e. whether
//! `g(x) = b + sum_j w_j relu(W_{1,j} . x + b_{1,j})` is negative on all of
//! `R^{n_0}` with a margin, so that it stays negative under small perturbations.

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arrangement::{
    for_each_combination, region_codewords, ArrangementConfig, ArrangementError, Codeword,
};
use crate::linear::{
    det_in_place, maximize_linear_robust, solve_in_place, Constraint, LinearError, LpOptions,
    LpResult,
};
use crate::network::{first_layer_arrangement, relu, NetworkError, NetworkParams};
use crate::rng::{stream_rng, uniform_in_ball};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("only second-layer neurons are supported, got layer {0}")]
    UnsupportedLayer(usize),
    #[error("neuron index {index} out of range for width {width}")]
    NeuronOutOfRange { index: usize, width: usize },
    #[error("first-layer arrangement is not generic")]
    NotGeneric,
    #[error("margin {} is within tolerance of zero", .0.margin)]
    Marginal(Box<StabilityVerdict>),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Arrangement(ArrangementError),
    #[error(transparent)]
    Linear(#[from] LinearError),
}

impl From<ArrangementError> for StabilityError {
    fn from(e: ArrangementError) -> Self {
        match e {
            ArrangementError::NotGeneric => StabilityError::NotGeneric,
            other => StabilityError::Arrangement(other),
        }
    }
}

/// Neuron `index` (0-based) of layer `layer` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct NeuronRef {
    pub layer: usize,
    pub index: usize,
}

impl NeuronRef {
    pub fn second_layer(index: usize) -> Self {
        NeuronRef { layer: 2, index }
    }
}

/// Incoming weights and bias of a second-layer neuron.
pub fn neuron_row(
    params: &NetworkParams,
    neuron: NeuronRef,
) -> Result<(&[f64], f64), StabilityError> {
    if neuron.layer != 2 {
        return Err(StabilityError::UnsupportedLayer(neuron.layer));
    }
    let layer = params.layer(2)?;
    if neuron.index >= layer.rows() {
        return Err(StabilityError::NeuronOutOfRange {
            index: neuron.index,
            width: layer.rows(),
        });
    }
    Ok((&layer.matrix[neuron.index], layer.offset[neuron.index]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityConfig {
    /// Margins with `|margin| <= eps` are reported as marginal.
    pub eps: f64,
    pub arrangement: ArrangementConfig,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            eps: 1e-9,
            arrangement: ArrangementConfig::default(),
        }
    }
}

/// Supremum of the neuron's pre-activation over one closed region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCertificate {
    pub codeword: Codeword,
    /// LP over the closed region; a bounded optimum includes the constant term.
    pub result: LpResult<f64>,
}

fn serialize_margin<S: Serializer>(margin: &f64, s: S) -> Result<S::Ok, S::Error> {
    if margin.is_finite() {
        s.serialize_f64(*margin)
    } else {
        s.serialize_none()
    }
}

/// Outcome of the per-region decision. An infinite margin serializes as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub stable: bool,
    pub marginal: bool,
    #[serde(serialize_with = "serialize_margin")]
    pub margin: f64,
    pub regions_checked: usize,
    pub unbounded_regions: usize,
    #[serde(skip)]
    pub certificates: Vec<RegionCertificate>,
}

/// Decides stability by maximizing the neuron's pre-activation over the
/// closure of every region of the first-layer arrangement.
///
/// On the closure of region `c` the pre-activation equals the affine function
/// `b + sum_{c_j = +} w_j (W_{1,j} . x + b_{1,j})`; the closures cover the
/// input space, so the largest regional supremum is the global one.
pub fn is_stably_unactivated_exact(
    params: &NetworkParams,
    neuron: NeuronRef,
    cfg: &StabilityConfig,
) -> Result<StabilityVerdict, StabilityError> {
    let (w, b) = neuron_row(params, neuron)?;
    let first = params.layer(1)?;
    let arr = first_layer_arrangement(params)?;
    let regions = region_codewords(&arr, &cfg.arrangement)?;
    let n0 = first.cols();
    let units = arr.unit_rows();
    let opts = LpOptions {
        eps: cfg.arrangement.eps,
        ..LpOptions::default()
    };

    let certificates = regions
        .into_par_iter()
        .map(|(codeword, _)| {
            let mut objective = vec![0.0; n0];
            let mut constant = b;
            let mut constraints = Vec::with_capacity(units.len());
            for (j, h) in units.iter().enumerate() {
                let s = codeword[j].as_f64();
                constraints.push(Constraint::at_least_zero(
                    h.normal.iter().map(|v| s * v).collect(),
                    s * h.offset,
                ));
                if s > 0.0 {
                    objective
                        .iter_mut()
                        .zip(&first.matrix[j])
                        .for_each(|(o, a)| *o += w[j] * a);
                    constant += w[j] * first.offset[j];
                }
            }
            let result = if units.is_empty() {
                LpResult::Bounded {
                    optimum: 0.0,
                    argmax: vec![0.0; n0],
                }
            } else {
                maximize_linear_robust(&objective, &constraints, &opts)?
            };
            let result = match result {
                LpResult::Bounded { optimum, argmax } => LpResult::Bounded {
                    optimum: optimum + constant,
                    argmax,
                },
                other => other,
            };
            Ok(RegionCertificate { codeword, result })
        })
        .collect::<Result<Vec<_>, StabilityError>>()?;

    let unbounded_regions = certificates
        .iter()
        .filter(|c| matches!(c.result, LpResult::Unbounded { .. }))
        .count();
    let margin = certificates
        .iter()
        .map(|c| match c.result {
            LpResult::Bounded { optimum, .. } => optimum,
            LpResult::Unbounded { .. } => f64::INFINITY,
            LpResult::Infeasible => f64::NEG_INFINITY,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let marginal = margin.abs() <= cfg.eps;
    let verdict = StabilityVerdict {
        stable: unbounded_regions == 0 && margin < -cfg.eps,
        marginal,
        margin,
        regions_checked: certificates.len(),
        unbounded_regions,
        certificates,
    };
    if marginal {
        return Err(StabilityError::Marginal(Box::new(verdict)));
    }
    Ok(verdict)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Stable,
    Unstable,
    Marginal,
}

/// Supremum of the neuron's pre-activation over `R^{n_0}` (`+inf` when
/// unbounded), computed from the arrangement's vertices and extreme rays.
///
/// Requires a generic first layer. With `n_1 <= n_0` the first-layer
/// pre-activations range over all of `R^{n_1}`, so the supremum is `b` when no
/// weight is positive and `+inf` otherwise. With `n_1 > n_0` every region is
/// a pointed polyhedron: the supremum is infinite iff the recession function
/// `sum_j w_j relu(W_{1,j} . d)` is positive on some extreme ray `d` (a line
/// where `n_0 - 1` hyperplane directions meet), and otherwise it is attained at
/// a vertex (a point where `n_0` hyperplanes meet).
pub fn vertex_margin(params: &NetworkParams, neuron: NeuronRef) -> Result<f64, StabilityError> {
    let (w, b) = neuron_row(params, neuron)?;
    let first = params.layer(1)?;
    let (n0, m) = (first.cols(), first.rows());
    if m <= n0 {
        return Ok(if w.iter().any(|&v| v > 0.0) {
            f64::INFINITY
        } else {
            b
        });
    }

    let recession = |d: &[f64]| -> f64 {
        first
            .matrix
            .iter()
            .zip(w)
            .map(|(row, wj)| wj * relu(row.iter().zip(d).map(|(a, x)| a * x).sum()))
            .sum()
    };
    let scale: f64 = first
        .matrix
        .iter()
        .zip(w)
        .map(|(row, wj)| wj.abs() * crate::linear::norm(row))
        .sum();
    let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let k = n0 - 1;
    let mut unbounded = false;
    let mut minor = vec![0.0; k * k];
    let mut ray = vec![0.0; n0];
    for_each_combination(m, k, |subset| {
        // generalized cross product of the subset's rows spans their common null line
        for (c, r) in ray.iter_mut().enumerate() {
            for (i, &j) in subset.iter().enumerate() {
                let mut col = 0;
                for (cc, &a) in first.matrix[j].iter().enumerate() {
                    if cc != c {
                        minor[i * k + col] = a;
                        col += 1;
                    }
                }
            }
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            *r = sign
                * if k == 0 {
                    1.0
                } else {
                    det_in_place(&mut minor, k)
                };
        }
        let len = crate::linear::norm(&ray);
        if len > 0.0 {
            ray.iter_mut().for_each(|v| *v /= len);
            let up = recession(&ray);
            ray.iter_mut().for_each(|v| *v = -*v);
            let down = recession(&ray);
            unbounded = up > tol || down > tol;
        }
        !unbounded
    });
    if unbounded {
        return Ok(f64::INFINITY);
    }

    let mut best = f64::NEG_INFINITY;
    let mut a = vec![0.0; n0 * n0];
    let mut x = vec![0.0; n0];
    for_each_combination(m, n0, |subset| {
        for (i, &j) in subset.iter().enumerate() {
            a[i * n0..(i + 1) * n0].copy_from_slice(&first.matrix[j]);
            x[i] = -first.offset[j];
        }
        if solve_in_place(&mut a, &mut x, n0, 1e-12) {
            let g = b + first
                .matrix
                .iter()
                .zip(&first.offset)
                .zip(w)
                .map(|((row, bj), wj)| {
                    wj * relu(row.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + bj)
                })
                .sum::<f64>();
            best = best.max(g);
        }
        true
    });
    Ok(best)
}

/// Stable / unstable / marginal from [`vertex_margin`].
pub fn decide_by_vertices(
    params: &NetworkParams,
    neuron: NeuronRef,
    eps: f64,
) -> Result<(Decision, f64), StabilityError> {
    let margin = vertex_margin(params, neuron)?;
    let decision = if margin.abs() <= eps {
        Decision::Marginal
    } else if margin < 0.0 {
        Decision::Stable
    } else {
        Decision::Unstable
    };
    Ok((decision, margin))
}

/// Whether the bias and all incoming weights are negative.
pub fn all_negative_test(
    params: &NetworkParams,
    neuron: NeuronRef,
) -> Result<bool, StabilityError> {
    let (w, b) = neuron_row(params, neuron)?;
    Ok(b < 0.0 && w.iter().all(|&v| v < 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub domain_samples: usize,
    pub domain_radius: f64,
    pub perturbation_count: usize,
    pub perturbation_radius: f64,
}

impl DetectorConfig {
    /// Defaults for input dimension `n0`: 10^4 points in the ball of radius 100
    /// and `4 n0` perturbations within `1e-3`.
    pub fn for_input_dim(n0: usize) -> Self {
        DetectorConfig {
            domain_samples: 10_000,
            domain_radius: 100.0,
            perturbation_count: 4 * n0,
            perturbation_radius: 1e-3,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.domain_samples > 0
            && self.perturbation_count > 0
            && self.domain_radius > 0.0
            && self.perturbation_radius > 0.0
            && self.domain_radius.is_finite()
            && self.perturbation_radius.is_finite()
    }
}

/// Sampling test: `true` iff the neuron's pre-activation is `<= 0` at every
/// pair of a point drawn uniformly from the domain ball and a parameter drawn
/// uniformly from the parameter ball around `params`.
///
/// Perturbations come from stream 0 of `seed` and domain points from stream 1.
pub fn detector_paper_style(
    params: &NetworkParams,
    neuron: NeuronRef,
    cfg: &DetectorConfig,
    seed: u64,
) -> Result<bool, StabilityError> {
    neuron_row(params, neuron)?;
    assert!(cfg.is_valid(), "detector configuration must be positive");
    let arch = params.arch();
    let flat = params.flatten();
    let mut prng = stream_rng(seed, 0);
    let perturbed: Vec<NetworkParams> = (0..cfg.perturbation_count)
        .map(|_| {
            NetworkParams::from_flat(
                arch,
                &uniform_in_ball(&mut prng, &flat, cfg.perturbation_radius),
            )
        })
        .collect::<Result<_, _>>()?;
    let mut drng = stream_rng(seed, 1);
    let n0 = arch.input_dim();
    let origin = vec![0.0; n0];
    let points: Vec<Vec<f64>> = (0..cfg.domain_samples)
        .map(|_| uniform_in_ball(&mut drng, &origin, cfg.domain_radius))
        .collect();

    for p in &perturbed {
        let first = p.layer(1)?;
        let (w, b) = neuron_row(p, neuron)?;
        for x in &points {
            let g = b + first
                .matrix
                .iter()
                .zip(&first.offset)
                .zip(w)
                .map(|((row, bj), wj)| {
                    wj * relu(row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + bj)
                })
                .sum::<f64>();
            if g > 0.0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Value of the neuron's pre-activation at `x`.
pub fn neuron_input(
    params: &NetworkParams,
    neuron: NeuronRef,
    x: &[f64],
) -> Result<f64, StabilityError> {
    let (w, b) = neuron_row(params, neuron)?;
    let hidden = crate::network::layer_map(params, 1, x)?;
    Ok(b + w.iter().zip(&hidden).map(|(a, h)| a * h).sum::<f64>())
}

/// Uniform random point in the ball of `radius`, for spot checks of a verdict.
pub fn random_input<R: Rng + ?Sized>(rng: &mut R, n0: usize, radius: f64) -> Vec<f64> {
    uniform_in_ball(rng, &vec![0.0; n0], radius)
}
