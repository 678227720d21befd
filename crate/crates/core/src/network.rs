//! Fully-connected ReLU networks: parameters, seeded sampling, layer maps, the
//! first-layer arrangement and the configuration index of its bounded region.

use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution as _, Uniform};
use rand_distr::Normal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::{
    is_generic, ArrangementConfig, ArrangementError, Codeword, CoorientedArrangement, Hyperplane,
    Sign,
};
use crate::intercept::{p_plus_intercepts, InterceptError, InterceptTuple};
use crate::linear::{norm, AffineMap, LinearError};
use crate::rng::{derive_seed, stream_rng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetworkError {
    #[error("architecture needs at least two sizes, all positive")]
    InvalidArchitecture,
    #[error("layer {layer} has shape {found:?}, expected {expected:?}")]
    ShapeMismatch {
        layer: usize,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("input has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("layer {layer} does not exist")]
    LayerOutOfRange { layer: usize },
    #[error("first-layer row {index} has a (near-)zero weight vector")]
    DegenerateRow { index: usize },
    #[error("first-layer arrangement is not generic")]
    NotGeneric,
    #[error("configuration index needs n1 = n0 + 1, got n0 = {n0}, n1 = {n1}")]
    WrongWidth { n0: usize, n1: usize },
    #[error("distribution scale must be positive and finite")]
    InvalidDistribution,
    #[error("no non-degenerate draw within {attempts} attempts")]
    ResampleLimit { attempts: usize },
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Linear(#[from] LinearError),
}

/// Layer widths `(n_0, n_1, ..., n_L)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Architecture(Vec<usize>);

impl Architecture {
    pub fn new(sizes: Vec<usize>) -> Result<Self, NetworkError> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(NetworkError::InvalidArchitecture);
        }
        Ok(Architecture(sizes))
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0
    }

    /// Number of affine layers `L`.
    pub fn depth(&self) -> usize {
        self.0.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.0[0]
    }

    /// Width of layer `layer` (0 is the input).
    pub fn width(&self, layer: usize) -> usize {
        self.0[layer]
    }

    /// Total number of weights and biases.
    pub fn parameter_count(&self) -> usize {
        self.0.windows(2).map(|w| w[1] * (w[0] + 1)).sum()
    }
}

impl TryFrom<Vec<usize>> for Architecture {
    type Error = NetworkError;

    fn try_from(sizes: Vec<usize>) -> Result<Self, Self::Error> {
        Architecture::new(sizes)
    }
}

impl From<Architecture> for Vec<usize> {
    fn from(a: Architecture) -> Vec<usize> {
        a.0
    }
}

#[derive(Deserialize)]
struct RawParams {
    arch: Architecture,
    layers: Vec<AffineMap>,
}

/// Weights and biases of every layer; `layers[l - 1]` maps `R^{n_{l-1}}` to `R^{n_l}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct NetworkParams {
    arch: Architecture,
    layers: Vec<AffineMap>,
}

impl TryFrom<RawParams> for NetworkParams {
    type Error = NetworkError;

    fn try_from(raw: RawParams) -> Result<Self, Self::Error> {
        NetworkParams::new(raw.arch, raw.layers)
    }
}

impl NetworkParams {
    pub fn new(arch: Architecture, layers: Vec<AffineMap>) -> Result<Self, NetworkError> {
        if layers.len() != arch.depth() {
            return Err(NetworkError::InvalidArchitecture);
        }
        for (i, layer) in layers.iter().enumerate() {
            layer.validate()?;
            let expected = (arch.width(i + 1), arch.width(i));
            let found = (
                layer.rows(),
                if layer.rows() == 0 { 0 } else { layer.cols() },
            );
            if found != expected {
                return Err(NetworkError::ShapeMismatch {
                    layer: i + 1,
                    expected,
                    found,
                });
            }
        }
        Ok(NetworkParams { arch, layers })
    }

    pub fn arch(&self) -> &Architecture {
        &self.arch
    }

    /// Affine part of layer `layer` (1-based).
    pub fn layer(&self, layer: usize) -> Result<&AffineMap, NetworkError> {
        layer
            .checked_sub(1)
            .and_then(|i| self.layers.get(i))
            .ok_or(NetworkError::LayerOutOfRange { layer })
    }

    pub fn layers(&self) -> &[AffineMap] {
        &self.layers
    }

    /// Copy with layer `layer` (1-based) replaced; shapes must agree.
    pub fn with_layer(&self, layer: usize, map: AffineMap) -> Result<Self, NetworkError> {
        self.layer(layer)?;
        let mut layers = self.layers.clone();
        layers[layer - 1] = map;
        NetworkParams::new(self.arch.clone(), layers)
    }

    /// All parameters flattened layer by layer, weights row-major then biases.
    pub fn flatten(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.matrix.iter().flatten().chain(&l.offset).copied())
            .collect()
    }

    /// Inverse of [`NetworkParams::flatten`] for this architecture.
    pub fn from_flat(arch: &Architecture, values: &[f64]) -> Result<Self, NetworkError> {
        if values.len() != arch.parameter_count() {
            return Err(NetworkError::DimensionMismatch {
                expected: arch.parameter_count(),
                found: values.len(),
            });
        }
        let mut it = values.iter().copied();
        let layers = arch
            .sizes()
            .windows(2)
            .map(|w| {
                let matrix = (0..w[1])
                    .map(|_| it.by_ref().take(w[0]).collect())
                    .collect();
                let offset = it.by_ref().take(w[1]).collect();
                AffineMap { matrix, offset }
            })
            .collect();
        NetworkParams::new(arch.clone(), layers)
    }
}

/// Symmetric laws for i.i.d. parameters.
///
/// `HeUniform` draws layer `l` uniformly from `[-sqrt(6 / n_{l-1}), sqrt(6 / n_{l-1})]`,
/// weights and biases alike.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    UniformSymmetric { half_width: f64 },
    Normal { std_dev: f64 },
    HeUniform,
}

impl Distribution {
    pub fn validate(&self) -> Result<(), NetworkError> {
        let scale = match *self {
            Distribution::UniformSymmetric { half_width } => half_width,
            Distribution::Normal { std_dev } => std_dev,
            Distribution::HeUniform => 1.0,
        };
        if scale.is_finite() && scale > 0.0 {
            Ok(())
        } else {
            Err(NetworkError::InvalidDistribution)
        }
    }

    fn sampler(&self, fan_in: usize) -> Sampler {
        match *self {
            Distribution::UniformSymmetric { half_width } => Sampler::Uniform(
                Uniform::new_inclusive(-half_width, half_width).expect("validated scale"),
            ),
            Distribution::Normal { std_dev } => {
                Sampler::Normal(Normal::new(0.0, std_dev).expect("validated scale"))
            }
            Distribution::HeUniform => {
                let bound = (6.0 / fan_in as f64).sqrt();
                Sampler::Uniform(Uniform::new_inclusive(-bound, bound).expect("positive bound"))
            }
        }
    }
}

enum Sampler {
    Uniform(Uniform<f64>),
    Normal(Normal<f64>),
}

impl Sampler {
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
        match self {
            Sampler::Uniform(u) => u.sample(rng),
            Sampler::Normal(n) => n.sample(rng),
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::UniformSymmetric { half_width } => write!(f, "uniform:{half_width}"),
            Distribution::Normal { std_dev } => write!(f, "normal:{std_dev}"),
            Distribution::HeUniform => f.write_str("he"),
        }
    }
}

impl FromStr for Distribution {
    type Err = String;

    /// Accepts `uniform[:half_width]`, `normal[:std_dev]` and `he`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = s.split_once(':').map_or((s, None), |(k, a)| (k, Some(a)));
        let scale = match arg {
            None => 1.0,
            Some(a) => a
                .parse::<f64>()
                .map_err(|e| format!("bad scale {a:?}: {e}"))?,
        };
        let dist = match kind {
            "uniform" => Distribution::UniformSymmetric { half_width: scale },
            "normal" => Distribution::Normal { std_dev: scale },
            "he" if arg.is_none() => Distribution::HeUniform,
            _ => {
                return Err(format!(
                    "unknown distribution {s:?}; expected uniform[:w], normal[:s] or he"
                ))
            }
        };
        dist.validate().map_err(|e| e.to_string())?;
        Ok(dist)
    }
}

/// I.i.d. parameters. Layer `l` is drawn from stream `l` of `seed`, weights
/// row-major and then biases, so each layer's values depend only on its own shape.
pub fn sample_params(
    arch: &Architecture,
    dist: &Distribution,
    seed: u64,
) -> Result<NetworkParams, NetworkError> {
    dist.validate()?;
    let layers = arch
        .sizes()
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let sampler = dist.sampler(w[0]);
            let mut rng = stream_rng(seed, i as u64 + 1);
            let matrix = (0..w[1])
                .map(|_| (0..w[0]).map(|_| sampler.draw(&mut rng)).collect())
                .collect();
            let offset = (0..w[1]).map(|_| sampler.draw(&mut rng)).collect();
            AffineMap { matrix, offset }
        })
        .collect();
    NetworkParams::new(arch.clone(), layers)
}

/// Measure-zero conditions under which a draw is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyCheck {
    /// A first-layer row, or a second-layer weight or bias, at most this large counts as zero.
    pub eps: f64,
    /// Reject draws whose first-layer arrangement is not generic.
    pub require_generic: bool,
    pub max_attempts: usize,
}

impl Default for DegeneracyCheck {
    fn default() -> Self {
        DegeneracyCheck {
            eps: 1e-9,
            require_generic: true,
            max_attempts: 100,
        }
    }
}

/// A draw together with the number of rejected draws that preceded it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub params: NetworkParams,
    pub rejections: usize,
}

/// Whether `params` hits one of the conditions in `check`.
pub fn is_degenerate(
    params: &NetworkParams,
    check: &DegeneracyCheck,
) -> Result<bool, NetworkError> {
    let first = &params.layers[0];
    if first.matrix.iter().any(|row| norm(row) <= check.eps) {
        return Ok(true);
    }
    if let Some(second) = params.layers.get(1) {
        if second
            .matrix
            .iter()
            .flatten()
            .chain(&second.offset)
            .any(|v| v.abs() <= check.eps)
        {
            return Ok(true);
        }
    }
    if check.require_generic {
        let arr = first_layer_arrangement(params)?;
        return Ok(!is_generic(&arr, &ArrangementConfig::default())?);
    }
    Ok(false)
}

/// [`sample_params`] retried on degenerate draws. Attempt `a > 0` uses seed
/// `derive_seed(seed, a)`.
pub fn sample_nondegenerate(
    arch: &Architecture,
    dist: &Distribution,
    seed: u64,
    check: &DegeneracyCheck,
) -> Result<Sampled, NetworkError> {
    for attempt in 0..check.max_attempts {
        let s = if attempt == 0 {
            seed
        } else {
            derive_seed(seed, attempt as u64)
        };
        let params = sample_params(arch, dist, s)?;
        if !is_degenerate(&params, check)? {
            return Ok(Sampled {
                params,
                rejections: attempt,
            });
        }
    }
    Err(NetworkError::ResampleLimit {
        attempts: check.max_attempts,
    })
}

pub fn relu(v: f64) -> f64 {
    v.max(0.0)
}

/// Layer `layer` (1-based) applied to `x`: ReLU after the affine map on hidden
/// layers, the affine map alone on the last layer.
pub fn layer_map(
    params: &NetworkParams,
    layer: usize,
    x: &[f64],
) -> Result<Vec<f64>, NetworkError> {
    let map = params.layer(layer)?;
    if x.len() != map.cols() {
        return Err(NetworkError::DimensionMismatch {
            expected: map.cols(),
            found: x.len(),
        });
    }
    let mut y = map.apply(x)?;
    if layer < params.arch.depth() {
        y.iter_mut().for_each(|v| *v = relu(*v));
    }
    Ok(y)
}

/// Pre-activation of layer `layer` on input `x`.
pub fn pre_activation(
    params: &NetworkParams,
    layer: usize,
    x: &[f64],
) -> Result<Vec<f64>, NetworkError> {
    let mut h = x.to_vec();
    for l in 1..layer {
        h = layer_map(params, l, &h)?;
    }
    let map = params.layer(layer)?;
    if h.len() != map.cols() {
        return Err(NetworkError::DimensionMismatch {
            expected: map.cols(),
            found: h.len(),
        });
    }
    Ok(map.apply(&h)?)
}

/// The hyperplanes `W_{1,j} . x + b_{1,j} = 0`, positive where the
/// pre-activation is positive, in row order.
pub fn first_layer_arrangement(
    params: &NetworkParams,
) -> Result<CoorientedArrangement, NetworkError> {
    let first = &params.layers[0];
    let hyperplanes = first
        .matrix
        .iter()
        .zip(&first.offset)
        .enumerate()
        .map(|(index, (w, b))| {
            if norm(w) <= 1e-12 {
                Err(NetworkError::DegenerateRow { index })
            } else {
                Ok(Hyperplane {
                    normal: w.clone(),
                    offset: *b,
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoorientedArrangement::new(
        params.arch.input_dim(),
        hyperplanes,
    )?)
}

/// Position of a bounded-region codeword in the fixed ordering of `{-,+}^{n0+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConfigurationIndex(pub usize);

fn single(m: usize, at: usize, sign: Sign) -> Codeword {
    let mut signs = vec![-sign; m];
    signs[at] = sign;
    Codeword::new(signs)
}

fn is_named(code: &Codeword) -> bool {
    let minus = code.count(Sign::Minus);
    minus == 0 || minus == 1 || minus + 1 == code.len()
}

/// Index of `code` (length `n0 + 1`): `0` for all `+`; `1..=n0+1` for a single
/// `-` at position `i - 1`; then the negations of those words that are not
/// already listed; then every remaining word in lexicographic order (`-` before
/// `+`). For `n0 >= 2` the negations occupy `n0+2..=2n0+2`; for `n0 = 1` they
/// coincide with the single-`-` words and take no index of their own.
pub fn configuration_index_of(code: &Codeword) -> ConfigurationIndex {
    let m = code.len();
    let minus = code.count(Sign::Minus);
    let position = |s: Sign| {
        code.signs()
            .iter()
            .position(|&c| c == s)
            .expect("sign present")
    };
    if minus == 0 {
        return ConfigurationIndex(0);
    }
    if minus == 1 {
        return ConfigurationIndex(1 + position(Sign::Minus));
    }
    if m >= 3 && minus + 1 == m {
        return ConfigurationIndex(m + 1 + position(Sign::Plus));
    }
    let named = if m >= 3 { 2 * m + 1 } else { m + 1 };
    let rank = code.rank();
    let below = (0..m)
        .flat_map(|k| [single(m, k, Sign::Minus), single(m, k, Sign::Plus)])
        .filter(|c| c.rank() < rank)
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    ConfigurationIndex(named + rank as usize - below)
}

/// Inverse of [`configuration_index_of`].
pub fn configuration_codeword(index: ConfigurationIndex, n0: usize) -> Option<Codeword> {
    let m = n0 + 1;
    if m >= 64 || index.0 >= 1 << m {
        return None;
    }
    match index.0 {
        0 => Some(Codeword::all(Sign::Plus, m)),
        i if i <= m => Some(single(m, i - 1, Sign::Minus)),
        i if m >= 3 && i <= 2 * m => Some(single(m, i - m - 1, Sign::Plus)),
        i => {
            let named = if m >= 3 { 2 * m + 1 } else { m + 1 };
            (0..1u64 << m)
                .map(|r| Codeword::from_rank(r, m))
                .filter(|c| !is_named(c))
                .nth(i - named)
        }
    }
}

/// Intercepts of the image hyperplane of the first-layer pre-activation map;
/// their signs are the codeword of the bounded region.
pub fn image_intercepts(params: &NetworkParams, eps: f64) -> Result<InterceptTuple, NetworkError> {
    let (n0, n1) = (params.arch.width(0), params.arch.width(1));
    if n1 != n0 + 1 {
        return Err(NetworkError::WrongWidth { n0, n1 });
    }
    p_plus_intercepts(&params.layers[0], eps).map_err(|e| match e {
        InterceptError::DimensionMismatch { .. } => NetworkError::WrongWidth { n0, n1 },
        _ => NetworkError::NotGeneric,
    })
}

/// Configuration of the first layer when `n1 = n0 + 1`.
pub fn configuration_index(
    params: &NetworkParams,
    cfg: &ArrangementConfig,
) -> Result<ConfigurationIndex, NetworkError> {
    let (n0, n1) = (params.arch.width(0), params.arch.width(1));
    if n1 != n0 + 1 {
        return Err(NetworkError::WrongWidth { n0, n1 });
    }
    if !is_generic(&first_layer_arrangement(params)?, cfg)? {
        return Err(NetworkError::NotGeneric);
    }
    let p = image_intercepts(params, cfg.eps)?;
    let code = Codeword::new(
        p.values()
            .iter()
            .map(|&v| if v > 0.0 { Sign::Plus } else { Sign::Minus })
            .collect(),
    );
    Ok(configuration_index_of(&code))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::bounded_region;

    fn worked_example() -> NetworkParams {
        let arch = Architecture::new(vec![2, 3, 1]).unwrap();
        NetworkParams::new(
            arch,
            vec![
                AffineMap::new(
                    vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
                    vec![-1.0, -1.0, 3.0],
                )
                .unwrap(),
                AffineMap::new(vec![vec![-2.0, -2.0, -2.0]], vec![1.0]).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn layer_maps() {
        let id = NetworkParams::new(
            Architecture::new(vec![2, 2, 1]).unwrap(),
            vec![
                AffineMap::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap(),
                AffineMap::new(vec![vec![1.0, 1.0]], vec![0.0]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(layer_map(&id, 1, &[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert_eq!(layer_map(&id, 1, &[-1.0, -2.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(layer_map(&id, 2, &[-1.0, -2.0]).unwrap(), vec![-3.0]);
        assert!(matches!(
            layer_map(&id, 1, &[1.0]),
            Err(NetworkError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            layer_map(&id, 3, &[1.0]),
            Err(NetworkError::LayerOutOfRange { layer: 3 })
        ));

        let y = layer_map(&worked_example(), 1, &[1.1, 1.1]).unwrap();
        for (a, b) in y.iter().zip([0.1, 0.1, 0.8]) {
            assert!((a - b).abs() < 1e-12);
        }
        let h = pre_activation(&worked_example(), 2, &[1.1, 1.1]).unwrap();
        assert!((h[0] - (1.0 - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let p = worked_example();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.starts_with("{\"arch\":[2,3,1],\"layers\":[{\"W\":[[1.0,0.0]"));
        let back: NetworkParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"arch":[2,1],"layers":[{"W":[[1.0]],"b":[0.0]}]}"#;
        assert!(serde_json::from_str::<NetworkParams>(bad).is_err());
        assert_eq!(NetworkParams::from_flat(p.arch(), &p.flatten()).unwrap(), p);
    }

    #[test]
    fn sampling_is_deterministic_and_layerwise() {
        let arch = Architecture::new(vec![3, 4, 2]).unwrap();
        let dist = Distribution::Normal { std_dev: 1.0 };
        let a = sample_params(&arch, &dist, 11).unwrap();
        assert_eq!(a, sample_params(&arch, &dist, 11).unwrap());
        assert_ne!(a, sample_params(&arch, &dist, 12).unwrap());
        let wider = sample_params(&Architecture::new(vec![3, 4, 5]).unwrap(), &dist, 11).unwrap();
        assert_eq!(wider.layers()[0], a.layers()[0]);
    }

    #[test]
    fn he_bounds_follow_fan_in() {
        let arch = Architecture::new(vec![6, 200, 3]).unwrap();
        let p = sample_params(&arch, &Distribution::HeUniform, 5).unwrap();
        let extremes = |l: &AffineMap| {
            l.matrix
                .iter()
                .flatten()
                .chain(&l.offset)
                .fold((f64::MAX, f64::MIN), |(lo, hi), v| (lo.min(*v), hi.max(*v)))
        };
        let (lo, hi) = extremes(&p.layers()[0]);
        assert!(lo >= -1.0 && hi <= 1.0 && lo < -0.95 && hi > 0.95);
        let bound = (6.0f64 / 200.0).sqrt();
        let (lo, hi) = extremes(&p.layers()[1]);
        assert!(lo >= -bound && hi <= bound && lo < -0.9 * bound && hi > 0.9 * bound);
    }

    #[test]
    fn distribution_parsing() {
        assert_eq!(
            "uniform".parse::<Distribution>().unwrap(),
            Distribution::UniformSymmetric { half_width: 1.0 }
        );
        assert_eq!(
            "normal:2.5".parse::<Distribution>().unwrap(),
            Distribution::Normal { std_dev: 2.5 }
        );
        assert_eq!(
            "he".parse::<Distribution>().unwrap(),
            Distribution::HeUniform
        );
        assert!("normal:-1".parse::<Distribution>().is_err());
        assert!("cauchy".parse::<Distribution>().is_err());
        assert_eq!(
            Distribution::Normal { std_dev: 2.5 }.to_string(),
            "normal:2.5"
        );
    }

    #[test]
    fn worked_example_arrangement() {
        let p = worked_example();
        let arr = first_layer_arrangement(&p).unwrap();
        let b = bounded_region(&arr, &ArrangementConfig::default()).unwrap();
        assert_eq!(b.codeword.to_string(), "+++");
        assert_eq!(
            configuration_index(&p, &ArrangementConfig::default()).unwrap(),
            ConfigurationIndex(0)
        );
        let zero_row = p
            .with_layer(
                1,
                AffineMap::new(
                    vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
                    vec![1.0, 1.0, 1.0],
                )
                .unwrap(),
            )
            .unwrap();
        assert_eq!(
            first_layer_arrangement(&zero_row),
            Err(NetworkError::DegenerateRow { index: 0 })
        );
    }

    #[test]
    fn configuration_indexing_rule() {
        let idx = |s: &str| configuration_index_of(&s.parse().unwrap()).0;
        assert_eq!(idx("+++"), 0);
        assert_eq!(idx("-++"), 1);
        assert_eq!(idx("++-"), 3);
        assert_eq!(idx("+--"), 4);
        assert_eq!(idx("-+-"), 5);
        assert_eq!(idx("--+"), 6);
        assert_eq!(idx("---"), 7);
        assert_eq!(idx("++"), 0);
        assert_eq!(idx("-+"), 1);
        assert_eq!(idx("+-"), 2);
        assert_eq!(idx("--"), 3);
        // n0 = 3: residual words start at 2 * 3 + 3 = 9 in lexicographic order
        assert_eq!(idx("----"), 9);
        assert_eq!(idx("--++"), 10);
        assert_eq!(idx("+-+-"), 14);
        for n0 in 1..=5 {
            let m = n0 + 1;
            let mut seen = vec![false; 1 << m];
            for r in 0..1u64 << m {
                let code = Codeword::from_rank(r, m);
                let i = configuration_index_of(&code);
                assert!(!seen[i.0], "index {} repeated", i.0);
                seen[i.0] = true;
                assert_eq!(configuration_codeword(i, n0), Some(code));
            }
        }
    }

    #[test]
    fn wrong_width_is_reported() {
        let arch = Architecture::new(vec![2, 2, 1]).unwrap();
        let p = sample_params(&arch, &Distribution::Normal { std_dev: 1.0 }, 1).unwrap();
        assert_eq!(
            configuration_index(&p, &ArrangementConfig::default()),
            Err(NetworkError::WrongWidth { n0: 2, n1: 2 })
        );
    }
}
