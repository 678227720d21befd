//! Intercept tuples and the partition of hyperplanes whose intercepts share
//! signs with a reference tuple `p`.
//!
//! A hyperplane `h` belongs to `H_p` when each of its axis intercepts `q_j`
//! has the sign of `p_j`, so that `q_j = lambda_j p_j` with `lambda_j > 0`.
//! Such an `h` is tagged `S(j)` when `lambda_j` is the unique largest ratio and
//! `P` when two ratios coincide.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrangement::Hyperplane;
use crate::linear::{dot, solve_linear, AffineMap};

/// Relative tolerance for the zero and tie tests of this module.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterceptError {
    #[error("intercepts are undefined (zero normal component or zero offset)")]
    UndefinedIntercepts,
    #[error("hyperplane is not in H_p")]
    NotInHp,
    #[error("first-layer hyperplanes are not generic")]
    NotGeneric,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// The points `q_j e_j` where a hyperplane meets the coordinate axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterceptTuple {
    values: Vec<f64>,
}

impl InterceptTuple {
    /// Rejects empty tuples and entries with `|value| <= eps`.
    pub fn new(values: Vec<f64>, eps: f64) -> Result<Self, InterceptError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite() || v.abs() <= eps) {
            return Err(InterceptError::UndefinedIntercepts);
        }
        Ok(InterceptTuple { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of negative entries.
    pub fn negatives(&self) -> usize {
        self.values.iter().filter(|v| **v < 0.0).count()
    }
}

/// `q_j = -offset / normal_j`.
pub fn intercept_tuple(h: &Hyperplane, eps: f64) -> Result<InterceptTuple, InterceptError> {
    if h.offset.abs() <= eps || h.normal.iter().any(|w| w.abs() <= eps) {
        return Err(InterceptError::UndefinedIntercepts);
    }
    InterceptTuple::new(h.normal.iter().map(|w| -h.offset / w).collect(), 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionTag {
    /// Two ratios coincide.
    P,
    /// Ratio `j` (0-based) is the unique maximum.
    S(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionClass {
    pub tag: PartitionTag,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Membership {
    In(PartitionClass),
    NotInHp,
}

impl Membership {
    pub fn class(&self) -> Option<&PartitionClass> {
        match self {
            Membership::In(c) => Some(c),
            Membership::NotInHp => None,
        }
    }
}

fn ties(a: f64, b: f64, eps: f64) -> bool {
    (a - b).abs() <= eps * a.abs().max(b.abs())
}

/// Places `h` in the partition of `H_p`, or reports that it lies outside `H_p`.
pub fn classify(
    p: &InterceptTuple,
    h: &Hyperplane,
    eps: f64,
) -> Result<Membership, InterceptError> {
    if h.dim() != p.len() {
        return Err(InterceptError::DimensionMismatch {
            expected: p.len(),
            found: h.dim(),
        });
    }
    let q = match intercept_tuple(h, eps) {
        Ok(q) => q,
        Err(_) => return Ok(Membership::NotInHp),
    };
    if q.values
        .iter()
        .zip(&p.values)
        .any(|(a, b)| (*a > 0.0) != (*b > 0.0))
    {
        return Ok(Membership::NotInHp);
    }
    let lambdas: Vec<f64> = q.values.iter().zip(&p.values).map(|(a, b)| a / b).collect();
    let mut sorted = lambdas.clone();
    sorted.sort_by(f64::total_cmp);
    let tag = if sorted.windows(2).any(|w| ties(w[0], w[1], eps)) {
        PartitionTag::P
    } else {
        let argmax = (0..lambdas.len())
            .max_by(|&a, &b| lambdas[a].total_cmp(&lambdas[b]))
            .expect("non-empty");
        PartitionTag::S(argmax)
    };
    Ok(Membership::In(PartitionClass { tag, lambdas }))
}

/// Whether `h` is in `H_p` with every ratio at most `1 + eps`.
pub fn in_h1(p: &InterceptTuple, h: &Hyperplane, eps: f64) -> Result<bool, InterceptError> {
    match classify(p, h, eps)? {
        Membership::In(class) => Ok(class.lambdas.iter().all(|l| *l <= 1.0 + eps)),
        Membership::NotInHp => Err(InterceptError::NotInHp),
    }
}

/// Vertex `v_i` where all hyperplanes of `layer` except `i` meet.
pub fn omitted_vertex(layer: &AffineMap, i: usize, eps: f64) -> Result<Vec<f64>, InterceptError> {
    let (rows, rhs): (Vec<Vec<f64>>, Vec<f64>) = layer
        .matrix
        .iter()
        .zip(&layer.offset)
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, (w, b))| (w.clone(), -b))
        .unzip();
    solve_linear(&rows, &rhs, eps).map_err(|_| InterceptError::NotGeneric)
}

/// Intercepts `p_i = W_i . v_i + b_i` of the image hyperplane of a first layer
/// with `n + 1` neurons on `R^n`.
pub fn p_plus_intercepts(layer: &AffineMap, eps: f64) -> Result<InterceptTuple, InterceptError> {
    let n = layer.cols();
    if layer.rows() != n + 1 {
        return Err(InterceptError::DimensionMismatch {
            expected: n + 1,
            found: layer.rows(),
        });
    }
    let mut values = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let v = omitted_vertex(layer, i, eps)?;
        values.push(dot(&layer.matrix[i], &v) + layer.offset[i]);
    }
    let scale = layer
        .offset
        .iter()
        .chain(layer.matrix.iter().flatten())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    InterceptTuple::new(values, eps * scale).map_err(|_| InterceptError::NotGeneric)
}
