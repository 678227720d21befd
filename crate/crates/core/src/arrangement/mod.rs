//! Cooriented hyperplane arrangements.
//!
//! A hyperplane is stored as `normal · x + offset = 0`; its positive side is
//! where `normal · x + offset > 0`. Regions are identified by their codeword,
//! the vector of sides recorded in arrangement order.

mod codeword;
mod counting;
mod generic;
mod induced;
mod regions;

pub use codeword::{Codeword, Sign};
pub use counting::{binomial, facet_statistics, region_counts, FacetStatistics, RegionCounts};
pub use generic::is_generic;
pub use induced::induced_arrangement;
pub use regions::{
    bounded_region, bounded_regions, enumerate_regions, enumerate_regions_with_facets,
    missing_codewords, region_codewords, region_facet_count, shared_face_dimension, RegionInfo,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::{dot, norm, LinearError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("arrangement is not generic")]
    NotGeneric,
    #[error("{m} hyperplanes exceed the enumeration cap of {cap}")]
    SizeLimitExceeded { m: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("hyperplane {index} has a (near-)zero normal")]
    DegenerateNormal { index: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("integer overflow in closed-form count")]
    Overflow,
    #[error("counts require m >= 1 and n >= 1")]
    InvalidCount,
    #[error("arrangement has no bounded region")]
    NoneBounded,
    #[error("arrangement has {count} bounded regions; use bounded_regions")]
    NotUnique { count: usize },
    #[error("induced arrangements need ambient dimension >= 2")]
    DimensionTooSmall,
    #[error("hyperplane index {index} out of range for {m} hyperplanes")]
    IndexOutOfRange { index: usize, m: usize },
    #[error(transparent)]
    Linear(#[from] LinearError),
}

/// Tolerances and limits for arrangement queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangementConfig {
    /// Rank, pivot and feasibility tolerance.
    pub eps: f64,
    /// A region exists iff some point has every (unit-normal) slack above this.
    pub interior_margin: f64,
    /// Largest arrangement accepted by the exponential-time queries.
    pub max_hyperplanes: usize,
}

impl Default for ArrangementConfig {
    fn default() -> Self {
        ArrangementConfig {
            eps: 1e-9,
            interior_margin: 1e-7,
            max_hyperplanes: 20,
        }
    }
}

/// The hyperplane `{x : normal · x + offset = 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Hyperplane {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self, ArrangementError> {
        if normal.iter().chain([&offset]).any(|v| !v.is_finite()) {
            return Err(ArrangementError::NonFinite);
        }
        if normal.is_empty() || norm(&normal) <= 1e-12 {
            return Err(ArrangementError::DegenerateNormal { index: 0 });
        }
        Ok(Hyperplane { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) + self.offset
    }

    /// Euclidean signed distance of `x` from the hyperplane.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        self.eval(x) / norm(&self.normal)
    }

    pub fn side(&self, x: &[f64]) -> Option<Sign> {
        Sign::of(self.eval(x))
    }

    /// Same hyperplane with the opposite coorientation.
    pub fn negated(&self) -> Hyperplane {
        Hyperplane {
            normal: self.normal.iter().map(|v| -v).collect(),
            offset: -self.offset,
        }
    }

    /// Same cooriented hyperplane with a unit normal.
    pub fn unit(&self) -> Hyperplane {
        let s = norm(&self.normal);
        Hyperplane {
            normal: self.normal.iter().map(|v| v / s).collect(),
            offset: self.offset / s,
        }
    }
}

#[derive(Deserialize)]
struct RawArrangement {
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

/// An ordered list of cooriented hyperplanes in `R^dim`.
///
/// Serializes as `{"dim": n, "hyperplanes": [{"normal": [...], "offset": r}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawArrangement")]
pub struct CoorientedArrangement {
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl TryFrom<RawArrangement> for CoorientedArrangement {
    type Error = ArrangementError;

    fn try_from(raw: RawArrangement) -> Result<Self, Self::Error> {
        CoorientedArrangement::new(raw.dim, raw.hyperplanes)
    }
}

impl CoorientedArrangement {
    pub fn new(dim: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, ArrangementError> {
        if dim == 0 {
            return Err(ArrangementError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for (index, h) in hyperplanes.iter().enumerate() {
            if h.dim() != dim {
                return Err(ArrangementError::DimensionMismatch {
                    expected: dim,
                    found: h.dim(),
                });
            }
            if h.normal.iter().chain([&h.offset]).any(|v| !v.is_finite()) {
                return Err(ArrangementError::NonFinite);
            }
            if norm(&h.normal) <= 1e-12 {
                return Err(ArrangementError::DegenerateNormal { index });
            }
        }
        Ok(CoorientedArrangement { dim, hyperplanes })
    }

    /// Builds an arrangement from `(normal, offset)` pairs.
    pub fn from_rows(
        dim: usize,
        rows: impl IntoIterator<Item = (Vec<f64>, f64)>,
    ) -> Result<Self, ArrangementError> {
        let hyperplanes = rows
            .into_iter()
            .map(|(normal, offset)| Hyperplane { normal, offset })
            .collect();
        Self::new(dim, hyperplanes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    /// Codeword of the region containing `x`, or `None` if `x` lies on a hyperplane.
    pub fn codeword_at(&self, x: &[f64]) -> Option<Codeword> {
        self.hyperplanes
            .iter()
            .map(|h| h.side(x))
            .collect::<Option<Vec<_>>>()
            .map(Codeword::new)
    }

    /// Reorders hyperplanes: position `k` of the result is hyperplane `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> CoorientedArrangement {
        CoorientedArrangement {
            dim: self.dim,
            hyperplanes: perm.iter().map(|&i| self.hyperplanes[i].clone()).collect(),
        }
    }

    /// Flips the coorientation of every hyperplane whose flag is set.
    pub fn reoriented(&self, flip: &[bool]) -> CoorientedArrangement {
        let hyperplanes = self
            .hyperplanes
            .iter()
            .zip(flip)
            .map(|(h, &f)| if f { h.negated() } else { h.clone() })
            .collect();
        CoorientedArrangement {
            dim: self.dim,
            hyperplanes,
        }
    }

    pub(crate) fn unit_rows(&self) -> Vec<Hyperplane> {
        self.hyperplanes.iter().map(Hyperplane::unit).collect()
    }

    pub(crate) fn check_cap(&self, cfg: &ArrangementConfig) -> Result<(), ArrangementError> {
        if self.len() > cfg.max_hyperplanes {
            return Err(ArrangementError::SizeLimitExceeded {
                m: self.len(),
                cap: cfg.max_hyperplanes,
            });
        }
        Ok(())
    }
}

/// Calls `f` with every increasing `k`-subset of `0..m` in lexicographic order;
/// stops early when `f` returns `false`.
pub fn for_each_combination(m: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !f(&idx) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + m - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
