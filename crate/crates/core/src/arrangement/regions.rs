use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    is_generic, ArrangementConfig, ArrangementError, Codeword, CoorientedArrangement, Hyperplane,
    Sign,
};
use crate::linear::{maximize_linear_robust, solve_linear, Constraint, LpOptions, LpResult};

/// A nonempty region of an arrangement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionInfo {
    pub codeword: Codeword,
    pub bounded: bool,
    /// A point whose unit-normal slacks all exceed the interior margin.
    pub witness: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facet_count: Option<usize>,
}

fn lp_options(cfg: &ArrangementConfig) -> LpOptions {
    LpOptions {
        eps: cfg.eps,
        ..LpOptions::default()
    }
}

/// Largest `t <= 1` such that some `x` has `s_j (n_j . x + b_j) >= t` for every
/// signed unit row in `signs`, with row `on` (if any) held at equality.
/// Returns `t` and the maximizing `x`.
fn interior_margin(
    units: &[Hyperplane],
    signs: &[Sign],
    on: Option<usize>,
    cfg: &ArrangementConfig,
) -> Result<(f64, Vec<f64>), ArrangementError> {
    let n = units[0].dim();
    let mut constraints = Vec::with_capacity(signs.len() + 2);
    for (j, (h, s)) in units.iter().zip(signs).enumerate() {
        let mut normal: Vec<f64> = h.normal.iter().map(|v| s.as_f64() * v).collect();
        let offset = s.as_f64() * h.offset;
        if on == Some(j) {
            normal.push(0.0);
            constraints.push(Constraint::at_least_zero(normal.clone(), offset));
            constraints.push(Constraint::at_most_zero(normal, offset));
        } else {
            normal.push(-1.0);
            constraints.push(Constraint::at_least_zero(normal, offset));
        }
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = -1.0;
    constraints.push(Constraint::at_least_zero(cap, 1.0));
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    match maximize_linear_robust(&objective, &constraints, &lp_options(cfg))? {
        LpResult::Bounded {
            optimum,
            mut argmax,
        } => {
            argmax.truncate(n);
            Ok((optimum, argmax))
        }
        _ => Ok((f64::NEG_INFINITY, vec![0.0; n])),
    }
}

/// Constraints `s_j (n_j . x + b_j) >= 0` describing the closure of a region.
fn closure_constraints(units: &[Hyperplane], code: &Codeword) -> Vec<Constraint<f64>> {
    units
        .iter()
        .zip(code.signs())
        .map(|(h, s)| {
            Constraint::at_least_zero(
                h.normal.iter().map(|v| s.as_f64() * v).collect(),
                s.as_f64() * h.offset,
            )
        })
        .collect()
}

fn is_bounded(
    units: &[Hyperplane],
    code: &Codeword,
    cfg: &ArrangementConfig,
) -> Result<bool, ArrangementError> {
    let n = units[0].dim();
    let constraints = closure_constraints(units, code);
    for i in 0..n {
        for dir in [1.0, -1.0] {
            let mut objective = vec![0.0; n];
            objective[i] = dir;
            if let LpResult::Unbounded { .. } =
                maximize_linear_robust(&objective, &constraints, &lp_options(cfg))?
            {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

struct Search<'a> {
    units: &'a [Hyperplane],
    cfg: &'a ArrangementConfig,
    prefix: Vec<Sign>,
    found: Vec<(Codeword, Vec<f64>)>,
}

impl Search<'_> {
    /// Extends the current sign prefix by one position, `-` before `+`, pruning
    /// prefixes whose partial region is already empty. `witness` lies strictly
    /// inside the partial region of the current prefix.
    fn descend(&mut self, witness: &[f64]) -> Result<(), ArrangementError> {
        let k = self.prefix.len();
        if k == self.units.len() {
            self.found
                .push((Codeword::new(self.prefix.clone()), witness.to_vec()));
            return Ok(());
        }
        for s in [Sign::Minus, Sign::Plus] {
            self.prefix.push(s);
            if s.as_f64() * self.units[k].eval(witness) > self.cfg.interior_margin {
                self.descend(witness)?;
            } else {
                let (t, x) = interior_margin(self.units, &self.prefix, None, self.cfg)?;
                if t > self.cfg.interior_margin {
                    self.descend(&x)?;
                }
            }
            self.prefix.pop();
        }
        Ok(())
    }
}

fn check_generic(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<(), ArrangementError> {
    if is_generic(arr, cfg)? {
        Ok(())
    } else {
        Err(ArrangementError::NotGeneric)
    }
}

/// All nonempty regions in lexicographic codeword order (`-` before `+`).
///
/// A codeword is a region iff the largest uniform unit-normal slack it admits
/// exceeds `cfg.interior_margin`. Candidates are explored depth-first over sign
/// prefixes; an empty prefix region prunes every extension, which yields the
/// same set as testing all `2^m` words individually.
pub fn enumerate_regions(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<Vec<RegionInfo>, ArrangementError> {
    let found = region_codewords(arr, cfg)?;
    let units = arr.unit_rows();
    found
        .into_par_iter()
        .map(|(codeword, witness)| {
            let bounded = !units.is_empty() && is_bounded(&units, &codeword, cfg)?;
            Ok(RegionInfo {
                codeword,
                bounded,
                witness,
                facet_count: None,
            })
        })
        .collect()
}

/// Codewords of all regions with an interior witness each, in lexicographic
/// order, without the boundedness tests of [`enumerate_regions`].
pub fn region_codewords(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<Vec<(Codeword, Vec<f64>)>, ArrangementError> {
    arr.check_cap(cfg)?;
    check_generic(arr, cfg)?;
    let units = arr.unit_rows();
    if units.is_empty() {
        return Ok(vec![(Codeword::new(Vec::new()), vec![0.0; arr.dim()])]);
    }
    let mut search = Search {
        units: &units,
        cfg,
        prefix: Vec::with_capacity(units.len()),
        found: Vec::new(),
    };
    search.descend(&vec![0.0; arr.dim()])?;
    Ok(search.found)
}

/// [`enumerate_regions`] with `facet_count` filled in for every region.
pub fn enumerate_regions_with_facets(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<Vec<RegionInfo>, ArrangementError> {
    let units = arr.unit_rows();
    enumerate_regions(arr, cfg)?
        .into_par_iter()
        .map(|mut region| {
            region.facet_count = Some(facet_count(&units, &region.codeword, cfg)?);
            Ok(region)
        })
        .collect()
}

fn facet_count(
    units: &[Hyperplane],
    code: &Codeword,
    cfg: &ArrangementConfig,
) -> Result<usize, ArrangementError> {
    let mut count = 0;
    for i in 0..units.len() {
        let (t, _) = interior_margin(units, code.signs(), Some(i), cfg)?;
        if t > cfg.interior_margin {
            count += 1;
        }
    }
    Ok(count)
}

/// Number of hyperplanes on which the closure of region `code` has a facet,
/// i.e. a relatively open `(n-1)`-dimensional piece of the boundary.
pub fn region_facet_count(
    arr: &CoorientedArrangement,
    code: &Codeword,
    cfg: &ArrangementConfig,
) -> Result<usize, ArrangementError> {
    if code.len() != arr.len() {
        return Err(ArrangementError::DimensionMismatch {
            expected: arr.len(),
            found: code.len(),
        });
    }
    if arr.is_empty() {
        return Ok(0);
    }
    facet_count(&arr.unit_rows(), code, cfg)
}

/// Bounded regions in lexicographic codeword order.
pub fn bounded_regions(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<Vec<RegionInfo>, ArrangementError> {
    Ok(enumerate_regions(arr, cfg)?
        .into_iter()
        .filter(|r| r.bounded)
        .collect())
}

/// The unique bounded region, which exists exactly when `m = n + 1`.
///
/// For `m = n + 1` the region is the simplex spanned by the vertices `v_i`,
/// where `v_i` is the intersection of all hyperplanes except `i`; its sign on
/// hyperplane `i` is the side `v_i` lies on. Other sizes fall back to
/// enumeration and report [`ArrangementError::NotUnique`] when several exist.
pub fn bounded_region(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<RegionInfo, ArrangementError> {
    let n = arr.dim();
    let m = arr.len();
    check_generic(arr, cfg)?;
    if m <= n {
        return Err(ArrangementError::NoneBounded);
    }
    if m > n + 1 {
        let mut all = bounded_regions(arr, cfg)?;
        return match all.len() {
            0 => Err(ArrangementError::NoneBounded),
            1 => Ok(all.remove(0)),
            count => Err(ArrangementError::NotUnique { count }),
        };
    }

    let units = arr.unit_rows();
    let mut centroid = vec![0.0; n];
    let mut signs = Vec::with_capacity(m);
    for i in 0..m {
        let (rows, rhs): (Vec<Vec<f64>>, Vec<f64>) = units
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, h)| (h.normal.clone(), -h.offset))
            .unzip();
        let vertex =
            solve_linear(&rows, &rhs, cfg.eps).map_err(|_| ArrangementError::NotGeneric)?;
        signs.push(Sign::of(units[i].eval(&vertex)).ok_or(ArrangementError::NotGeneric)?);
        centroid
            .iter_mut()
            .zip(&vertex)
            .for_each(|(c, v)| *c += v / m as f64);
    }
    Ok(RegionInfo {
        codeword: Codeword::new(signs),
        bounded: true,
        witness: centroid,
        facet_count: Some(m),
    })
}

/// Words of `{-,+}^m` that label no region.
pub fn missing_codewords(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<BTreeSet<Codeword>, ArrangementError> {
    let present: BTreeSet<u64> = enumerate_regions(arr, cfg)?
        .iter()
        .map(|r| r.codeword.rank())
        .collect();
    let m = arr.len();
    Ok((0..1u64 << m)
        .filter(|r| !present.contains(r))
        .map(|r| Codeword::from_rank(r, m))
        .collect())
}

/// Dimension of the intersection of the closures of regions `a` and `b`, or
/// `None` if the closures are disjoint.
///
/// The intersection is cut out by equality on every hyperplane where the codes
/// differ; its dimension is `n` minus the number of hyperplanes containing it,
/// which is exact for generic arrangements.
pub fn shared_face_dimension(
    arr: &CoorientedArrangement,
    a: &Codeword,
    b: &Codeword,
    cfg: &ArrangementConfig,
) -> Result<Option<usize>, ArrangementError> {
    let m = arr.len();
    for c in [a, b] {
        if c.len() != m {
            return Err(ArrangementError::DimensionMismatch {
                expected: m,
                found: c.len(),
            });
        }
    }
    let n = arr.dim();
    if m == 0 {
        return Ok(Some(n));
    }
    let units = arr.unit_rows();
    let mut constraints = Vec::with_capacity(2 * m);
    for (j, h) in units.iter().enumerate() {
        let s = a[j].as_f64();
        let normal: Vec<f64> = h.normal.iter().map(|v| s * v).collect();
        if a[j] != b[j] {
            constraints.push(Constraint::at_most_zero(normal.clone(), s * h.offset));
        }
        constraints.push(Constraint::at_least_zero(normal, s * h.offset));
    }
    let opts = lp_options(cfg);
    if !maximize_linear_robust(&vec![0.0; n], &constraints, &opts)?.is_feasible() {
        return Ok(None);
    }
    let mut containing = 0;
    for (j, h) in units.iter().enumerate() {
        if a[j] != b[j] {
            containing += 1;
            continue;
        }
        let s = a[j].as_f64();
        let objective: Vec<f64> = h.normal.iter().map(|v| s * v).collect();
        if let LpResult::Bounded { optimum, .. } =
            maximize_linear_robust(&objective, &constraints, &opts)?
        {
            if optimum + s * h.offset <= cfg.interior_margin {
                containing += 1;
            }
        }
    }
    Ok(Some(n.saturating_sub(containing)))
}
