//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are posed over free variables `x ∈ R^n` with constraints of the
//! form `normal · x + offset >= 0` (or `<= 0`). Internally every free
//! variable is split as `x = u - v` with `u, v >= 0` and every constraint gets
//! a surplus column, so the tableau is in equality standard form.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::scalar::{max_abs, Scalar};
use super::LinearError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// `normal · x + offset >= 0`
    AtLeastZero,
    /// `normal · x + offset <= 0`
    AtMostZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<S> {
    pub normal: Vec<S>,
    pub offset: S,
    pub sense: Sense,
}

impl<S: Scalar> Constraint<S> {
    pub fn at_least_zero(normal: Vec<S>, offset: S) -> Self {
        Constraint {
            normal,
            offset,
            sense: Sense::AtLeastZero,
        }
    }

    pub fn at_most_zero(normal: Vec<S>, offset: S) -> Self {
        Constraint {
            normal,
            offset,
            sense: Sense::AtMostZero,
        }
    }

    /// Slack in the `>= 0` orientation: non-negative iff `x` satisfies the constraint.
    pub fn slack(&self, x: &[S]) -> S {
        let value = self
            .normal
            .iter()
            .zip(x)
            .fold(self.offset.clone(), |acc, (a, b)| {
                acc + a.clone() * b.clone()
            });
        match self.sense {
            Sense::AtLeastZero => value,
            Sense::AtMostZero => -value,
        }
    }

    /// Rate of change of [`Constraint::slack`] along direction `d`.
    pub fn directional_slack(&self, d: &[S]) -> S {
        let value = self
            .normal
            .iter()
            .zip(d)
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        match self.sense {
            Sense::AtLeastZero => value,
            Sense::AtMostZero => -value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult<S> {
    Infeasible,
    Bounded {
        optimum: S,
        argmax: Vec<S>,
    },
    /// The objective grows without bound along `ray` from any feasible point.
    Unbounded {
        ray: Vec<S>,
    },
}

impl<S: Scalar> LpResult<S> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpResult::Infeasible)
    }

    pub fn to_f64(&self) -> LpResult<f64> {
        match self {
            LpResult::Infeasible => LpResult::Infeasible,
            LpResult::Bounded { optimum, argmax } => LpResult::Bounded {
                optimum: optimum.to_f64_lossy(),
                argmax: argmax.iter().map(Scalar::to_f64_lossy).collect(),
            },
            LpResult::Unbounded { ray } => LpResult::Unbounded {
                ray: ray.iter().map(Scalar::to_f64_lossy).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Pivot, reduced-cost and feasibility threshold (ignored by exact scalars).
    pub eps: f64,
    /// Allow an empty constraint list, meaning the whole space is feasible.
    pub full_space: bool,
    /// Pivot budget per phase; `None` picks a bound from the tableau size.
    pub max_pivots: Option<usize>,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            eps: 1e-9,
            full_space: false,
            max_pivots: None,
        }
    }
}

/// Maximizes `objective · x` over the closed polyhedron described by
/// `constraints`, returning the exact trichotomy infeasible / bounded /
/// unbounded. Bounded results carry an optimal point and unbounded results
/// carry an improving recession ray; both are re-verified against the
/// original constraints before being returned.
pub fn maximize_linear<S: Scalar>(
    objective: &[S],
    constraints: &[Constraint<S>],
    opts: &LpOptions,
) -> Result<LpResult<S>, LinearError> {
    let n = objective.len();
    if n == 0 {
        return Err(LinearError::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    if let Some(c) = constraints.iter().find(|c| c.normal.len() != n) {
        return Err(LinearError::DimensionMismatch {
            expected: n,
            found: c.normal.len(),
        });
    }
    if constraints.is_empty() {
        if !opts.full_space {
            return Err(LinearError::NoConstraints);
        }
        let tol = S::tolerance(opts.eps);
        return Ok(if objective.iter().all(|c| c.abs() <= tol) {
            LpResult::Bounded {
                optimum: S::zero(),
                argmax: vec![S::zero(); n],
            }
        } else {
            LpResult::Unbounded {
                ray: objective.to_vec(),
            }
        });
    }

    let mut tableau = Tableau::build(objective, constraints, opts)?;
    let result = match tableau.solve()? {
        None => LpResult::Infeasible,
        Some(outcome) => outcome,
    };
    verify(objective, constraints, &result, opts)?;
    Ok(result)
}

/// [`maximize_linear`] over `f64`, retrying in exact rational arithmetic when
/// the floating-point solve reports [`LinearError::NumericalInstability`].
pub fn maximize_linear_robust(
    objective: &[f64],
    constraints: &[Constraint<f64>],
    opts: &LpOptions,
) -> Result<LpResult<f64>, LinearError> {
    match maximize_linear(objective, constraints, opts) {
        Err(LinearError::NumericalInstability) => {
            let q = |v: &f64| BigRational::from_f64_lossless(*v);
            let objective: Vec<BigRational> = objective.iter().map(q).collect();
            let constraints: Vec<Constraint<BigRational>> = constraints
                .iter()
                .map(|c| Constraint {
                    normal: c.normal.iter().map(q).collect(),
                    offset: q(&c.offset),
                    sense: c.sense,
                })
                .collect();
            Ok(maximize_linear(&objective, &constraints, opts)?.to_f64())
        }
        other => other,
    }
}

fn verify<S: Scalar>(
    objective: &[S],
    constraints: &[Constraint<S>],
    result: &LpResult<S>,
    opts: &LpOptions,
) -> Result<(), LinearError> {
    let tol = S::tolerance(opts.eps.max(1e-12) * 1e3);
    match result {
        LpResult::Infeasible => Ok(()),
        LpResult::Bounded { argmax, .. } => {
            let scale = S::one() + max_abs(argmax.iter().cloned());
            for c in constraints {
                let row_scale =
                    S::one() + max_abs(c.normal.iter().cloned().chain([c.offset.clone()]));
                if c.slack(argmax) < -(tol.clone() * scale.clone() * row_scale) {
                    return Err(LinearError::NumericalInstability);
                }
            }
            Ok(())
        }
        LpResult::Unbounded { ray } => {
            let ray_scale = max_abs(ray.iter().cloned());
            for c in constraints {
                let row_scale = max_abs(c.normal.iter().cloned());
                if c.directional_slack(ray) < -(tol.clone() * ray_scale.clone() * row_scale) {
                    return Err(LinearError::NumericalInstability);
                }
            }
            let gain = objective
                .iter()
                .zip(ray)
                .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            let obj_scale = max_abs(objective.iter().cloned());
            if gain <= S::tolerance(opts.eps) * ray_scale * obj_scale || gain <= S::zero() {
                return Err(LinearError::NumericalInstability);
            }
            Ok(())
        }
    }
}

/// Column layout: `u` in `0..n`, `v` in `n..2n`, surplus in `2n..2n+r`,
/// artificials after that.
struct Tableau<S> {
    n: usize,
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    first_artificial: usize,
    objective: Vec<S>,
    tol: S,
    feasibility_tol: S,
    max_pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn build(
        objective: &[S],
        constraints: &[Constraint<S>],
        opts: &LpOptions,
    ) -> Result<Self, LinearError> {
        let n = objective.len();
        let tol = S::tolerance(opts.eps);

        // Normalize every row to `g · x >= h` with max |g| = 1.
        let mut normalized: Vec<(Vec<S>, S)> = Vec::with_capacity(constraints.len());
        for c in constraints {
            let (g, h): (Vec<S>, S) = match c.sense {
                Sense::AtLeastZero => (c.normal.clone(), -c.offset.clone()),
                Sense::AtMostZero => (
                    c.normal.iter().map(|v| -v.clone()).collect(),
                    c.offset.clone(),
                ),
            };
            let scale = max_abs(g.iter().cloned());
            if scale <= tol || scale.is_zero() {
                // 0 >= h: either vacuous or infeasible.
                if h > tol.clone() * (S::one() + h.abs()) {
                    normalized.push((vec![S::zero(); n], S::one()));
                }
                continue;
            }
            normalized.push((
                g.iter().map(|v| v.clone() / scale.clone()).collect(),
                h / scale,
            ));
        }

        let r = normalized.len();
        let needs_artificial: Vec<bool> = normalized.iter().map(|(_, h)| *h >= S::zero()).collect();
        let artificial_count = needs_artificial.iter().filter(|&&b| b).count();
        let first_artificial = 2 * n + r;
        let cols = first_artificial + artificial_count;

        let mut rows = Vec::with_capacity(r);
        let mut rhs = Vec::with_capacity(r);
        let mut basis = Vec::with_capacity(r);
        let mut next_artificial = first_artificial;
        for (i, (g, h)) in normalized.into_iter().enumerate() {
            let mut row = vec![S::zero(); cols];
            let flip = !needs_artificial[i];
            for k in 0..n {
                let coef = if flip { -g[k].clone() } else { g[k].clone() };
                row[n + k] = -coef.clone();
                row[k] = coef;
            }
            if flip {
                row[2 * n + i] = S::one();
                rhs.push(-h);
                basis.push(2 * n + i);
            } else {
                row[2 * n + i] = -S::one();
                row[next_artificial] = S::one();
                rhs.push(h);
                basis.push(next_artificial);
                next_artificial += 1;
            }
            rows.push(row);
        }

        let feasibility_tol = S::tolerance(opts.eps) * (S::one() + max_abs(rhs.iter().cloned()));
        let max_pivots = opts.max_pivots.unwrap_or(50 * (cols + r) + 1000);
        Ok(Tableau {
            n,
            rows,
            rhs,
            basis,
            first_artificial,
            objective: objective.to_vec(),
            tol,
            feasibility_tol,
            max_pivots,
        })
    }

    fn cols(&self) -> usize {
        self.rows.first().map_or(self.first_artificial, Vec::len)
    }

    fn reduced_costs(&self, cost: &[S]) -> Vec<S> {
        let mut d = cost.to_vec();
        for (i, &b) in self.basis.iter().enumerate() {
            if cost[b].is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj = dj.clone() - cost[b].clone() * self.rows[i][j].clone();
            }
        }
        d
    }

    fn pivot(&mut self, d: &mut [S], row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || self.rows[i][col].is_zero() {
                continue;
            }
            let f = self.rows[i][col].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.rhs[i] = self.rhs[i].clone() - f * pivot_rhs.clone();
        }
        let f = d[col].clone();
        if !f.is_zero() {
            for (v, pv) in d.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[row] = col;
    }

    /// Runs Bland-rule pivots to optimality. Returns the entering column of an
    /// unbounded direction, if one is found.
    fn iterate(&mut self, d: &mut [S], allowed: usize) -> Result<Option<usize>, LinearError> {
        for _ in 0..self.max_pivots {
            let entering = (0..allowed).find(|&j| d[j] > self.tol && !self.basis.contains(&j));
            let Some(col) = entering else {
                return Ok(None);
            };
            let mut leaving: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if *a <= self.tol || a.is_zero() {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((best, best_ratio)) => {
                        let slack = self.tol.clone() * (S::one() + best_ratio.abs());
                        let strictly_better = ratio < best_ratio.clone() - slack.clone();
                        let tie_with_lower_index =
                            ratio <= best_ratio.clone() + slack && self.basis[i] < self.basis[best];
                        if strictly_better || tie_with_lower_index {
                            Some((i, ratio))
                        } else {
                            Some((best, best_ratio))
                        }
                    }
                };
            }
            match leaving {
                None => return Ok(Some(col)),
                Some((row, _)) => self.pivot(d, row, col),
            }
        }
        Err(LinearError::NumericalInstability)
    }

    fn solve(&mut self) -> Result<Option<LpResult<S>>, LinearError> {
        let cols = self.cols();

        // Phase 1: maximize -(sum of artificials).
        if self.first_artificial < cols {
            let cost: Vec<S> = (0..cols)
                .map(|j| {
                    if j >= self.first_artificial {
                        -S::one()
                    } else {
                        S::zero()
                    }
                })
                .collect();
            let mut d = self.reduced_costs(&cost);
            if self.iterate(&mut d, cols)?.is_some() {
                // Phase 1 objective is bounded above by zero.
                return Err(LinearError::NumericalInstability);
            }
            let infeasibility = self
                .basis
                .iter()
                .zip(&self.rhs)
                .filter(|(&b, _)| b >= self.first_artificial)
                .fold(S::zero(), |acc, (_, v)| acc + v.clone());
            if infeasibility > self.feasibility_tol {
                return Ok(None);
            }
            self.drive_out_artificials(&mut d);
        }

        // Phase 2 over the original objective; artificial columns never re-enter.
        let n = self.n;
        let cost: Vec<S> = (0..cols)
            .map(|j| {
                if j < n {
                    self.objective[j].clone()
                } else if j < 2 * n {
                    -self.objective[j - n].clone()
                } else {
                    S::zero()
                }
            })
            .collect();
        let mut d = self.reduced_costs(&cost);
        match self.iterate(&mut d, self.first_artificial)? {
            Some(col) => Ok(Some(LpResult::Unbounded { ray: self.ray(col) })),
            None => {
                let argmax = self.point();
                let optimum = self
                    .objective
                    .iter()
                    .zip(&argmax)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
                Ok(Some(LpResult::Bounded { optimum, argmax }))
            }
        }
    }

    fn drive_out_artificials(&mut self, d: &mut [S]) {
        let mut redundant = Vec::new();
        for i in 0..self.rows.len() {
            if self.basis[i] < self.first_artificial {
                continue;
            }
            let replacement = (0..self.first_artificial)
                .filter(|j| !self.basis.contains(j))
                .max_by(|&a, &b| {
                    self.rows[i][a]
                        .abs()
                        .partial_cmp(&self.rows[i][b].abs())
                        .expect("comparable")
                });
            match replacement {
                Some(j) if self.rows[i][j].abs() > self.tol && !self.rows[i][j].is_zero() => {
                    self.pivot(d, i, j)
                }
                _ => redundant.push(i),
            }
        }
        for &i in redundant.iter().rev() {
            self.rows.remove(i);
            self.rhs.remove(i);
            self.basis.remove(i);
        }
    }

    fn value_of(&self, col: usize) -> S {
        self.basis
            .iter()
            .position(|&b| b == col)
            .map_or(S::zero(), |i| self.rhs[i].clone())
    }

    fn point(&self) -> Vec<S> {
        (0..self.n)
            .map(|k| self.value_of(k) - self.value_of(self.n + k))
            .collect()
    }

    fn ray(&self, entering: usize) -> Vec<S> {
        let n = self.n;
        let mut ray = vec![S::zero(); n];
        let mut bump = |col: usize, amount: S| {
            if col < n {
                ray[col] = ray[col].clone() + amount;
            } else if col < 2 * n {
                ray[col - n] = ray[col - n].clone() - amount;
            }
        };
        bump(entering, S::one());
        for (i, &b) in self.basis.iter().enumerate() {
            bump(b, -self.rows[i][entering].clone());
        }
        ray
    }
}
