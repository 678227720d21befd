use serde::{Deserialize, Serialize};

use super::scalar::{max_abs, Scalar};
use super::LinearError;

/// Solves the square system `matrix * x = rhs` by Gaussian elimination with
/// partial pivoting.
///
/// A pivot whose magnitude is at most `eps` times the largest entry of the
/// matrix is treated as zero and reported as [`LinearError::Singular`].
pub fn solve_linear<S: Scalar>(
    matrix: &[Vec<S>],
    rhs: &[S],
    eps: f64,
) -> Result<Vec<S>, LinearError> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(LinearError::NotSquare);
    }
    if rhs.len() != n {
        return Err(LinearError::DimensionMismatch {
            expected: n,
            found: rhs.len(),
        });
    }

    let scale = max_abs(matrix.iter().flatten().cloned());
    let threshold = S::tolerance(eps) * scale;
    let mut a: Vec<Vec<S>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("comparable")
            })
            .expect("non-empty range");
        if a[pivot_row][col].abs() <= threshold || a[pivot_row][col].is_zero() {
            return Err(LinearError::Singular);
        }
        a.swap(col, pivot_row);
        let (upper, lower) = a.split_at_mut(col + 1);
        eliminate(&upper[col], lower, col);
    }

    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let mut acc = a[row][n].clone();
        for k in row + 1..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Ok(x)
}

/// Numerical rank of the given rows, using the same relative pivot rule as
/// [`solve_linear`].
pub fn rank<S: Scalar>(rows: &[Vec<S>], eps: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let scale = max_abs(rows.iter().flatten().cloned());
    if scale.is_zero() {
        return 0;
    }
    let threshold = S::tolerance(eps) * scale;
    let mut a = rows.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        if rank == a.len() {
            break;
        }
        let pivot_row = (rank..a.len())
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .expect("comparable")
            })
            .expect("non-empty range");
        if a[pivot_row][col].abs() <= threshold || a[pivot_row][col].is_zero() {
            continue;
        }
        a.swap(rank, pivot_row);
        let (upper, lower) = a.split_at_mut(rank + 1);
        eliminate(&upper[rank], lower, col);
        rank += 1;
    }
    rank
}

/// Subtracts multiples of `pivot` from `rows` to clear column `col`.
fn eliminate<S: Scalar>(pivot: &[S], rows: &mut [Vec<S>], col: usize) {
    for row in rows {
        if row[col].is_zero() {
            continue;
        }
        let factor = row[col].clone() / pivot[col].clone();
        for (dst, src) in row[col..].iter_mut().zip(&pivot[col..]) {
            *dst = dst.clone() - factor.clone() * src.clone();
        }
    }
}

/// Determinant of a small square matrix (Gaussian elimination, no threshold).
pub fn determinant(matrix: &[Vec<f64>]) -> f64 {
    let n = matrix.len();
    let mut a = matrix.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot_row][col] == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            a.swap(col, pivot_row);
            det = -det;
        }
        det *= a[col][col];
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot = &upper[col];
        for row in lower {
            let factor = row[col] / pivot[col];
            for (dst, src) in row[col..].iter_mut().zip(&pivot[col..]) {
                *dst -= factor * src;
            }
        }
    }
    det
}

/// Determinant of the row-major `n x n` matrix stored in `a`, destroying it.
pub fn det_in_place(a: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        let p = a[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Solves the row-major `n x n` system in place; `rhs` receives the solution.
/// Returns `false` when a pivot falls below `eps` times the largest entry.
pub fn solve_in_place(a: &mut [f64], rhs: &mut [f64], n: usize, eps: f64) -> bool {
    debug_assert_eq!(a.len(), n * n);
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let threshold = eps * scale;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[row * n + col].abs() > a[pivot * n + col].abs() {
                pivot = row;
            }
        }
        let p = a[pivot * n + col];
        if p.abs() <= threshold || p == 0.0 {
            return false;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            rhs.swap(col, pivot);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * rhs[k];
        }
        rhs[row] = acc / a[row * n + row];
    }
    true
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// An affine map `x -> matrix * x + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(rename = "W")]
    pub matrix: Vec<Vec<f64>>,
    #[serde(rename = "b")]
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self, LinearError> {
        let map = AffineMap { matrix, offset };
        map.validate()?;
        Ok(map)
    }

    /// Checks row/offset agreement, rectangular shape and finiteness.
    pub fn validate(&self) -> Result<(), LinearError> {
        if self.matrix.len() != self.offset.len() {
            return Err(LinearError::DimensionMismatch {
                expected: self.matrix.len(),
                found: self.offset.len(),
            });
        }
        let cols = self.cols();
        if let Some(row) = self.matrix.iter().find(|row| row.len() != cols) {
            return Err(LinearError::DimensionMismatch {
                expected: cols,
                found: row.len(),
            });
        }
        if self
            .matrix
            .iter()
            .flatten()
            .chain(&self.offset)
            .any(|v| !v.is_finite())
        {
            return Err(LinearError::NonFinite);
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>, LinearError> {
        if x.len() != self.cols() {
            return Err(LinearError::DimensionMismatch {
                expected: self.cols(),
                found: x.len(),
            });
        }
        Ok(self
            .matrix
            .iter()
            .zip(&self.offset)
            .map(|(row, b)| dot(row, x) + b)
            .collect())
    }
}
