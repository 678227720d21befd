use super::{is_generic, ArrangementConfig, ArrangementError, CoorientedArrangement, Hyperplane};
use crate::linear::dot;

/// Orthonormal affine chart `y -> origin + basis^T y` of a unit hyperplane.
///
/// The origin is the point of the hyperplane nearest to 0. The basis comes from
/// Gram-Schmidt applied to the standard basis vectors in index order, skipping
/// the coordinate where the normal is largest in magnitude (lowest index on ties).
pub(crate) fn hyperplane_chart(unit: &Hyperplane) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = unit.dim();
    let origin: Vec<f64> = unit.normal.iter().map(|v| -unit.offset * v).collect();
    let mut skip = 0;
    for k in 1..n {
        if unit.normal[k].abs() > unit.normal[skip].abs() {
            skip = k;
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in (0..n).filter(|&k| k != skip) {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        // two passes of modified Gram-Schmidt keep the basis orthonormal to
        // working precision
        for _ in 0..2 {
            for q in std::iter::once(&unit.normal).chain(basis.iter()) {
                let c = dot(&v, q);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let len = dot(&v, &v).sqrt();
        basis.push(v.into_iter().map(|a| a / len).collect());
    }
    (origin, basis)
}

/// The arrangement traced on hyperplane `i` by the others, expressed in the
/// orthonormal chart of hyperplane `i`. Order is preserved with `i` removed and
/// each trace keeps the coorientation of the hyperplane it came from.
pub fn induced_arrangement(
    arr: &CoorientedArrangement,
    i: usize,
    cfg: &ArrangementConfig,
) -> Result<CoorientedArrangement, ArrangementError> {
    let n = arr.dim();
    if n < 2 {
        return Err(ArrangementError::DimensionTooSmall);
    }
    if i >= arr.len() {
        return Err(ArrangementError::IndexOutOfRange {
            index: i,
            m: arr.len(),
        });
    }
    if !is_generic(arr, cfg)? {
        return Err(ArrangementError::NotGeneric);
    }
    let (origin, basis) = hyperplane_chart(&arr.hyperplanes()[i].unit());
    let traces = arr
        .hyperplanes()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, h)| Hyperplane {
            normal: basis.iter().map(|q| dot(&h.normal, q)).collect(),
            offset: h.eval(&origin),
        })
        .collect();
    CoorientedArrangement::new(n - 1, traces)
}
