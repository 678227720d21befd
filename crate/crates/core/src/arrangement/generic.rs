use super::{for_each_combination, ArrangementConfig, ArrangementError, CoorientedArrangement};
use crate::linear::{det_in_place, rank};

/// Whether every `q <= n` hyperplanes meet in an `(n - q)`-dimensional affine
/// subspace and every `n + 1` of them have empty intersection.
///
/// Rows are scaled to unit length before the rank and determinant tests, so
/// the threshold `cfg.eps` is scale free. For `m > n` it suffices to check all
/// `n`-subsets (full rank) and all `(n + 1)`-subsets (nonsingular augmented
/// matrix); smaller subsets inherit full rank and larger ones inherit emptiness.
pub fn is_generic(
    arr: &CoorientedArrangement,
    cfg: &ArrangementConfig,
) -> Result<bool, ArrangementError> {
    arr.check_cap(cfg)?;
    let n = arr.dim();
    let m = arr.len();
    let units = arr.unit_rows();
    if m <= n {
        let normals: Vec<Vec<f64>> = units.iter().map(|h| h.normal.clone()).collect();
        return Ok(rank(&normals, cfg.eps) == m);
    }

    let mut buf = vec![0.0; (n + 1) * (n + 1)];
    let mut generic = true;
    for_each_combination(m, n, |subset| {
        for (r, &j) in subset.iter().enumerate() {
            buf[r * n..(r + 1) * n].copy_from_slice(&units[j].normal);
        }
        generic = det_in_place(&mut buf[..n * n], n).abs() > cfg.eps;
        generic
    });
    if !generic {
        return Ok(false);
    }

    let augmented: Vec<Vec<f64>> = units
        .iter()
        .map(|h| {
            let mut row = h.normal.clone();
            row.push(h.offset);
            let s = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.iter().map(|v| v / s).collect()
        })
        .collect();
    let w = n + 1;
    for_each_combination(m, w, |subset| {
        for (r, &j) in subset.iter().enumerate() {
            buf[r * w..(r + 1) * w].copy_from_slice(&augmented[j]);
        }
        generic = det_in_place(&mut buf, w).abs() > cfg.eps;
        generic
    });
    Ok(generic)
}
