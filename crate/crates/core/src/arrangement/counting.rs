use num_rational::Ratio;
use serde::Serialize;

use super::ArrangementError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionCounts {
    pub total: u128,
    pub bounded: u128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FacetStatistics {
    /// Codimension-one faces of the arrangement; each bounds exactly two regions.
    pub total_facets: u128,
    /// Mean number of facets per region.
    pub avg_facets: Ratio<u128>,
}

/// `C(n, k)` with overflow reported as `None`.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step.
        let num = u128::from(n - i);
        let den = u128::from(i + 1);
        let g = gcd(acc, den);
        acc = (acc / g).checked_mul(num / (den / g))?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binomial_sum(m: u64, upto: u64) -> Result<u128, ArrangementError> {
    (0..=upto).try_fold(0u128, |acc, k| {
        binomial(m, k)
            .and_then(|c| acc.checked_add(c))
            .ok_or(ArrangementError::Overflow)
    })
}

/// Number of regions and of bounded regions of a generic arrangement of `m`
/// hyperplanes in `R^n`.
pub fn region_counts(m: u64, n: u64) -> Result<RegionCounts, ArrangementError> {
    if m == 0 || n == 0 {
        return Err(ArrangementError::InvalidCount);
    }
    if m <= n {
        let total = 1u128
            .checked_shl(m as u32)
            .filter(|_| m < 128)
            .ok_or(ArrangementError::Overflow)?;
        return Ok(RegionCounts { total, bounded: 0 });
    }
    Ok(RegionCounts {
        total: binomial_sum(m, n)?,
        bounded: binomial(m - 1, n).ok_or(ArrangementError::Overflow)?,
    })
}

/// Total facet count over all regions and the mean per region, for a generic
/// arrangement of `m` hyperplanes in `R^n`.
///
/// Each hyperplane carries the regions of its induced arrangement, and each of
/// those is a facet of exactly two regions; the count is also valid for `m <= n`.
pub fn facet_statistics(m: u64, n: u64) -> Result<FacetStatistics, ArrangementError> {
    if m == 0 || n == 0 {
        return Err(ArrangementError::InvalidCount);
    }
    let per_hyperplane = binomial_sum(m - 1, n - 1)?;
    let total_facets = u128::from(m)
        .checked_mul(per_hyperplane)
        .ok_or(ArrangementError::Overflow)?;
    let regions = region_counts(m, n)?.total;
    let twice = total_facets
        .checked_mul(2)
        .ok_or(ArrangementError::Overflow)?;
    Ok(FacetStatistics {
        total_facets,
        avg_facets: Ratio::new(twice, regions),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_binomial(n: u64, k: u64) -> u128 {
        if k > n {
            return 0;
        }
        let mut row = vec![1u128];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[k as usize]
    }

    #[test]
    fn binomial_matches_pascal() {
        for n in 0..40 {
            for k in 0..=n + 1 {
                assert_eq!(binomial(n, k), Some(naive_binomial(n, k)), "C({n},{k})");
            }
        }
        assert!(binomial(300, 150).is_none());
    }

    #[test]
    fn documented_counts() {
        assert_eq!(
            region_counts(4, 2).unwrap(),
            RegionCounts {
                total: 11,
                bounded: 3
            }
        );
        assert_eq!(
            region_counts(3, 3).unwrap(),
            RegionCounts {
                total: 8,
                bounded: 0
            }
        );
        assert_eq!(
            region_counts(5, 2).unwrap(),
            RegionCounts {
                total: 16,
                bounded: 6
            }
        );
        assert_eq!(region_counts(0, 2), Err(ArrangementError::InvalidCount));
        assert_eq!(region_counts(200, 200), Err(ArrangementError::Overflow));
        assert_eq!(region_counts(127, 200).unwrap().total, 1u128 << 127);
    }

    #[test]
    fn facet_statistics_in_the_plane() {
        let s = facet_statistics(4, 2).unwrap();
        assert_eq!(s.total_facets, 16);
        assert_eq!(s.avg_facets, Ratio::new(32, 11));
        // average for n = 2 is 4m^2 / (m^2 + m + 2)
        for m in 3..300u128 {
            let s = facet_statistics(m as u64, 2).unwrap();
            assert_eq!(s.avg_facets, Ratio::new(4 * m * m, m * m + m + 2));
        }
        let avg = facet_statistics(200, 2).unwrap().avg_facets;
        let value = *avg.numer() as f64 / *avg.denom() as f64;
        assert!((value - 4.0).abs() < 0.05);
    }

    #[test]
    fn lines_on_a_line() {
        // m points on a line: m + 1 regions, 2m facet incidences
        let s = facet_statistics(5, 1).unwrap();
        assert_eq!(s.total_facets, 5);
        assert_eq!(s.avg_facets, Ratio::new(10, 6));
    }
}
