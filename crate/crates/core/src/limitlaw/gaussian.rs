use serde::Serialize;
use statrs::function::erf::erfc;

use super::{DistributionTable, LimitLawError};

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Kolmogorov distance between an integer-valued distribution, mapped
/// through `transform`, and a continuous `cdf`. Both one-sided gaps are
/// taken at every jump.
pub fn ks_distance(
    table: &DistributionTable,
    transform: impl Fn(f64) -> f64,
    cdf: impl Fn(f64) -> f64,
) -> f64 {
    let mut below = 0.0;
    let mut worst = 0.0f64;
    for (v, at) in table.cdf_points() {
        let f = cdf(transform(v as f64));
        worst = worst.max((at - f).abs()).max((below - f).abs());
        below = at;
    }
    worst
}

/// Kolmogorov distance of the standardized distribution to `N(0, 1)`.
pub fn ks_normal(table: &DistributionTable) -> Result<f64, LimitLawError> {
    let var = table.variance_f64();
    if var.is_nan() || var <= 0.0 {
        return Err(LimitLawError::ZeroVariance { n: table.n });
    }
    let (mean, sd) = (table.mean_f64(), var.sqrt());
    Ok(ks_distance(table, |v| (v - mean) / sd, normal_cdf))
}

/// One line of a Gaussian convergence report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KsRow {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub ks: f64,
}

/// Kolmogorov distance to the normal law for each table, in input order.
pub fn gaussian_convergence_check(
    tables: &[DistributionTable],
) -> Result<Vec<KsRow>, LimitLawError> {
    tables
        .iter()
        .map(|t| {
            Ok(KsRow {
                n: t.n,
                mean: t.mean_f64(),
                variance: t.variance_f64(),
                ks: ks_normal(t)?,
            })
        })
        .collect()
}

/// `true` when the distances strictly decrease along the rows.
pub fn strictly_decreasing(rows: &[KsRow]) -> bool {
    rows.windows(2).all(|w| w[1].ks < w[0].ks)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use num_bigint::BigInt;

    use super::*;
    use crate::scalar::Rational;

    fn binomial(n: usize) -> DistributionTable {
        let mut w = BTreeMap::new();
        let mut c = BigInt::from(1);
        for k in 0..=n {
            w.insert(k as i64, Rational::from_integer(c.clone()));
            c = c * (n - k) / (k + 1);
        }
        DistributionTable::from_weights(n, w).unwrap()
    }

    #[test]
    fn binomial_distances_shrink_like_inverse_root() {
        let tables: Vec<_> = [16, 64, 256, 1024].into_iter().map(binomial).collect();
        let rows = gaussian_convergence_check(&tables).unwrap();
        assert!(strictly_decreasing(&rows));
        for r in &rows {
            // The atom at the median dominates: about 0.4/√n.
            let scaled = r.ks * (r.n as f64).sqrt();
            assert!((0.3..0.5).contains(&scaled), "{r:?}");
        }
        let json = serde_json::to_string(&rows[..1]).unwrap();
        assert!(json.starts_with("[{\"n\":16,\"mean\":8.0,\"variance\":4.0,\"ks\":"));
    }

    #[test]
    fn point_mass_has_no_standardization() {
        assert_eq!(
            ks_normal(&DistributionTable::point_mass(5, 2)).unwrap_err(),
            LimitLawError::ZeroVariance { n: 5 }
        );
    }
}
