use std::collections::BTreeMap;
use std::io::Write;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::scalar::{int, rational_to_f64, Rational};
use crate::series::SeriesError;

/// Exact probability distribution of an integer-valued parameter at size `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionTable {
    pub n: usize,
    probs: BTreeMap<i64, Rational>,
    mean: Rational,
    variance: Rational,
}

/// Floating summary used by reports.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
}

impl DistributionTable {
    /// Normalize nonnegative weights into probabilities.
    pub fn from_weights(n: usize, weights: BTreeMap<i64, Rational>) -> Result<Self, SeriesError> {
        if weights.values().any(|w| w.is_negative()) {
            return Err(SeriesError::NegativeMass { n });
        }
        let total: Rational = weights.values().sum();
        if total.is_zero() {
            return Err(SeriesError::ZeroMass { n });
        }
        let probs: BTreeMap<i64, Rational> = weights
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(v, w)| (v, w / &total))
            .collect();
        let mean: Rational = probs.iter().map(|(v, p)| int(*v) * p).sum();
        let second: Rational = probs.iter().map(|(v, p)| int(*v) * int(*v) * p).sum();
        let variance = second - &mean * &mean;
        Ok(DistributionTable {
            n,
            probs,
            mean,
            variance,
        })
    }

    pub fn point_mass(n: usize, value: i64) -> Self {
        let mut w = BTreeMap::new();
        w.insert(value, int(1));
        Self::from_weights(n, w).expect("unit mass")
    }

    pub fn probabilities(&self) -> &BTreeMap<i64, Rational> {
        &self.probs
    }

    pub fn prob(&self, value: i64) -> Rational {
        self.probs
            .get(&value)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.values().sum()
    }

    pub fn mean(&self) -> &Rational {
        &self.mean
    }

    pub fn variance(&self) -> &Rational {
        &self.variance
    }

    pub fn mean_f64(&self) -> f64 {
        rational_to_f64(&self.mean)
    }

    pub fn variance_f64(&self) -> f64 {
        rational_to_f64(&self.variance)
    }

    pub fn moments(&self) -> Moments {
        Moments {
            n: self.n,
            mean: self.mean_f64(),
            variance: self.variance_f64(),
        }
    }

    /// `(value, P(X <= value))` at every support point, in floating point.
    pub fn cdf_points(&self) -> Vec<(i64, f64)> {
        let mut acc = Rational::zero();
        self.probs
            .iter()
            .map(|(v, p)| {
                acc += p;
                (*v, rational_to_f64(&acc))
            })
            .collect()
    }

    /// CSV rows `n,value,prob_num,prob_den` (no header).
    pub fn write_csv_rows(&self, mut out: impl Write) -> std::io::Result<()> {
        for (v, p) in &self.probs {
            writeln!(out, "{},{},{},{}", self.n, v, p.numer(), p.denom())?;
        }
        Ok(())
    }
}

pub const DISTRIBUTION_CSV_HEADER: &str = "n,value,prob_num,prob_den";

/// Several tables in one CSV document.
pub fn write_distributions_csv(
    tables: &[DistributionTable],
    mut out: impl Write,
) -> std::io::Result<()> {
    writeln!(out, "{DISTRIBUTION_CSV_HEADER}")?;
    for t in tables {
        t.write_csv_rows(&mut out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn normalizes_and_summarizes() {
        let mut w = BTreeMap::new();
        w.insert(0, int(3));
        w.insert(1, int(1));
        let d = DistributionTable::from_weights(2, w).unwrap();
        assert_eq!(d.prob(1), ratio(1, 4));
        assert_eq!(d.total(), int(1));
        assert_eq!(*d.mean(), ratio(1, 4));
        assert_eq!(*d.variance(), ratio(3, 16));
        let mut buf = Vec::new();
        write_distributions_csv(&[d], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,value,prob_num,prob_den\n2,0,3,4\n2,1,1,4\n"
        );
    }

    #[test]
    fn rejects_degenerate_weights() {
        assert_eq!(
            DistributionTable::from_weights(3, BTreeMap::new()).unwrap_err(),
            SeriesError::ZeroMass { n: 3 }
        );
        let mut w = BTreeMap::new();
        w.insert(0, int(-1));
        w.insert(1, int(2));
        assert!(DistributionTable::from_weights(3, w).is_err());
    }
}
