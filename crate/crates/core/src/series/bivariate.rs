use std::collections::BTreeMap;

use super::{Series, SeriesError};
use crate::limitlaw::DistributionTable;
use crate::upoly::UPoly;

/// Distribution of the marked parameter among objects of size `n`: the
/// coefficient `f_n(u)` read as unnormalized probability generating
/// function.
pub fn bivariate_distribution(
    f: &Series<UPoly>,
    n: usize,
) -> Result<DistributionTable, SeriesError> {
    let fnu = f.coeff(n);
    let weights: BTreeMap<i64, _> = fnu
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| (k as i64, c.clone()))
        .collect();
    DistributionTable::from_weights(n, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio, Coeff};

    #[test]
    fn point_mass_from_marked_atoms() {
        // Σ (uz)^n
        let f = Series::<UPoly>::monomial(UPoly::u(), 1)
            .quasi_inverse()
            .unwrap();
        let d = bivariate_distribution(&f, 3).unwrap();
        assert_eq!(d.prob(3), int(1));
        assert_eq!(d.probabilities().len(), 1);
    }

    #[test]
    fn pattern_aa_on_two_letters() {
        // Strings of length 2 over {a,b}: "aa" occurs once in exactly one.
        let f = Series::<UPoly>::polynomial(vec![
            UPoly::one(),
            UPoly::constant(int(2)),
            UPoly::new(vec![int(3), int(1)]),
        ]);
        let d = bivariate_distribution(&f, 2).unwrap();
        assert_eq!(d.prob(1), ratio(1, 4));
        assert_eq!(d.prob(0), ratio(3, 4));
        assert!(bivariate_distribution(&Series::<UPoly>::zero(), 1).is_err());
    }
}
