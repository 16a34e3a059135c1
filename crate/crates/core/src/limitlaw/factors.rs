use num_bigint::BigInt;
use num_traits::{Pow, Zero};

use crate::scalar::{int, Coeff, Rational};
use crate::series::{Series, SeriesError};
use crate::upoly::UPoly;

fn mobius(mut n: usize) -> i64 {
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Number of monic irreducible polynomials of degree `n` over `F_q`,
/// `(1/n) Σ_{d|n} μ(d) q^{n/d}`, for `n = 0..=n_max` (entry 0 is zero).
pub fn irreducible_counts(q: u64, n_max: usize) -> Vec<BigInt> {
    let base = BigInt::from(q);
    let mut out = vec![BigInt::zero()];
    for n in 1..=n_max {
        let total: BigInt = (1..=n)
            .filter(|d| n % d == 0)
            .map(|d| BigInt::from(mobius(d)) * Pow::pow(&base, (n / d) as u32))
            .sum();
        out.push(total / BigInt::from(n));
    }
    out
}

/// `P(z, u) = exp(Σ_k u^k I(z^k)/k)`: monic polynomials over `F_q` with `u`
/// marking the number of irreducible factors counted with multiplicity,
/// truncated at `n_max`.
pub fn factor_count_model(q: u64, n_max: usize) -> Result<Series<UPoly>, SeriesError> {
    let counts = irreducible_counts(q, n_max);
    let mut log = vec![UPoly::zero(); n_max + 1];
    for (m, c) in counts.iter().enumerate().skip(1) {
        for k in 1..=n_max / m {
            let w = Rational::new(c.clone(), BigInt::from(k));
            log[m * k].add_assign(&UPoly::monomial(w, k));
        }
    }
    Ok(Series::polynomial(log).exp()?.truncate(n_max))
}

/// The same model at `u = 1`, which must be `1/(1 - qz)`.
pub fn factor_count_total(q: u64, n_max: usize) -> Result<Vec<Rational>, SeriesError> {
    let p = factor_count_model(q, n_max)?;
    Ok((0..=n_max).map(|n| p.coeff(n).eval(&int(1))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::series::bivariate_distribution;

    #[test]
    fn small_counts_over_f2() {
        let c = irreducible_counts(2, 6);
        let small: Vec<i64> = c.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(small, vec![0, 2, 1, 2, 3, 6, 9]);
        assert_eq!(irreducible_counts(3, 2)[2], BigInt::from(3));
    }

    #[test]
    fn prime_number_theorem_analogue() {
        let c = irreducible_counts(2, 20);
        let ratio = crate::scalar::rational_to_f64(&Rational::new(
            c[20].clone() * 20,
            BigInt::from(1u64 << 20),
        ));
        assert!((ratio - 1.0).abs() < 1e-3);
    }

    #[test]
    fn unique_factorization() {
        let total = factor_count_total(2, 12).unwrap();
        for (n, t) in total.iter().enumerate() {
            assert_eq!(*t, int(1 << n));
        }
        // x^2, x(x+1), (x+1)^2 have two factors; x^2+x+1 has one.
        let p = factor_count_model(2, 4).unwrap();
        assert_eq!(p.coeff(2), UPoly::new(vec![int(0), int(1), int(3)]));
        let d = bivariate_distribution(&p, 4).unwrap();
        assert_eq!(d.total(), int(1));
    }
}
