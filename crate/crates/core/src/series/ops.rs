//! Series algebra: the operators of the construction dictionary and the
//! closure operations (calculus, Hadamard product, substitution).

use super::{Feed, Series, SeriesError};
use crate::scalar::{int, Coeff};

/// Euler's totient.
pub(crate) fn totient(mut n: usize) -> usize {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

impl<C: Coeff> Series<C> {
    pub fn add(&self, other: &Series<C>) -> Series<C> {
        if let (Some(a), Some(b)) = (self.as_polynomial(), other.as_polynomial()) {
            let len = a.len().max(b.len());
            let zero = C::zero();
            return Series::polynomial(
                (0..len)
                    .map(|k| a.get(k).unwrap_or(&zero).add(b.get(k).unwrap_or(&zero)))
                    .collect(),
            );
        }
        let (mut a, mut b) = (Feed::new(self), Feed::new(other));
        Series::from_generator(move |n: usize, _: &[C]| {
            a.pull(n);
            b.pull(n);
            a.at(n).add(b.at(n))
        })
    }

    pub fn sub(&self, other: &Series<C>) -> Series<C> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Series<C> {
        self.scale(&C::one().neg())
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &C) -> Series<C> {
        if let Some(p) = self.as_polynomial() {
            return Series::polynomial(p.iter().map(|x| x.mul(c)).collect());
        }
        let c = c.clone();
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, _: &[C]| {
            a.pull(n);
            a.at(n).mul(&c)
        })
    }

    /// Cauchy product.
    pub fn mul(&self, other: &Series<C>) -> Series<C> {
        if let (Some(a), Some(b)) = (self.as_polynomial(), other.as_polynomial()) {
            if a.is_empty() || b.is_empty() {
                return Series::zero();
            }
            let mut out = vec![C::zero(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j].add_product(x, y);
                }
            }
            return Series::polynomial(out);
        }
        // A polynomial factor only touches a bounded window.
        if let Some(p) = other.as_polynomial().or(self.as_polynomial()) {
            let p = p.to_vec();
            let f = if other.as_polynomial().is_some() {
                self
            } else {
                other
            };
            let mut a = Feed::new(f);
            return Series::from_generator(move |n: usize, _: &[C]| {
                a.pull(n);
                let mut acc = C::zero();
                for (k, pk) in p.iter().enumerate().take(n + 1) {
                    acc.add_product(pk, a.at(n - k));
                }
                acc
            });
        }
        let (mut a, mut b) = (Feed::new(self), Feed::new(other));
        Series::from_generator(move |n: usize, _: &[C]| {
            a.pull(n);
            b.pull(n);
            let mut acc = C::zero();
            for k in 0..=n {
                acc.add_product(a.at(k), b.at(n - k));
            }
            acc
        })
    }

    /// Termwise product `Σ f_n g_n z^n`.
    pub fn hadamard(&self, other: &Series<C>) -> Series<C> {
        let (mut a, mut b) = (Feed::new(self), Feed::new(other));
        Series::from_generator(move |n: usize, _: &[C]| {
            a.pull(n);
            b.pull(n);
            a.at(n).mul(b.at(n))
        })
    }

    /// `1/(1 - f)` for `f_0 = 0`.
    pub fn quasi_inverse(&self) -> Result<Series<C>, SeriesError> {
        self.require_zero_constant("quasi-inverse")?;
        Ok(self.quasi_inverse_unchecked())
    }

    pub(crate) fn quasi_inverse_unchecked(&self) -> Series<C> {
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, prev: &[C]| {
            if n == 0 {
                return C::one();
            }
            a.pull(n);
            let mut acc = C::zero();
            for k in 1..=n {
                acc.add_product(a.at(k), &prev[n - k]);
            }
            acc
        })
    }

    /// Multiplicative inverse; needs an invertible constant term.
    pub fn inverse(&self) -> Result<Series<C>, SeriesError> {
        let inv0 = self
            .coeff(0)
            .inv()
            .ok_or(SeriesError::NotUnit { op: "inverse" })?;
        Ok(self.inverse_unchecked(inv0))
    }

    /// Inverse when `1/f_0` is known in advance (a recursive operand whose
    /// constant term is not computed yet).
    pub(crate) fn inverse_unchecked(&self, inv0: C) -> Series<C> {
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, prev: &[C]| {
            if n == 0 {
                return inv0.clone();
            }
            a.pull(n);
            let mut acc = C::zero();
            for k in 1..=n {
                acc.add_product(a.at(k), &prev[n - k]);
            }
            acc.mul(&inv0).neg()
        })
    }

    /// Quotient `self / other`.
    pub fn div(&self, other: &Series<C>) -> Result<Series<C>, SeriesError> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Formal `exp(f)` for `f_0 = 0`.
    pub fn exp(&self) -> Result<Series<C>, SeriesError> {
        self.require_zero_constant("exp")?;
        Ok(self.exp_unchecked())
    }

    pub(crate) fn exp_unchecked(&self) -> Series<C> {
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, prev: &[C]| {
            if n == 0 {
                return C::one();
            }
            a.pull(n);
            // n h_n = Σ k f_k h_{n-k}
            let mut acc = C::zero();
            for k in 1..=n {
                let fk = a.at(k);
                if !fk.is_zero() {
                    acc.add_product(&fk.scale(&int(k as i64)), &prev[n - k]);
                }
            }
            acc.scale_ratio(1, n as i64)
        })
    }

    /// `log(1/(1 - f))` for `f_0 = 0`.
    pub fn log_inv(&self) -> Result<Series<C>, SeriesError> {
        self.require_zero_constant("log-inverse")?;
        Ok(self.log_inv_unchecked())
    }

    pub(crate) fn log_inv_unchecked(&self) -> Series<C> {
        let q = self.quasi_inverse_unchecked();
        let mut a = Feed::new(self);
        let mut qf = Feed::new(&q);
        Series::from_generator(move |n: usize, _: &[C]| {
            if n == 0 {
                return C::zero();
            }
            a.pull(n);
            qf.pull(n);
            // n L_n = Σ k f_k Q_{n-k}, from L' = f' / (1 - f)
            let mut acc = C::zero();
            for k in 1..=n {
                let fk = a.at(k);
                if !fk.is_zero() {
                    acc.add_product(&fk.scale(&int(k as i64)), qf.at(n - k));
                }
            }
            acc.scale_ratio(1, n as i64)
        })
    }

    /// `f^r` for rational `r` and `f_0 = 1`.
    pub fn pow(&self, r: &crate::scalar::Rational) -> Result<Series<C>, SeriesError> {
        if self.coeff(0) != C::one() {
            return Err(SeriesError::NotUnit {
                op: "rational power",
            });
        }
        Ok(self.pow_unchecked(r))
    }

    pub(crate) fn pow_unchecked(&self, r: &crate::scalar::Rational) -> Series<C> {
        let r = r.clone();
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, prev: &[C]| {
            if n == 0 {
                return C::one();
            }
            a.pull(n);
            // f h' = r f' h  =>  n h_n = Σ_{k=1}^{n} (r k - (n - k)) f_k h_{n-k}
            let mut acc = C::zero();
            for k in 1..=n {
                let fk = a.at(k);
                if fk.is_zero() {
                    continue;
                }
                let w = &r * int(k as i64) - int((n - k) as i64);
                acc.add_product(&fk.scale(&w), &prev[n - k]);
            }
            acc.scale_ratio(1, n as i64)
        })
    }

    /// Pólya exponential `exp(Σ_{k≥1} f(z^k)/k)`; on bivariate series the
    /// marking variable is substituted `u -> u^k` alongside `z -> z^k`.
    pub fn polya_set(&self) -> Result<Series<C>, SeriesError> {
        self.require_zero_constant("Pólya set")?;
        Ok(self.polya_set_unchecked())
    }

    pub(crate) fn polya_set_unchecked(&self) -> Series<C> {
        let mut a = Feed::new(self);
        let inner = Series::from_generator(move |n: usize, _: &[C]| {
            if n == 0 {
                return C::zero();
            }
            a.pull(n);
            let mut acc = C::zero();
            for k in 1..=n {
                if n.is_multiple_of(k) {
                    let c = a.at(n / k);
                    if !c.is_zero() {
                        acc.add_assign(&c.pow_marker(k).scale_ratio(1, k as i64));
                    }
                }
            }
            acc
        });
        inner.exp_unchecked()
    }

    /// Pólya cycle construction `Σ_{k≥1} φ(k)/k · log(1/(1 - f(z^k)))`.
    pub fn polya_cycle(&self) -> Result<Series<C>, SeriesError> {
        self.require_zero_constant("Pólya cycle")?;
        Ok(self.polya_cycle_unchecked())
    }

    pub(crate) fn polya_cycle_unchecked(&self) -> Series<C> {
        let log = self.log_inv_unchecked();
        let mut l = Feed::new(&log);
        Series::from_generator(move |n: usize, _: &[C]| {
            if n == 0 {
                return C::zero();
            }
            l.pull(n);
            let mut acc = C::zero();
            for k in 1..=n {
                if n.is_multiple_of(k) {
                    let c = l.at(n / k);
                    if !c.is_zero() {
                        acc.add_assign(&c.pow_marker(k).scale_ratio(totient(k) as i64, k as i64));
                    }
                }
            }
            acc
        })
    }

    /// Formal composition `f(g(z))` for `g_0 = 0`.
    pub fn substitute(&self, g: &Series<C>) -> Result<Series<C>, SeriesError> {
        g.require_zero_constant("substitution")?;
        Ok(self.substitute_unchecked(g))
    }

    pub(crate) fn substitute_unchecked(&self, g: &Series<C>) -> Series<C> {
        let mut f = Feed::new(self);
        if let Some(poly) = g.as_polynomial() {
            let poly = poly.to_vec();
            let mut powers: Vec<Vec<C>> = Vec::new();
            let mut cap = 0usize;
            return Series::from_generator(move |n: usize, _: &[C]| {
                if n >= cap {
                    cap = (2 * cap).max(n + 1).max(16);
                    powers = dense_powers(&poly, cap);
                }
                f.pull(n);
                let mut acc = C::zero();
                for (k, pk) in powers.iter().enumerate().take(n + 1) {
                    acc.add_product(f.at(k), &pk[n]);
                }
                acc
            });
        }
        // General case: powers of g as lazy products.
        let g = g.clone();
        let mut powers: Vec<Feed<C>> = Vec::new();
        let mut last = Series::one();
        Series::from_generator(move |n: usize, _: &[C]| {
            while powers.len() <= n {
                powers.push(Feed::new(&last));
                last = last.mul(&g);
            }
            f.pull(n);
            let mut acc = C::zero();
            for (k, pk) in powers.iter_mut().enumerate().take(n + 1) {
                let fk = f.at(k);
                if fk.is_zero() {
                    continue;
                }
                pk.pull(n);
                acc.add_product(fk, pk.at(n));
            }
            acc
        })
    }

    /// `f(c·z)`: coefficient `n` is scaled by `c^n`.
    pub fn rescale(&self, c: &C) -> Series<C> {
        let c = c.clone();
        let mut a = Feed::new(self);
        let mut powers = vec![C::one()];
        Series::from_generator(move |n: usize, _: &[C]| {
            while powers.len() <= n {
                let next = powers[powers.len() - 1].mul(&c);
                powers.push(next);
            }
            a.pull(n);
            a.at(n).mul(&powers[n])
        })
    }

    /// `f(z^k)` with the marking variable substituted `u -> u^k`.
    pub fn dilate(&self, k: usize) -> Series<C> {
        assert!(k >= 1, "dilation factor must be positive");
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, _: &[C]| {
            if !n.is_multiple_of(k) {
                return C::zero();
            }
            a.pull(n / k);
            a.at(n / k).pow_marker(k)
        })
    }

    /// Formal derivative: `(f')_n = (n+1) f_{n+1}`.
    pub fn derivative(&self) -> Series<C> {
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, _: &[C]| {
            a.pull(n + 1);
            a.at(n + 1).scale(&int(n as i64 + 1))
        })
    }

    /// Integral with zero constant term: `(∫f)_n = f_{n-1}/n`.
    pub fn integral(&self) -> Series<C> {
        let mut a = Feed::new(self);
        Series::from_generator(move |n: usize, _: &[C]| {
            if n == 0 {
                return C::zero();
            }
            a.pull(n - 1);
            a.at(n - 1).scale_ratio(1, n as i64)
        })
    }

    /// Multiply by the rational function `num/den`, `den_0` a unit, using
    /// the linear recurrence of the quotient.
    pub fn mul_rational(&self, num: &[C], den: &[C]) -> Result<Series<C>, SeriesError> {
        let inv0 = den
            .first()
            .and_then(|d| d.inv())
            .ok_or(SeriesError::NotUnit {
                op: "rational multiplier",
            })?;
        let num = num.to_vec();
        let den = den.to_vec();
        let mut a = Feed::new(self);
        Ok(Series::from_generator(move |n: usize, prev: &[C]| {
            a.pull(n);
            let mut acc = C::zero();
            for (k, p) in num.iter().enumerate().take(n + 1) {
                acc.add_product(p, a.at(n - k));
            }
            for (k, q) in den.iter().enumerate().take(n + 1).skip(1) {
                acc = acc.sub(&q.mul(&prev[n - k]));
            }
            acc.mul(&inv0)
        }))
    }

    fn require_zero_constant(&self, op: &'static str) -> Result<(), SeriesError> {
        if self.coeff(0).is_zero() {
            Ok(())
        } else {
            Err(SeriesError::NonZeroConstant { op })
        }
    }
}

/// `p^k` truncated to indices `0..cap`, for `k = 0..cap`.
fn dense_powers<C: Coeff>(p: &[C], cap: usize) -> Vec<Vec<C>> {
    let mut out = Vec::with_capacity(cap);
    let mut cur = vec![C::zero(); cap];
    cur[0] = C::one();
    for _ in 0..cap {
        let mut next = vec![C::zero(); cap];
        for (i, c) in cur.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (j, q) in p.iter().enumerate() {
                if i + j >= cap {
                    break;
                }
                next[i + j].add_product(c, q);
            }
        }
        out.push(std::mem::replace(&mut cur, next));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};
    use crate::upoly::UPoly;

    type Q = Series<Rational>;

    fn fib(n: usize) -> Rational {
        let (mut a, mut b) = (1i64, 1i64);
        for _ in 0..n {
            (a, b) = (b, a + b);
        }
        int(a)
    }

    #[test]
    fn quasi_inverse_examples() {
        let ones = Q::z().quasi_inverse().unwrap();
        assert!((0..20).all(|n| ones.coeff(n) == int(1)));
        let pow2 = Q::monomial(int(2), 1).quasi_inverse().unwrap();
        assert_eq!(pow2.coeff(10), int(1024));
        let f = Q::polynomial(vec![int(0), int(1), int(1)])
            .quasi_inverse()
            .unwrap();
        for n in 0..30 {
            assert_eq!(f.coeff(n), fib(n));
        }
        assert_eq!(
            Q::one().quasi_inverse().unwrap_err(),
            SeriesError::NonZeroConstant {
                op: "quasi-inverse"
            }
        );
    }

    #[test]
    fn combine_examples() {
        let g = Q::sigma_scale(&ratio(1, 2), 0);
        let id = Q::geometric().hadamard(&g);
        assert!((0..15).all(|n| id.coeff(n) == g.coeff(n)));
        let sq = Q::geometric().mul(&Q::geometric());
        assert!((0..15).all(|n| sq.coeff(n) == int(n as i64 + 1)));
        assert_eq!(g.hadamard(&g).coeff(2), ratio(9, 64));
    }

    #[test]
    fn exp_and_log_examples() {
        let e = Q::z().exp().unwrap();
        let mut fact = int(1);
        for n in 0..15 {
            if n > 0 {
                fact *= int(n as i64);
            }
            assert_eq!(e.coeff(n), fact.recip());
        }
        let l = Q::z().log_inv().unwrap();
        assert!((1..20).all(|n| l.coeff(n) == ratio(1, n as i64)));
        // exp(½ log(1/(1-z)) - z/2 - z²/4) counts 2-regular graphs.
        let g = l
            .scale(&ratio(1, 2))
            .sub(&Q::polynomial(vec![int(0), ratio(1, 2), ratio(1, 4)]))
            .exp()
            .unwrap();
        assert_eq!(g.coeff(6), ratio(70, 720));
        // exp ∘ log-inv: exp(log(1/(1-f))) = 1/(1-f)
        let f = Q::z().scale(&ratio(1, 2));
        let lhs = f.log_inv().unwrap().exp().unwrap();
        let rhs = f.quasi_inverse().unwrap();
        assert!((0..20).all(|n| lhs.coeff(n) == rhs.coeff(n)));
    }

    #[test]
    fn polya_examples() {
        let mset = Q::z().polya_set().unwrap();
        assert!((0..20).all(|n| mset.coeff(n) == int(1)));
        let necklaces = Q::z().polya_cycle().unwrap();
        assert!((1..30).all(|n| necklaces.coeff(n) == int(1)));
        // Binary necklaces: 2, 3, 4, 6, 8, 14.
        let binary = Q::monomial(int(2), 1).polya_cycle().unwrap();
        let expect = [2, 3, 4, 6, 8, 14];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(binary.coeff(n + 1), int(*e));
        }
    }

    #[test]
    fn polya_marks_components_on_bivariate_series() {
        // MSET(u·Z): exactly one multiset of each size, with n components.
        let uz = Series::<UPoly>::monomial(UPoly::u(), 1);
        let m = uz.polya_set().unwrap();
        for n in 0..8 {
            assert_eq!(m.coeff(n), UPoly::monomial(int(1), n));
        }
    }

    #[test]
    fn substitution_examples() {
        let f = Q::sigma_scale(&ratio(1, 2), 0);
        let same = f.substitute(&Q::z()).unwrap();
        assert!((0..20).all(|n| same.coeff(n) == f.coeff(n)));
        let fibs = Q::geometric()
            .substitute(&Q::polynomial(vec![int(0), int(1), int(1)]))
            .unwrap();
        assert!((0..30).all(|n| fibs.coeff(n) == fib(n)));
        // Lazy (non-polynomial) inner series takes the general path.
        let inner = Q::z().mul(&Q::geometric()); // z/(1-z)
        let comp = Q::geometric().substitute(&inner).unwrap(); // (1-z)/(1-2z)
        assert_eq!(comp.coeff(0), int(1));
        assert!((1..20).all(|n| comp.coeff(n) == int(1 << (n - 1))));
        assert!(Q::z().substitute(&Q::one()).is_err());
    }

    #[test]
    fn calculus_examples() {
        let d = Q::geometric().derivative();
        assert!((0..20).all(|n| d.coeff(n) == int(n as i64 + 1)));
        let i = Q::geometric().integral();
        let l = Q::z().log_inv().unwrap();
        assert!((0..20).all(|n| i.coeff(n) == l.coeff(n)));
        let f = Q::sigma_scale(&ratio(3, 2), 1);
        let round = f.integral().derivative();
        assert!((0..20).all(|n| round.coeff(n) == f.coeff(n)));
    }

    #[test]
    fn rational_multiplier_and_power() {
        // (1+z)/(1-z-z^2)
        let s = Q::one()
            .mul_rational(&[int(1), int(1)], &[int(1), int(-1), int(-1)])
            .unwrap();
        assert!((0..20).all(|n| s.coeff(n) == fib(n + 1)));
        let p = Q::polynomial(vec![int(1), int(-1)])
            .pow(&ratio(-1, 2))
            .unwrap();
        let direct = Q::sigma_scale(&ratio(1, 2), 0);
        assert!((0..20).all(|n| p.coeff(n) == direct.coeff(n)));
        assert!(Q::z().pow(&ratio(1, 2)).is_err());
    }

    #[test]
    fn inverse_and_division() {
        let g = Q::polynomial(vec![int(2), int(1)]);
        let inv = g.inverse().unwrap();
        let prod = inv.mul(&g);
        assert_eq!(prod.coeff(0), int(1));
        assert!((1..15).all(|n| prod.coeff(n) == int(0)));
        assert!(Q::z().inverse().is_err());
    }

    #[test]
    fn totients() {
        let phi: Vec<usize> = (1..=10).map(totient).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
    }
}
