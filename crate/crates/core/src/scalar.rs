//! Coefficient rings for formal power series.
//!
//! Every series operation is written against [`Coeff`], so the same code
//! drives exact rational series, floating-point series (polylogarithms,
//! numerics) and bivariate series whose coefficients are polynomials in the
//! marking variable `u`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

/// Build `num/den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Convert an exact rational to `f64`, keeping precision when numerator and
/// denominator individually overflow.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if Zero::is_zero(q) {
        return 0.0;
    }
    let (m, e) = rational_log2_parts(q);
    m * (e as f64).exp2()
}

/// Natural logarithm of `|q|` for a nonzero rational of any size.
pub fn rational_ln_abs(q: &Rational) -> f64 {
    let (m, e) = rational_log2_parts(q);
    m.abs().ln() + e as f64 * std::f64::consts::LN_2
}

/// `q = m · 2^e` with `0.5 <= |m| < 2`.
fn rational_log2_parts(q: &Rational) -> (f64, i64) {
    let (mn, en) = bigint_log2_parts(q.numer());
    let (md, ed) = bigint_log2_parts(q.denom());
    (mn / md, en - ed)
}

fn bigint_log2_parts(n: &BigInt) -> (f64, i64) {
    let bits = n.bits() as i64;
    if bits <= 1000 {
        return (n.to_f64().unwrap_or(f64::NAN), 0);
    }
    let shift = bits - 64;
    let top: BigInt = n >> (shift as usize);
    (top.to_f64().unwrap_or(f64::NAN), shift)
}

/// A commutative ring of series coefficients.
///
/// Division is partial: [`Coeff::inv`] returns `None` for non-units.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Embed an exact rational.
    fn from_rational(q: &Rational) -> Self;
    /// Multiplicative inverse when it exists in the ring.
    fn inv(&self) -> Option<Self>;
    /// Floating value, when the coefficient is a plain number.
    fn to_f64(&self) -> Option<f64>;

    /// Substitute `u -> u^k` in the marking variable; identity for plain
    /// numbers. Needed by the Pólya operators on bivariate series.
    fn pow_marker(&self, _k: usize) -> Self {
        self.clone()
    }

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&int(n))
    }

    fn scale(&self, q: &Rational) -> Self {
        self.mul(&Self::from_rational(q))
    }

    fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&ratio(num, den))
    }

    fn add_assign(&mut self, other: &Self) {
        *self = self.add(other);
    }

    /// `self += a * b`, the inner loop of every convolution.
    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        self.add_assign(&a.mul(b));
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn to_f64(&self) -> Option<f64> {
        Some(rational_to_f64(self))
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if Zero::is_zero(a) || Zero::is_zero(b) {
            return;
        }
        // Integer fast path: most combinatorial counts have denominator 1.
        if a.is_integer() && b.is_integer() && self.is_integer() {
            *self = Rational::from_integer(self.numer() + a.numer() * b.numer());
        } else {
            *self += a * b;
        }
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(q: &Rational) -> Self {
        rational_to_f64(q)
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn to_f64(&self) -> Option<f64> {
        Some(*self)
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_rationals_convert_without_overflow() {
        let big = Rational::from_integer(BigInt::from(3).pow(2000u32));
        let ln = rational_ln_abs(&big);
        assert!((ln - 2000.0 * 3f64.ln()).abs() < 1e-9);
        let q = Rational::new(BigInt::from(3).pow(700u32), BigInt::from(2).pow(1100u32));
        let expect = 700.0 * 3f64.log2() - 1100.0;
        assert!((rational_to_f64(&q).log2() - expect).abs() < 1e-9);
    }

    #[test]
    fn ring_ops_agree_between_rational_and_float() {
        let a = ratio(3, 7);
        let b = ratio(-5, 11);
        let exact = Coeff::mul(&a, &b).add(&a);
        let float = Coeff::mul(&(3.0f64 / 7.0), &(-5.0 / 11.0)) + 3.0 / 7.0;
        assert!((rational_to_f64(&exact) - float).abs() < 1e-15);
        assert_eq!(Coeff::inv(&int(0)), None);
    }
}
