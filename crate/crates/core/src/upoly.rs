//! Polynomials in the marking variable `u` with exact rational coefficients.

use std::fmt;

use num_traits::Zero;

use crate::scalar::{rational_to_f64, Coeff, Rational};

/// Dense polynomial `Σ c_k u^k`; the coefficient vector never has trailing
/// zeros, so structural equality is polynomial equality.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::new(vec![c])
    }

    /// The monomial `c·u^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![<Rational as Zero>::zero(); k + 1];
        v[k] = c;
        UPoly::new(v)
    }

    /// The marking variable itself.
    pub fn u() -> Self {
        UPoly::monomial(Rational::from_integer(1.into()), 1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `u^k` (zero past the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(<Rational as Zero>::zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, u: &Rational) -> Rational {
        let mut acc = <Rational as Zero>::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * u + rational_to_f64(c))
    }

    /// Formal derivative in `u`.
    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})u")?,
                _ => write!(f, "({c})u^{k}")?,
            }
        }
        Ok(())
    }
}

impl Coeff for UPoly {
    fn zero() -> Self {
        UPoly::default()
    }
    fn one() -> Self {
        UPoly::constant(Rational::from_integer(1.into()))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }
    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::default();
        }
        let mut out = vec![<Rational as Zero>::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j].add_product(a, b);
            }
        }
        UPoly::new(out)
    }
    fn neg(&self) -> Self {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn from_rational(q: &Rational) -> Self {
        UPoly::constant(q.clone())
    }
    fn inv(&self) -> Option<Self> {
        match self.coeffs.as_slice() {
            [c] => Some(UPoly::constant(c.recip())),
            _ => None,
        }
    }
    fn to_f64(&self) -> Option<f64> {
        match self.coeffs.as_slice() {
            [] => Some(0.0),
            [c] => Some(rational_to_f64(c)),
            _ => None,
        }
    }
    fn pow_marker(&self, k: usize) -> Self {
        if k == 1 || self.coeffs.len() <= 1 {
            return self.clone();
        }
        let mut out = vec![<Rational as Zero>::zero(); (self.coeffs.len() - 1) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * k] = c.clone();
        }
        UPoly::new(out)
    }
    fn add_assign(&mut self, other: &Self) {
        if other.coeffs.len() > self.coeffs.len() {
            self.coeffs
                .resize(other.coeffs.len(), <Rational as Zero>::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }
    fn scale(&self, q: &Rational) -> Self {
        UPoly::new(self.coeffs.iter().map(|c| c * q).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn arithmetic_and_marker_substitution() {
        let p = UPoly::new(vec![int(1), int(2)]); // 1 + 2u
        let sq = p.mul(&p);
        assert_eq!(sq, UPoly::new(vec![int(1), int(4), int(4)]));
        assert_eq!(
            p.pow_marker(3),
            UPoly::new(vec![int(1), int(0), int(0), int(2)])
        );
        assert_eq!(sq.eval(&ratio(1, 2)), int(4));
        assert!(p.sub(&p).is_zero());
        assert_eq!(sq.derivative(), UPoly::new(vec![int(4), int(8)]));
        assert_eq!(p.inv(), None);
        assert_eq!(
            UPoly::constant(int(4)).inv(),
            Some(UPoly::constant(ratio(1, 4)))
        );
    }
}
