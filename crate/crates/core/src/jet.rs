//! Second-order jets at `u = 1`: `c0 + c1 ε + c2 ε²` with `u = 1 + ε` and
//! `ε³ = 0`. A series over jets carries `f(z, 1)`, `∂_u f(z, 1)` and
//! `∂_u² f(z, 1) / 2`, which is all the first two moments need.

use num_traits::Zero;

use crate::scalar::{int, Coeff, Rational};

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Jet {
    pub c0: Rational,
    pub c1: Rational,
    pub c2: Rational,
}

impl Jet {
    pub fn new(c0: Rational, c1: Rational, c2: Rational) -> Self {
        Jet { c0, c1, c2 }
    }

    fn is_integral(&self) -> bool {
        self.c0.is_integer() && self.c1.is_integer() && self.c2.is_integer()
    }

    /// The marking variable `u = 1 + ε`.
    pub fn u() -> Self {
        Jet::new(int(1), int(1), int(0))
    }

    /// Mean and variance of the parameter whose probability generating
    /// function, up to normalization, has this jet.
    pub fn moments(&self) -> Option<(Rational, Rational)> {
        if Zero::is_zero(&self.c0) {
            return None;
        }
        let mean = &self.c1 / &self.c0;
        let factorial2 = &self.c2 * int(2) / &self.c0;
        let var = factorial2 + &mean - &mean * &mean;
        Some((mean, var))
    }
}

impl Coeff for Jet {
    fn zero() -> Self {
        Jet::default()
    }
    fn one() -> Self {
        Jet::new(int(1), int(0), int(0))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.c0) && Zero::is_zero(&self.c1) && Zero::is_zero(&self.c2)
    }
    fn add(&self, o: &Self) -> Self {
        Jet::new(&self.c0 + &o.c0, &self.c1 + &o.c1, &self.c2 + &o.c2)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::new(&self.c0 - &o.c0, &self.c1 - &o.c1, &self.c2 - &o.c2)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::new(
            &self.c0 * &o.c0,
            &self.c0 * &o.c1 + &self.c1 * &o.c0,
            &self.c0 * &o.c2 + &self.c1 * &o.c1 + &self.c2 * &o.c0,
        )
    }
    fn neg(&self) -> Self {
        Jet::new(-&self.c0, -&self.c1, -&self.c2)
    }
    fn from_rational(q: &Rational) -> Self {
        Jet::new(q.clone(), int(0), int(0))
    }
    fn inv(&self) -> Option<Self> {
        if Zero::is_zero(&self.c0) {
            return None;
        }
        let a = self.c0.recip();
        let a2 = &a * &a;
        let c1 = -(&self.c1 * &a2);
        let c2 = &self.c1 * &self.c1 * &a2 * &a - &self.c2 * &a2;
        Some(Jet::new(a, c1, c2))
    }
    fn to_f64(&self) -> Option<f64> {
        None
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_integral() && b.is_integral() && self.is_integral() {
            let (a0, a1, a2) = (a.c0.numer(), a.c1.numer(), a.c2.numer());
            let (b0, b1, b2) = (b.c0.numer(), b.c1.numer(), b.c2.numer());
            self.c0 = Rational::from_integer(self.c0.numer() + a0 * b0);
            self.c1 = Rational::from_integer(self.c1.numer() + a0 * b1 + a1 * b0);
            self.c2 = Rational::from_integer(self.c2.numer() + a0 * b2 + a1 * b1 + a2 * b0);
        } else {
            self.add_assign(&a.mul(b));
        }
    }
    /// `u -> u^k`: `1 + ε` becomes `1 + kε + C(k,2)ε²`.
    fn pow_marker(&self, k: usize) -> Self {
        let k = int(k as i64);
        let pairs = &k * (&k - int(1)) / int(2);
        Jet::new(
            self.c0.clone(),
            &self.c1 * &k,
            &self.c1 * pairs + &self.c2 * &k * &k,
        )
    }
    fn scale(&self, q: &Rational) -> Self {
        Jet::new(&self.c0 * q, &self.c1 * q, &self.c2 * q)
    }
}
