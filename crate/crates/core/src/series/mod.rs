//! Lazily evaluated formal power series.
//!
//! A [`Series`] is a shared handle on a memo table plus a coefficient
//! generator. Coefficients are produced strictly in index order and never
//! change once stored. Operators build new series whose generators pull
//! coefficients from their operands on demand, so a caller pays only for
//! the truncation order it actually requests.
//!
//! Recursive definitions (fixed points, specification systems) tie the knot
//! through [`fixpoint`]: the recursive reference reads the solution's memo
//! and sees zero for the coefficient currently being computed. That is sound
//! exactly when the defining equation is well founded, which the callers
//! check.

mod bivariate;
pub mod dense;
pub mod fixpoint;
pub mod linear;
pub mod numeric;
mod ops;
pub mod table;

use std::cell::Cell;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use thiserror::Error;

use crate::scalar::{Coeff, Rational};

pub use bivariate::bivariate_distribution;
pub use fixpoint::{solve_fixed_point, solve_system, PolyEquation, SolveMethod};
pub use linear::{linear_operator_solve, LinearOp};
pub use numeric::{cauchy_extract, polylog};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("{op} requires a zero constant term")]
    NonZeroConstant { op: &'static str },
    #[error("{op} requires an invertible constant term")]
    NotUnit { op: &'static str },
    #[error("fixed-point iteration does not contract: residual nonzero at index {index}")]
    NonContraction { index: usize },
    #[error("operator is not valuation-increasing on z^{degree}")]
    NotValuationIncreasing { degree: usize },
    #[error("zero total mass at size {n}")]
    ZeroMass { n: usize },
    #[error("negative mass at size {n}")]
    NegativeMass { n: usize },
    #[error("coefficient table: {0}")]
    Table(String),
}

/// Produces coefficient `n` given the coefficients `0..n` already stored.
pub trait Generator<C>: Send {
    fn next(&mut self, n: usize, prev: &[C]) -> C;
}

impl<C, F> Generator<C> for F
where
    F: FnMut(usize, &[C]) -> C + Send,
{
    fn next(&mut self, n: usize, prev: &[C]) -> C {
        self(n, prev)
    }
}

thread_local! {
    /// Counts reads of knot coefficients that are not solved yet. A lazy
    /// coefficient computed while this counter moved is provisional and is
    /// returned without being memoized.
    static PROVISIONAL_READS: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn provisional_reads() -> u64 {
    PROVISIONAL_READS.with(Cell::get)
}

pub(crate) fn restore_provisional_reads(v: u64) {
    PROVISIONAL_READS.with(|c| c.set(v));
}

fn note_provisional_read() {
    PROVISIONAL_READS.with(|c| c.set(c.get() + 1));
}

struct Node<C> {
    memo: Vec<C>,
    gen: Box<dyn Generator<C>>,
}

#[derive(Clone)]
enum Repr<C> {
    Lazy(Arc<Mutex<Node<C>>>),
    /// Read-only view of a fixed point under construction.
    Knot(Arc<Mutex<Vec<C>>>),
}

/// Lazily evaluated power series with coefficients in `C`.
///
/// Cloning is cheap and shares the memo table. A value may be moved
/// between threads; callers serialize coefficient requests on one series.
#[derive(Clone)]
pub struct Series<C: Coeff> {
    repr: Repr<C>,
    /// Set when the series is known to be a polynomial; enables fast paths.
    finite: Option<Arc<Vec<C>>>,
}

impl<C: Coeff> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let known = match &self.repr {
            Repr::Lazy(node) => node.lock().expect("series lock").memo.clone(),
            Repr::Knot(cell) => cell.lock().expect("knot lock").clone(),
        };
        f.debug_struct("Series").field("known", &known).finish()
    }
}

impl<C: Coeff> Series<C> {
    /// Series driven by an arbitrary generator.
    pub fn from_generator(gen: impl Generator<C> + 'static) -> Self {
        Series {
            repr: Repr::Lazy(Arc::new(Mutex::new(Node {
                memo: Vec::new(),
                gen: Box::new(gen),
            }))),
            finite: None,
        }
    }

    /// Series whose nth coefficient is `f(n)`.
    pub fn from_fn(mut f: impl FnMut(usize) -> C + Send + 'static) -> Self {
        Self::from_generator(move |n: usize, _: &[C]| f(n))
    }

    /// Polynomial (finite table) with the given coefficients.
    pub fn polynomial(coeffs: Vec<C>) -> Self {
        let shared = Arc::new(coeffs);
        let table = shared.clone();
        let mut s = Self::from_fn(move |n| table.get(n).cloned().unwrap_or_else(C::zero));
        s.finite = Some(shared);
        s
    }

    pub fn zero() -> Self {
        Self::polynomial(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::polynomial(vec![c])
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: C, k: usize) -> Self {
        let mut v = vec![C::zero(); k + 1];
        v[k] = c;
        Self::polynomial(v)
    }

    /// The variable `z`.
    pub fn z() -> Self {
        Self::monomial(C::one(), 1)
    }

    /// `1/(1 - z)`.
    pub fn geometric() -> Self {
        Self::from_fn(|_| C::one())
    }

    pub(crate) fn knot(cell: Arc<Mutex<Vec<C>>>) -> Self {
        Series {
            repr: Repr::Knot(cell),
            finite: None,
        }
    }

    /// Polynomial coefficients when the series is known to be finite.
    pub fn as_polynomial(&self) -> Option<&[C]> {
        self.finite.as_deref().map(|v| v.as_slice())
    }

    /// Exact coefficient `[z^n]`.
    pub fn coeff(&self, n: usize) -> C {
        match &self.repr {
            Repr::Lazy(node) => {
                let mut guard = node.lock().expect("series lock poisoned");
                let node = &mut *guard;
                while node.memo.len() <= n {
                    let k = node.memo.len();
                    let before = provisional_reads();
                    let c = node.gen.next(k, &node.memo);
                    if provisional_reads() != before {
                        return if k == n { c } else { C::zero() };
                    }
                    node.memo.push(c);
                }
                node.memo[n].clone()
            }
            Repr::Knot(cell) => match cell.lock().expect("knot lock poisoned").get(n) {
                Some(c) => c.clone(),
                None => {
                    note_provisional_read();
                    C::zero()
                }
            },
        }
    }

    /// Coefficients `0..=order`.
    pub fn coeffs(&self, order: usize) -> Vec<C> {
        if let Repr::Lazy(node) = &self.repr {
            self.coeff(order);
            let guard = node.lock().expect("series lock poisoned");
            if guard.memo.len() > order {
                return guard.memo[..=order].to_vec();
            }
        }
        (0..=order).map(|n| self.coeff(n)).collect()
    }

    /// Number of coefficients currently memoized.
    pub fn computed(&self) -> usize {
        match &self.repr {
            Repr::Lazy(node) => node.lock().expect("series lock poisoned").memo.len(),
            Repr::Knot(cell) => cell.lock().expect("knot lock poisoned").len(),
        }
    }

    /// Index of the first nonzero coefficient up to `order`, or `None` if
    /// all of `0..=order` vanish.
    pub fn valuation(&self, order: usize) -> Option<usize> {
        (0..=order).find(|&n| !self.coeff(n).is_zero())
    }

    /// Truncated copy as an explicit polynomial.
    pub fn truncate(&self, order: usize) -> Series<C> {
        Series::polynomial(self.coeffs(order))
    }

    /// Value of the truncated series at a numeric point (plain-number
    /// coefficients only).
    pub fn eval_f64(&self, x: f64, order: usize) -> f64 {
        self.coeffs(order)
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

impl Series<Rational> {
    /// `(1-z)^{-alpha} · log(1/(1-z))^beta`, the basic singular scale,
    /// computed exactly through its differential recurrence
    /// `(1-z) g_b' = alpha g_b + b g_{b-1}`.
    pub fn sigma_scale(alpha: &Rational, beta: usize) -> Self {
        let alpha = alpha.clone();
        // levels[b] holds the coefficients of (1-z)^{-alpha} L^b so far.
        let mut levels: Vec<Vec<Rational>> = vec![Vec::new(); beta + 1];
        Series::from_fn(move |n| {
            for b in 0..=beta {
                let next = if n == 0 {
                    if b == 0 {
                        <Rational as One>::one()
                    } else {
                        <Rational as Zero>::zero()
                    }
                } else {
                    let m = n - 1;
                    let nm = Rational::from_integer((m as i64).into());
                    let mut acc = (&nm + &alpha) * &levels[b][m];
                    if b > 0 {
                        acc += Rational::from_integer((b as i64).into()) * &levels[b - 1][m];
                    }
                    acc / Rational::from_integer((n as i64).into())
                };
                levels[b].push(next);
            }
            levels[beta][n].clone()
        })
    }
}

/// Pull-through buffer of operand coefficients. Only final coefficients are
/// cached; provisional ones (those depending on a knot read ahead of its
/// solution) are recomputed on every pull.
pub(crate) struct Feed<C: Coeff> {
    src: Series<C>,
    buf: Vec<C>,
    tail: Vec<C>,
    zero: C,
}

impl<C: Coeff> Feed<C> {
    pub(crate) fn new(src: &Series<C>) -> Self {
        Feed {
            src: src.clone(),
            buf: Vec::new(),
            tail: Vec::new(),
            zero: C::zero(),
        }
    }

    pub(crate) fn pull(&mut self, n: usize) {
        self.tail.clear();
        while self.buf.len() <= n {
            let before = provisional_reads();
            let c = self.src.coeff(self.buf.len());
            if provisional_reads() != before {
                self.tail.push(c);
                break;
            }
            self.buf.push(c);
        }
        for k in self.buf.len() + self.tail.len()..=n {
            self.tail.push(self.src.coeff(k));
        }
    }

    pub(crate) fn at(&self, k: usize) -> &C {
        match k.checked_sub(self.buf.len()) {
            None => &self.buf[k],
            Some(j) => self.tail.get(j).unwrap_or(&self.zero),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn memo_is_stable_and_monotone() {
        let s = Series::<Rational>::from_fn(|n| int(n as i64 * 3));
        assert_eq!(s.coeff(5), int(15));
        assert_eq!(s.computed(), 6);
        assert_eq!(s.coeff(2), int(6));
        assert_eq!(s.computed(), 6);
        assert_eq!(s.coeffs(3), vec![int(0), int(3), int(6), int(9)]);
    }

    #[test]
    fn inverse_square_root_coefficients() {
        let s = Series::sigma_scale(&ratio(1, 2), 0);
        assert_eq!(s.coeff(4), ratio(35, 128));
        assert_eq!(Series::<Rational>::geometric().coeff(10), int(1));
    }

    #[test]
    fn sigma_scale_with_log_matches_product() {
        let direct = Series::sigma_scale(&int(2), 1);
        let product = Series::sigma_scale(&int(2), 0).mul(&Series::sigma_scale(&int(0), 1));
        for n in 0..30 {
            assert_eq!(direct.coeff(n), product.coeff(n));
        }
    }

    #[test]
    fn valuation_reports_first_nonzero() {
        let s = Series::<Rational>::monomial(int(4), 3);
        assert_eq!(s.valuation(10), Some(3));
        assert_eq!(Series::<Rational>::zero().valuation(10), None);
    }
}
