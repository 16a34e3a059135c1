//! Recursive series: fixed points of well-founded equations.
//!
//! The solution's coefficients are stored in a shared cell (the knot). The
//! right-hand side is built once against a read-only view of that cell and
//! evaluated index by index; coefficient `n` of the right-hand side must not
//! depend on coefficient `n` of the solution, which is what "gains one order
//! of agreement per iteration from the zero series" means operationally.

use std::sync::{Arc, Mutex};

use super::dense;
use super::{provisional_reads, restore_provisional_reads, Series, SeriesError};
use crate::scalar::Coeff;

type Cell<C> = Arc<Mutex<Vec<C>>>;

struct SystemState<C: Coeff> {
    knots: Vec<Cell<C>>,
    bodies: Vec<Series<C>>,
    eval_order: Vec<usize>,
    done: usize,
}

impl<C: Coeff> SystemState<C> {
    fn advance(&mut self, n: usize) {
        while self.done <= n {
            let m = self.done;
            for &i in &self.eval_order {
                let known = self.knots[i].lock().expect("knot lock").len();
                if m < known {
                    continue; // seeded
                }
                // Reads of index m of later unknowns are provisional by
                // design; the value itself is final.
                let before = provisional_reads();
                let v = self.bodies[i].coeff(m);
                restore_provisional_reads(before);
                self.knots[i].lock().expect("knot lock").push(v);
            }
            self.done += 1;
        }
    }
}

/// Solve a system `y_i = Φ_i(y_1, …, y_k)` lazily.
///
/// `seeds[i]` are known leading coefficients of `y_i` (may be empty);
/// `eval_order` lists the unknowns so that every same-index dependency
/// points backwards; `build` receives read-only views of the unknowns and
/// returns the right-hand sides.
pub fn solve_system<C: Coeff>(
    seeds: Vec<Vec<C>>,
    eval_order: Vec<usize>,
    build: impl FnOnce(&[Series<C>]) -> Vec<Series<C>>,
) -> Vec<Series<C>> {
    let knots: Vec<Cell<C>> = seeds.into_iter().map(|s| Arc::new(Mutex::new(s))).collect();
    let views: Vec<Series<C>> = knots.iter().map(|k| Series::knot(k.clone())).collect();
    let bodies = build(&views);
    assert_eq!(bodies.len(), knots.len(), "one right-hand side per unknown");
    let state = Arc::new(Mutex::new(SystemState {
        knots: knots.clone(),
        bodies,
        eval_order,
        done: 0,
    }));
    (0..knots.len())
        .map(|i| {
            let state = state.clone();
            let cell = knots[i].clone();
            Series::from_fn(move |n| {
                state.lock().expect("system lock").advance(n);
                let v = cell.lock().expect("knot lock")[n].clone();
                v
            })
        })
        .collect()
}

/// Fixed point `y = Φ(y)`, verified to `order`: the defining equation's
/// residual is checked to vanish exactly on `0..=order`.
///
/// `seed` supplies leading coefficients that plain iteration from zero
/// cannot reach (a nonzero constant term of a non-contracting constant
/// part); it is validated by the same residual check.
pub fn solve_fixed_point<C: Coeff>(
    seed: Vec<C>,
    order: usize,
    phi: impl Fn(&Series<C>) -> Series<C>,
) -> Result<Series<C>, SeriesError> {
    let sol = solve_system(vec![seed], vec![0], |v| vec![phi(&v[0])])
        .pop()
        .expect("one unknown");
    check_residual(&sol, order, &phi)?;
    Ok(sol)
}

/// Exact check that `y - Φ(y)` vanishes on `0..=order`.
pub fn check_residual<C: Coeff>(
    y: &Series<C>,
    order: usize,
    phi: impl Fn(&Series<C>) -> Series<C>,
) -> Result<(), SeriesError> {
    let trunc = y.truncate(order);
    let image = phi(&trunc);
    for n in 0..=order {
        if image.coeff(n) != trunc.coeff(n) {
            return Err(SeriesError::NonContraction { index: n });
        }
    }
    Ok(())
}

/// How to solve a polynomial equation for a power series root.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Chord iteration `y <- y - P(y)/P_y(0, y_0)`, one order per step,
    /// evaluated lazily. The reference implementation.
    Plain,
    /// Newton iteration on truncated polynomials, doubling the number of
    /// correct coefficients per step.
    Newton,
}

/// Polynomial equation `Σ_j a_j(z) y^j = 0` in the unknown series `y`.
#[derive(Clone)]
pub struct PolyEquation<C: Coeff> {
    pub coeffs: Vec<Series<C>>,
}

impl<C: Coeff> PolyEquation<C> {
    pub fn new(coeffs: Vec<Series<C>>) -> Self {
        PolyEquation { coeffs }
    }

    /// `P(y)` as a series (Horner scheme).
    pub fn eval(&self, y: &Series<C>) -> Series<C> {
        let mut acc = Series::zero();
        for a in self.coeffs.iter().rev() {
            acc = acc.mul(y).add(a);
        }
        acc
    }

    /// `∂P/∂y` as an equation of one lower degree.
    pub fn derivative(&self) -> PolyEquation<C> {
        PolyEquation {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a.scale(&C::from_i64(j as i64)))
                .collect(),
        }
    }

    /// `P_y(0, y0)`.
    fn slope_at_origin(&self, y0: &C) -> C {
        let d = self.derivative();
        let mut acc = C::zero();
        for a in d.coeffs.iter().rev() {
            acc = acc.mul(y0).add(&a.coeff(0));
        }
        acc
    }

    /// Power series root with `y(0) = y0`, verified to `order`.
    pub fn solve(
        &self,
        y0: C,
        order: usize,
        method: SolveMethod,
    ) -> Result<Series<C>, SeriesError> {
        let slope_inv = self
            .slope_at_origin(&y0)
            .inv()
            .ok_or(SeriesError::NotUnit {
                op: "implicit solve",
            })?;
        match method {
            SolveMethod::Plain => {
                let eq = self.clone();
                solve_fixed_point(vec![y0], order, move |y| {
                    y.sub(&eq.eval(y).scale(&slope_inv))
                })
            }
            SolveMethod::Newton => {
                let coeffs = self.newton(y0, order)?;
                let sol = Series::polynomial(coeffs);
                let residual = self.eval(&sol);
                if let Some(n) = (0..=order).find(|&n| !residual.coeff(n).is_zero()) {
                    return Err(SeriesError::NonContraction { index: n });
                }
                Ok(sol)
            }
        }
    }

    fn newton(&self, y0: C, order: usize) -> Result<Vec<C>, SeriesError> {
        let len = order + 1;
        let a: Vec<Vec<C>> = self.coeffs.iter().map(|s| s.coeffs(order)).collect();
        let da: Vec<Vec<C>> = self
            .derivative()
            .coeffs
            .iter()
            .map(|s| s.coeffs(order))
            .collect();
        let mut y = vec![y0];
        let mut prec = 1usize;
        while prec < len {
            prec = (2 * prec).min(len);
            y.resize(prec, C::zero());
            let p = dense::horner(&a, &y, prec);
            let dp = dense::horner(&da, &y, prec);
            let inv =
                dense::inverse(&dp, prec).ok_or(SeriesError::NotUnit { op: "Newton step" })?;
            let step = dense::mul(&p, &inv, prec);
            for (yi, si) in y.iter_mut().zip(&step) {
                *yi = yi.sub(si);
            }
        }
        y.truncate(len);
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    type Q = Series<Rational>;

    fn catalan(n: u64) -> Rational {
        // C_n = binom(2n, n)/(n+1)
        let mut c = num_bigint::BigInt::from(1);
        for k in 0..n {
            c = c * (2 * (2 * k + 1)) / (k + 2);
        }
        Rational::from_integer(c)
    }

    #[test]
    fn catalan_fixed_point_and_residual() {
        let y = solve_fixed_point(vec![], 40, |y| Q::z().add(&y.mul(y))).unwrap();
        assert_eq!(y.coeff(4), int(5));
        for n in 1..40 {
            assert_eq!(y.coeff(n), catalan(n as u64 - 1));
        }
    }

    #[test]
    fn intermediate_nodes_do_not_memoize_provisional_values() {
        // Plane trees T = z / (1 - T): the quasi-inverse depends on T_n at
        // index n, so its memo must wait for the solution.
        let t =
            solve_fixed_point(vec![], 30, |t| Q::z().mul(&t.quasi_inverse_unchecked())).unwrap();
        for n in 1..30 {
            assert_eq!(t.coeff(n), catalan(n as u64 - 1));
        }
    }

    #[test]
    fn degenerate_recursion_is_rejected() {
        // y = 1 + y has no formal solution.
        let err = solve_fixed_point(vec![], 5, |y| Q::one().add(y)).unwrap_err();
        assert_eq!(err, SeriesError::NonContraction { index: 0 });
    }

    #[test]
    fn two_three_trees_by_substitution() {
        let tau = Q::polynomial(vec![int(0), int(0), int(1), int(1)]);
        let t =
            solve_fixed_point(vec![], 30, |t| Q::z().add(&t.substitute_unchecked(&tau))).unwrap();
        let expect = [0, 1, 1, 1, 1, 2, 2, 3, 4, 5, 8, 14, 23];
        for (n, e) in expect.iter().enumerate() {
            assert_eq!(t.coeff(n), int(*e));
        }
    }

    #[test]
    fn newton_matches_plain_iteration() {
        // y = z + y^2  <=>  z - y + y^2 = 0
        let eq = PolyEquation::new(vec![Q::z(), Q::constant(int(-1)), Q::one()]);
        let plain = eq.solve(int(0), 200, SolveMethod::Plain).unwrap();
        let newton = eq.solve(int(0), 200, SolveMethod::Newton).unwrap();
        for n in 0..=200 {
            assert_eq!(plain.coeff(n), newton.coeff(n));
        }
    }

    #[test]
    fn mutual_recursion_respects_evaluation_order() {
        // A = Z + B, B = Z*A  =>  A = z/(1-z)... with B lagging one step.
        let sols = solve_system(vec![vec![], vec![]], vec![1, 0], |v| {
            vec![Q::z().add(&v[1]), Q::z().mul(&v[0])]
        });
        for n in 1..20 {
            assert_eq!(sols[0].coeff(n), int(1));
            assert_eq!(sols[1].coeff(n + 1), int(1));
        }
    }
}
