//! Linear operators built from primitives and the solver for
//! `f = t + L[f]` (divide-and-conquer recurrences).

use super::{solve_system, Series, SeriesError};
use crate::scalar::{int, Coeff};

/// A linear operator on series, assembled from primitives whose effect on
/// the valuation is mechanical.
#[derive(Clone, Debug)]
pub enum LinearOp<C: Coeff> {
    Scalar(C),
    /// `f ↦ ∫_0^z f`.
    Integrate,
    /// `f ↦ f · num/den` with `den(0)` a unit.
    MulRational {
        num: Vec<C>,
        den: Vec<C>,
    },
    /// `f(z) ↦ f(c z)`.
    ScaleArg(C),
    /// Apply the operators in sequence, first element first.
    Compose(Vec<LinearOp<C>>),
    Sum(Vec<LinearOp<C>>),
}

impl<C: Coeff> LinearOp<C> {
    /// The binary-search-tree splitting operator `f ↦ 2∫_0^z f(x)/(1-x) dx`.
    pub fn binary_search_tree() -> Self {
        LinearOp::Compose(vec![
            LinearOp::MulRational {
                num: vec![C::one()],
                den: vec![C::one(), C::from_i64(-1)],
            },
            LinearOp::Integrate,
            LinearOp::Scalar(C::from_i64(2)),
        ])
    }

    pub fn apply(&self, f: &Series<C>) -> Result<Series<C>, SeriesError> {
        Ok(match self {
            LinearOp::Scalar(c) => f.scale(c),
            LinearOp::Integrate => f.integral(),
            LinearOp::MulRational { num, den } => f.mul_rational(num, den)?,
            LinearOp::ScaleArg(c) => f.rescale(c),
            LinearOp::Compose(ops) => {
                let mut g = f.clone();
                for op in ops {
                    g = op.apply(&g)?;
                }
                g
            }
            LinearOp::Sum(ops) => {
                let mut acc = Series::zero();
                for op in ops {
                    acc = acc.add(&op.apply(f)?);
                }
                acc
            }
        })
    }

    /// Certify `val(L[z^k]) > k` for every `k <= order` by probing.
    pub fn check_valuation_increasing(&self, order: usize) -> Result<(), SeriesError> {
        for k in 0..=order {
            let image = self.apply(&Series::monomial(C::one(), k))?;
            if (0..=k).any(|n| !image.coeff(n).is_zero()) {
                return Err(SeriesError::NotValuationIncreasing { degree: k });
            }
        }
        Ok(())
    }
}

/// Solve `f = t + L[f]` to `order`: the operator is probed for valuation
/// gain, then the Neumann series is summed coefficient-wise (lazily, one
/// coefficient per step) and the residual checked exactly.
pub fn linear_operator_solve<C: Coeff>(
    t: &Series<C>,
    op: &LinearOp<C>,
    order: usize,
) -> Result<Series<C>, SeriesError> {
    op.check_valuation_increasing(order)?;
    let mut failure = None;
    let sol = solve_system(vec![vec![]], vec![0], |v| {
        vec![match op.apply(&v[0]) {
            Ok(image) => t.add(&image),
            Err(e) => {
                failure = Some(e);
                Series::zero()
            }
        }]
    })
    .pop()
    .expect("one unknown");
    if let Some(e) = failure {
        return Err(e);
    }
    let trunc = sol.truncate(order);
    let image = t.add(&op.apply(&trunc)?);
    if let Some(n) = (0..=order).find(|&n| image.coeff(n) != trunc.coeff(n)) {
        return Err(SeriesError::NonContraction { index: n });
    }
    Ok(sol)
}

/// Quicksort comparison toll `t_n = n - 1` for `n >= 1`.
pub fn quicksort_toll<C: Coeff>() -> Series<C> {
    Series::from_fn(|n| {
        if n == 0 {
            C::zero()
        } else {
            C::from_rational(&int(n as i64 - 1))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    type Q = Series<Rational>;

    fn recurrence(t: &[Rational], n: usize) -> Vec<Rational> {
        // f_n = t_n + (2/n) Σ_{k<n} f_k
        let mut f: Vec<Rational> = Vec::new();
        let mut sum = int(0);
        for m in 0..=n {
            let v = if m == 0 {
                t[0].clone()
            } else {
                &t[m] + &sum * ratio(2, m as i64)
            };
            sum += &v;
            f.push(v);
        }
        f
    }

    #[test]
    fn zero_operator_returns_toll() {
        let t = quicksort_toll::<Rational>();
        let f = linear_operator_solve(&t, &LinearOp::Scalar(int(0)), 10);
        // The zero operator is trivially valuation-increasing.
        let f = f.unwrap();
        assert!((0..10).all(|n| f.coeff(n) == t.coeff(n)));
    }

    #[test]
    fn quicksort_matches_direct_recurrence() {
        let t = quicksort_toll::<Rational>();
        let f = linear_operator_solve(&t, &LinearOp::binary_search_tree(), 60).unwrap();
        assert_eq!(f.coeff(2), int(1));
        assert_eq!(f.coeff(3), ratio(8, 3));
        let oracle = recurrence(&t.coeffs(60), 60);
        assert!((0..=60).all(|n| f.coeff(n) == oracle[n]));
    }

    #[test]
    fn unit_toll_matches_recurrence() {
        let t = Q::z();
        let f = linear_operator_solve(&t, &LinearOp::binary_search_tree(), 40).unwrap();
        let oracle = recurrence(&t.coeffs(40), 40);
        assert!((0..=40).all(|n| f.coeff(n) == oracle[n]));
    }

    #[test]
    fn non_increasing_operator_is_rejected() {
        let op = LinearOp::<Rational>::ScaleArg(ratio(1, 2));
        assert_eq!(
            linear_operator_solve(&Q::z(), &op, 5).unwrap_err(),
            SeriesError::NotValuationIncreasing { degree: 0 }
        );
    }
}
