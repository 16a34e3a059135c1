use super::{LimitLawError, QuasiPowerKind, QuasiPowerModel};
use crate::jet::Jet;
use crate::scalar::{int, Coeff, Rational};
use crate::series::{PolyEquation, Series, SeriesError, SolveMethod};
use crate::singular::{locate_singularity, BiPoly, GfForm};
use crate::upoly::UPoly;

// Non-crossing graphs on n points of a circle, u marking connected
// components. With G = 1 + z u L the defining cubic becomes
// z L³ + (2u²z² - 3uz + 1) L² + (4uz - 3) L + 2 = 0, whose root L(0) = 1 is
// simple, so L is a power series with a square-root branch point at ρ(u).

/// The cubic for `L` at a numeric `u`.
pub fn noncrossing_kernel(u: f64) -> BiPoly {
    BiPoly::new(vec![
        vec![2.0],
        vec![-3.0, 4.0 * u],
        vec![1.0, -3.0 * u, 2.0 * u * u],
        vec![0.0, 1.0],
    ])
}

/// Dominant singularity `ρ(u)`; `ρ(1) = 3/2 - √2`.
pub fn noncrossing_rho(u: f64) -> Result<f64, LimitLawError> {
    let form = GfForm::Algebraic {
        equation: noncrossing_kernel(u),
        start: (0.0, 1.0),
    };
    Ok(locate_singularity(&form)?.rho)
}

/// Movable-singularity data for the number of components.
pub fn noncrossing_quasi_power() -> Result<QuasiPowerModel, LimitLawError> {
    QuasiPowerModel::from_function(QuasiPowerKind::MovableSingularity, noncrossing_rho)
}

fn kernel_equation<C: Coeff>(u: &C) -> PolyEquation<C> {
    let c = |k: i64| C::from_rational(&int(k));
    PolyEquation::new(vec![
        Series::constant(c(2)),
        Series::polynomial(vec![c(-3), u.scale(&int(4))]),
        Series::polynomial(vec![c(1), u.scale(&int(-3)), u.mul(u).scale(&int(2))]),
        Series::monomial(c(1), 1),
    ])
}

/// `G(z, u)` with `u` formal, to `order`.
pub fn noncrossing_series(order: usize) -> Result<Series<UPoly>, SeriesError> {
    let l = kernel_equation(&UPoly::u()).solve(UPoly::one(), order, SolveMethod::Newton)?;
    Ok(Series::one()
        .add(&l.mul(&Series::monomial(UPoly::u(), 1)))
        .truncate(order))
}

/// `G(z, u)` at a rational `u`, to `order`.
pub fn noncrossing_counts(u: &Rational, order: usize) -> Result<Series<Rational>, SeriesError> {
    let l = kernel_equation(u).solve(int(1), order, SolveMethod::Newton)?;
    Ok(Series::one()
        .add(&l.mul(&Series::monomial(u.clone(), 1)))
        .truncate(order))
}

/// Exact mean and variance of the number of components for `n` in
/// `1..=order`, from jets of `G(z, u)` at `u = 1`.
pub fn noncrossing_moments(order: usize) -> Result<Vec<(Rational, Rational)>, LimitLawError> {
    let u = Jet::u();
    let l = kernel_equation(&u).solve(Jet::one(), order, SolveMethod::Newton)?;
    let g = l.mul(&Series::monomial(u, 1));
    (1..=order)
        .map(|n| {
            g.coeff(n)
                .moments()
                .ok_or(LimitLawError::ZeroVariance { n })
        })
        .collect()
}
