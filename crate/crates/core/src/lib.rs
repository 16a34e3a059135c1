//! Analytic-combinatorics workbench core.
//!
//! * [`specdsl`] parses combinatorial specifications and compiles them to
//!   generating functions.
//! * [`series`] is the exact lazy power-series engine those compile into.
//! * [`singular`] predicts coefficient asymptotics from singular behaviour.
//! * [`limitlaw`] handles bivariate models, exact parameter distributions and
//!   their Gaussian / theta limits.
//!
//! Series are generic over the coefficient ring ([`Coeff`]); the aliases
//! below name the three instantiations used throughout.

pub mod jet;
pub mod limitlaw;
pub mod scalar;
pub mod series;
pub mod singular;
pub mod specdsl;
pub mod upoly;

pub use jet::Jet;
pub use scalar::{Coeff, Rational};
pub use series::{Series, SeriesError};
pub use upoly::UPoly;

/// Exact rational power series.
pub type QSeries = Series<Rational>;
/// Floating-point power series (polylogarithms, numerics).
pub type FSeries = Series<f64>;
/// Series in `z` whose coefficients are polynomials in the marking variable `u`.
pub type BiSeries = Series<UPoly>;
