//! Limit laws of combinatorial parameters: marked models, exact parameter
//! distributions, quasi-powers predictions, and distances to the limiting
//! Gaussian or theta law.

mod distribution;
mod entropy;
mod factors;
mod gaussian;
mod height;
mod noncrossing;
mod pattern;
mod quasipower;
mod theta;

use thiserror::Error;

use crate::series::SeriesError;
use crate::singular::SingularError;

pub use distribution::{
    write_distributions_csv, DistributionTable, Moments, DISTRIBUTION_CSV_HEADER,
};
pub use entropy::{binomial_entropy, binomial_entropy_asymptotic};
pub use factors::{factor_count_model, factor_count_total, irreducible_counts};
pub use gaussian::{
    gaussian_convergence_check, ks_distance, ks_normal, normal_cdf, strictly_decreasing, KsRow,
};
pub use height::height_distribution;
pub use noncrossing::{
    noncrossing_counts, noncrossing_kernel, noncrossing_moments, noncrossing_quasi_power,
    noncrossing_rho, noncrossing_series,
};
pub use pattern::{build_pattern_model, pattern_distributions, TransferModel};
pub use quasipower::{
    dominant_eigenvalue, is_primitive, perron_analysis, QuasiPowerKind, QuasiPowerModel, DIFF_STEP,
};
pub use theta::{simpson, theta_cdf, theta_density};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitLawError {
    #[error("pattern must be nonempty")]
    EmptyPattern,
    #[error("bad letter probabilities: {0}")]
    BadProbabilities(String),
    #[error("pattern letter {0:?} is not in the alphabet")]
    UnknownLetter(char),
    #[error("transfer matrix at u = 1 is reducible or periodic")]
    NotPrimitive,
    #[error("zero variance at size {n}: no standardization")]
    ZeroVariance { n: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Singular(#[from] SingularError),
}
