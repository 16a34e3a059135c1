//! Singularity analysis: dominant singularities, singular expansions over
//! the scale `(1 - z/ρ)^{-α} (log 1/(1 - z/ρ))^β`, and their translation
//! into coefficient asymptotics.
//!
//! Continuation of a generating function to an indented disc, which the
//! transfer of error terms requires, is an assumption of every result here
//! and is never checked.

mod estimate;
mod expansion;
mod locate;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};
use thiserror::Error;

use crate::series::SeriesError;

pub use estimate::{
    estimate_from_coefficients, oscillation_indicator, Estimate, EstimateMethod, Oscillation,
};
pub use expansion::{simple_variety_asym, singular_expansion};
pub use locate::{locate_singularity, BiPoly, GfForm, Singularity, SingularityKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularError {
    #[error("Gamma-pole: leading term vanishes for alpha = {alpha}")]
    GammaPole { alpha: f64 },
    #[error("index {n} too small for the asymptotic scale")]
    IndexTooSmall { n: u64 },
    #[error("unsupported form: {0}")]
    Unsupported(String),
    #[error("no singularity found: {0}")]
    NoRoot(String),
    #[error("invalid expansion: {0}")]
    InvalidExpansion(String),
    #[error("coefficient {n} vanishes inside the estimation window")]
    ZeroCoefficient { n: usize },
    #[error("estimation window needs at least 8 usable indices, got {len}")]
    WindowTooShort { len: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn is_gamma_pole(alpha: f64) -> bool {
    alpha <= 0.0 && alpha == alpha.round()
}

/// `Γ(x)`.
pub fn gamma_fn(x: f64) -> f64 {
    gamma(x)
}

/// `n^{α-1} (log n)^β / Γ(α)`, the leading asymptotic form of
/// `[z^n] (1-z)^{-α} (log 1/(1-z))^β`.
pub fn scale_asymptotic(alpha: f64, beta: u32, n: u64) -> Result<f64, SingularError> {
    if is_gamma_pole(alpha) {
        return Err(SingularError::GammaPole { alpha });
    }
    if n < 2 {
        return Err(SingularError::IndexTooSmall { n });
    }
    let x = n as f64;
    Ok(x.powf(alpha - 1.0) * x.ln().powi(beta as i32) / gamma(alpha))
}

/// `(ln |value|, sign)` of [`scale_asymptotic`], safe for huge `n`.
pub fn ln_scale_asymptotic(alpha: f64, beta: u32, n: u64) -> Result<(f64, f64), SingularError> {
    if is_gamma_pole(alpha) {
        return Err(SingularError::GammaPole { alpha });
    }
    if n < 2 {
        return Err(SingularError::IndexTooSmall { n });
    }
    let x = n as f64;
    let g = gamma(alpha);
    let ln = (alpha - 1.0) * x.ln() + beta as f64 * x.ln().ln()
        - if g.is_finite() {
            g.abs().ln()
        } else {
            ln_gamma(alpha)
        };
    Ok((ln, g.signum()))
}

/// One term `c (1 - z/ρ)^{-α} (log 1/(1 - z/ρ))^β` of a singular expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleElement {
    pub c: f64,
    pub alpha: f64,
    pub beta: u32,
}

impl ScaleElement {
    pub fn new(c: f64, alpha: f64, beta: u32) -> Self {
        ScaleElement { c, alpha, beta }
    }

    /// Asymptotic dominance: larger `(α, β)` lexicographically gives larger
    /// coefficients.
    pub fn dominance(&self, other: &ScaleElement) -> Ordering {
        self.alpha
            .partial_cmp(&other.alpha)
            .unwrap_or(Ordering::Equal)
            .then(self.beta.cmp(&other.beta))
    }

    /// `c n^{α-1} (log n)^β / Γ(α)`.
    pub fn coefficient(&self, n: u64) -> Result<f64, SingularError> {
        Ok(self.c * scale_asymptotic(self.alpha, self.beta, n)?)
    }
}

/// Expansion of a function at its dominant singularity `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularExpansion {
    pub rho: f64,
    pub elements: Vec<ScaleElement>,
    /// `(α, β)` of the first neglected term.
    pub error_order: Option<(f64, u32)>,
}

impl SingularExpansion {
    pub fn new(
        rho: f64,
        elements: Vec<ScaleElement>,
        error_order: Option<(f64, u32)>,
    ) -> Result<Self, SingularError> {
        let se = SingularExpansion {
            rho,
            elements,
            error_order,
        };
        se.validate()?;
        Ok(se)
    }

    pub fn validate(&self) -> Result<(), SingularError> {
        let bad = |m: &str| Err(SingularError::InvalidExpansion(m.to_string()));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad("rho must be positive");
        }
        if self.elements.is_empty() {
            return bad("no elements");
        }
        if self
            .elements
            .windows(2)
            .any(|w| w[0].dominance(&w[1]) != Ordering::Greater)
        {
            return bad("elements must be strictly decreasing in dominance");
        }
        if let Some((a, b)) = self.error_order {
            let last = self.elements.last().expect("nonempty");
            if last.dominance(&ScaleElement::new(0.0, a, b)) != Ordering::Greater {
                return bad("error order must be dominated by the last element");
            }
        }
        Ok(())
    }
}

/// `Σ_i c_i n^{α_i-1}(log n)^{β_i}/Γ(α_i)` without the exponential factor
/// `ρ^{-n}`. Elements at Gamma poles contribute nothing; if all of them do,
/// the first pole is reported.
pub fn transfer_scaled(se: &SingularExpansion, n: u64) -> Result<f64, SingularError> {
    let mut total = 0.0;
    let mut used = false;
    let mut first_err = None;
    for e in &se.elements {
        match e.coefficient(n) {
            Ok(v) => {
                total += v;
                used = true;
            }
            Err(err @ SingularError::GammaPole { .. }) => {
                first_err.get_or_insert(err);
            }
            Err(err) => return Err(err),
        }
    }
    match (used, first_err) {
        (false, Some(err)) => Err(err),
        _ => Ok(total),
    }
}

/// Predicted `[z^n] f = ρ^{-n} Σ_i c_i n^{α_i-1}(log n)^{β_i}/Γ(α_i)`. May
/// overflow to infinity for large `n`; see [`ln_transfer`].
pub fn transfer(se: &SingularExpansion, n: u64) -> Result<f64, SingularError> {
    Ok(transfer_scaled(se, n)? * se.rho.powf(-(n as f64)))
}

/// Natural logarithm of a positive [`transfer`] value.
pub fn ln_transfer(se: &SingularExpansion, n: u64) -> Result<f64, SingularError> {
    let s = transfer_scaled(se, n)?;
    Ok(s.ln() - n as f64 * se.rho.ln())
}

/// Coefficient asymptotics ready for comparison against exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticForm {
    pub rho: f64,
    pub elements: Vec<ScaleElement>,
    /// Set when several singularities share the dominant modulus and the
    /// coefficients fluctuate.
    pub oscillation: bool,
    pub error_order: Option<(f64, u32)>,
    /// Coefficients vanish unless `n ≡ residue (mod period)`.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub period: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub residue: u64,
}

fn one() -> u64 {
    1
}

fn is_one(p: &u64) -> bool {
    *p == 1
}

fn is_zero(p: &u64) -> bool {
    *p == 0
}

impl From<SingularExpansion> for AsymptoticForm {
    fn from(se: SingularExpansion) -> Self {
        AsymptoticForm {
            rho: se.rho,
            elements: se.elements,
            oscillation: false,
            error_order: se.error_order,
            period: 1,
            residue: 0,
        }
    }
}

impl AsymptoticForm {
    pub fn expansion(&self) -> SingularExpansion {
        SingularExpansion {
            rho: self.rho,
            elements: self.elements.clone(),
            error_order: self.error_order,
        }
    }

    fn on_support(&self, n: u64) -> bool {
        n % self.period == self.residue % self.period
    }

    /// Prediction with the factor `ρ^{-n}` removed.
    pub fn eval_scaled(&self, n: u64) -> Result<f64, SingularError> {
        if !self.on_support(n) {
            return Ok(0.0);
        }
        Ok(self.period as f64 * transfer_scaled(&self.expansion(), n)?)
    }

    pub fn eval(&self, n: u64) -> Result<f64, SingularError> {
        Ok(self.eval_scaled(n)? * self.rho.powf(-(n as f64)))
    }

    /// `ln` of a positive prediction; `None` off the support.
    pub fn ln_eval(&self, n: u64) -> Result<Option<f64>, SingularError> {
        if !self.on_support(n) {
            return Ok(None);
        }
        Ok(Some(
            (self.period as f64).ln() + ln_transfer(&self.expansion(), n)?,
        ))
    }

    /// The constant `K` in `f_n ~ K ρ^{-n} n^{α-1} (log n)^β` for the first
    /// element that does not sit at a Gamma pole.
    pub fn leading_constant(&self) -> Option<f64> {
        self.elements
            .iter()
            .find(|e| !is_gamma_pole(e.alpha))
            .map(|e| e.c / gamma(e.alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scale_examples() {
        for n in [2u64, 10, 1000] {
            let v = scale_asymptotic(0.5, 0, n).unwrap();
            assert!((v - 1.0 / (PI * n as f64).sqrt()).abs() < 1e-14);
            assert!((scale_asymptotic(1.0, 0, n).unwrap() - 1.0).abs() < 1e-14);
            let nl = n as f64 * (n as f64).ln();
            assert!((scale_asymptotic(2.0, 1, n).unwrap() / nl - 1.0).abs() < 1e-13);
        }
        assert!(matches!(
            scale_asymptotic(-2.0, 0, 10),
            Err(SingularError::GammaPole { .. })
        ));
        assert!(matches!(
            scale_asymptotic(0.5, 0, 1),
            Err(SingularError::IndexTooSmall { n: 1 })
        ));
    }

    #[test]
    fn log_scale_matches_direct() {
        for &(a, b) in &[(0.5, 0), (-0.5, 0), (2.0, 1), (3.5, 2)] {
            let (ln, sign) = ln_scale_asymptotic(a, b, 500).unwrap();
            let direct = scale_asymptotic(a, b, 500).unwrap();
            assert!((sign * ln.exp() / direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_recurrence() {
        let mut x = -3.75;
        while x < 20.0 {
            if !is_gamma_pole(x) && !is_gamma_pole(x + 1.0) {
                let lhs = gamma(x + 1.0);
                let rhs = x * gamma(x);
                assert!(((lhs - rhs) / lhs).abs() < 1e-12, "x = {x}");
            }
            x += 0.3125;
        }
    }

    #[test]
    fn transfer_falls_through_gamma_poles() {
        // Catalan-type branch: τ - (1/2)√(1 - 4z).
        let se = SingularExpansion::new(
            0.25,
            vec![
                ScaleElement::new(0.5, 0.0, 0),
                ScaleElement::new(-0.5, -0.5, 0),
            ],
            None,
        )
        .unwrap();
        let n = 100u64;
        let expect = 4f64.powi(100) * (n as f64).powf(-1.5) / (4.0 * PI.sqrt());
        assert!((transfer(&se, n).unwrap() / expect - 1.0).abs() < 1e-12);
        assert!((ln_transfer(&se, n).unwrap() - expect.ln()).abs() < 1e-10);
        let pole_only =
            SingularExpansion::new(1.0, vec![ScaleElement::new(1.0, -1.0, 0)], None).unwrap();
        assert!(transfer(&pole_only, 10).is_err());
    }

    #[test]
    fn expansion_invariants() {
        let e = |a, b| ScaleElement::new(1.0, a, b);
        assert!(SingularExpansion::new(0.0, vec![e(1.0, 0)], None).is_err());
        assert!(SingularExpansion::new(1.0, vec![e(1.0, 0), e(1.0, 1)], None).is_err());
        assert!(SingularExpansion::new(1.0, vec![e(1.0, 1), e(1.0, 0)], Some((0.5, 0))).is_ok());
        assert!(SingularExpansion::new(1.0, vec![e(1.0, 1)], Some((1.0, 2))).is_err());
    }

    #[test]
    fn asymptotic_form_json_shape() {
        let form = AsymptoticForm::from(
            SingularExpansion::new(0.5, vec![ScaleElement::new(1.0, 1.0, 0)], Some((0.0, 0)))
                .unwrap(),
        );
        assert_eq!(
            serde_json::to_string(&form).unwrap(),
            r#"{"rho":0.5,"elements":[{"c":1.0,"alpha":1.0,"beta":0}],"oscillation":false,"error_order":[0.0,0]}"#
        );
    }
}
