use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{LimitLawError, TransferModel};

/// Which feature of the generating function moves with `u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuasiPowerKind {
    /// `f_n(u)/f_n(1) ~ (ρ(1)/ρ(u))^n`: mean and variance grow like `n`.
    MovableSingularity,
    /// `f_n(u)/f_n(1) ~ n^{α(u)-α(1)}`: mean and variance grow like `log n`.
    MovableExponent,
}

/// Local data at `u = 1` of `ρ(u)` or `α(u)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiPowerModel {
    pub kind: QuasiPowerKind,
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Step of the central differences.
pub const DIFF_STEP: f64 = 1e-4;

impl QuasiPowerModel {
    /// Differentiate `f` at `u = 1` by Richardson-extrapolated central
    /// differences with step [`DIFF_STEP`].
    pub fn from_function<E>(
        kind: QuasiPowerKind,
        f: impl Fn(f64) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let h = DIFF_STEP;
        let f0 = f(1.0)?;
        let (p1, m1) = (f(1.0 + h)?, f(1.0 - h)?);
        let (p2, m2) = (f(1.0 + 2.0 * h)?, f(1.0 - 2.0 * h)?);
        let d1 = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
        let d2 = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * f0) / (12.0 * h * h);
        Ok(QuasiPowerModel {
            kind,
            value: f0,
            d1,
            d2,
        })
    }

    /// Movable exponent with known local data.
    pub fn movable_exponent(value: f64, d1: f64, d2: f64) -> Self {
        QuasiPowerModel {
            kind: QuasiPowerKind::MovableExponent,
            value,
            d1,
            d2,
        }
    }

    /// Growth scale of both moments: `n` or `log n`.
    pub fn scale(&self, n: usize) -> f64 {
        match self.kind {
            QuasiPowerKind::MovableSingularity => n as f64,
            QuasiPowerKind::MovableExponent => (n as f64).ln(),
        }
    }

    /// Coefficient `μ` in `mean ~ μ · scale(n)`.
    pub fn mean_coefficient(&self) -> f64 {
        match self.kind {
            QuasiPowerKind::MovableSingularity => -self.d1 / self.value,
            QuasiPowerKind::MovableExponent => self.d1,
        }
    }

    /// Coefficient `σ²` in `variance ~ σ² · scale(n)`.
    pub fn variance_coefficient(&self) -> f64 {
        match self.kind {
            QuasiPowerKind::MovableSingularity => {
                // B(u) = ρ(1)/ρ(u)
                let r = self.d1 / self.value;
                let b1 = -r;
                let b2 = 2.0 * r * r - self.d2 / self.value;
                b2 + b1 - b1 * b1
            }
            QuasiPowerKind::MovableExponent => self.d2 + self.d1,
        }
    }

    pub fn predicted_mean(&self, n: usize) -> f64 {
        self.mean_coefficient() * self.scale(n)
    }

    pub fn predicted_variance(&self, n: usize) -> f64 {
        self.variance_coefficient() * self.scale(n)
    }
}

/// Perron root of a nonnegative matrix.
pub fn dominant_eigenvalue(m: &[Vec<f64>]) -> f64 {
    let k = m.len();
    let a = DMatrix::from_fn(k, k, |i, j| m[i][j]);
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Some power of the support pattern is strictly positive (Wielandt bound
/// `(k-1)^2 + 1`), which is irreducibility plus aperiodicity.
pub fn is_primitive(m: &[Vec<f64>]) -> bool {
    let k = m.len();
    let support: Vec<Vec<bool>> = m
        .iter()
        .map(|r| r.iter().map(|x| *x > 0.0).collect())
        .collect();
    let mut power = support.clone();
    for _ in 0..(k - 1) * (k - 1) {
        if power.iter().flatten().all(|b| *b) {
            return true;
        }
        power = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| (0..k).any(|l| power[i][l] && support[l][j]))
                    .collect()
            })
            .collect();
    }
    power.iter().flatten().all(|b| *b)
}

/// `ρ(u) = 1/λ(u)` for the dominant eigenvalue `λ(u)` of `T(u)`, with its
/// derivatives at `u = 1`.
pub fn perron_analysis(model: &TransferModel) -> Result<QuasiPowerModel, LimitLawError> {
    if model.states() == 0 || !is_primitive(&model.matrix_at(1.0)) {
        return Err(LimitLawError::NotPrimitive);
    }
    QuasiPowerModel::from_function(QuasiPowerKind::MovableSingularity, |u| {
        Ok(1.0 / dominant_eigenvalue(&model.matrix_at(u)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limitlaw::{build_pattern_model, pattern_distributions};
    use crate::scalar::{int, ratio, rational_to_f64, Rational};
    use crate::upoly::UPoly;

    fn binary() -> Vec<(char, Rational)> {
        vec![('a', ratio(1, 2)), ('b', ratio(1, 2))]
    }

    #[test]
    fn stochastic_models_have_unit_perron_root() {
        for p in ["a", "aa", "aba", "abba", "bab"] {
            let m = build_pattern_model(p, &binary()).unwrap();
            let qp = perron_analysis(&m).unwrap();
            assert!((qp.value - 1.0).abs() < 1e-10, "{p}");
        }
    }

    #[test]
    fn pattern_aa_mean() {
        let m = build_pattern_model("aa", &binary()).unwrap();
        let qp = perron_analysis(&m).unwrap();
        assert!((qp.mean_coefficient() - 0.25).abs() < 1e-8);
        let exact = pattern_distributions(&m, &[1000]).unwrap()[0].mean_f64();
        assert!((exact / qp.predicted_mean(1000) - 1.0).abs() < 5e-3);
    }

    #[test]
    fn pattern_aba_variance_slope() {
        let m = build_pattern_model("aba", &binary()).unwrap();
        let qp = perron_analysis(&m).unwrap();
        let t = pattern_distributions(&m, &[500, 2000]).unwrap();
        let slope = (t[1].variance_f64() - t[0].variance_f64()) / 1500.0;
        assert!((slope / qp.variance_coefficient() - 1.0).abs() < 0.02);
        // Exact variance slope of "aba" occurrences: 1/8 + 2·(1/32) - 5·(1/64).
        assert!((qp.variance_coefficient() - rational_to_f64(&ratio(7, 64))).abs() < 1e-6);
    }

    #[test]
    fn periodic_models_are_rejected() {
        let flip = TransferModel {
            transitions: vec![
                vec![UPoly::constant(int(0)), UPoly::constant(int(1))],
                vec![UPoly::u(), UPoly::constant(int(0))],
            ],
            initial: vec![int(1), int(0)],
            terminal: vec![int(1), int(1)],
        };
        assert_eq!(
            perron_analysis(&flip).unwrap_err(),
            LimitLawError::NotPrimitive
        );
    }

    #[test]
    fn movable_exponent_log_scale() {
        let qp = QuasiPowerModel::movable_exponent(1.0, 1.0, 0.0);
        assert!((qp.predicted_mean(100) - 100f64.ln()).abs() < 1e-12);
        assert!(qp.variance_coefficient() >= 0.0);
    }
}
