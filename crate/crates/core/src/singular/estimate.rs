use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::SingularError;
use crate::scalar::{rational_ln_abs, rational_to_f64, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    /// Least-squares fit of successive ratios `f_n / f_{n-p}`.
    Ratio,
    /// Fit of `ln f_n` against `n` and `ln n` over a widened window; used
    /// when the normalized coefficients oscillate.
    LogLinear,
}

/// Diagnostic for fluctuations of the normalized coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Oscillation {
    /// Largest deviation from the smooth trend.
    pub amplitude: f64,
    /// `max - min` of the sequence itself.
    pub range: f64,
    /// Mean of the normalized sequence.
    pub mean: f64,
    /// Estimated rounding noise.
    pub noise: f64,
    pub sign_changes: usize,
    pub fires: bool,
}

/// Radius and exponent read off the coefficients themselves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub rho_hat: f64,
    pub alpha_hat: f64,
    pub period: usize,
    pub residue: usize,
    /// Largest relative residual of the fit.
    pub residual: f64,
    pub oscillation: Oscillation,
    pub method: EstimateMethod,
}

fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let cols = rows[0].len();
    let a = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
    // Column equilibration keeps mixed scales such as 1 and 1/n^2 benign.
    let norms: Vec<f64> = (0..cols)
        .map(|j| a.column(j).norm().max(f64::MIN_POSITIVE))
        .collect();
    let scaled = DMatrix::from_fn(rows.len(), cols, |i, j| a[(i, j)] / norms[j]);
    let b = DVector::from_column_slice(rhs);
    let x = scaled
        .svd(true, true)
        .solve(&b, 1e-14)
        .expect("SVD was computed with both factors");
    (0..cols).map(|j| x[j] / norms[j]).collect()
}

/// Residuals after removing a quadratic trend.
fn detrend(values: &[f64]) -> Vec<f64> {
    let m = values.len() as f64;
    let rows: Vec<Vec<f64>> = (0..values.len())
        .map(|k| {
            let t = k as f64 / m;
            vec![1.0, t, t * t]
        })
        .collect();
    let c = least_squares(&rows, values);
    rows.iter()
        .zip(values)
        .map(|(r, v)| v - (c[0] + c[1] * r[1] + c[2] * r[2]))
        .collect()
}

/// Decide whether a normalized coefficient sequence fluctuates around its
/// trend rather than converging smoothly. Fires when the deviation from a
/// quadratic trend is well above rounding noise, above `1e-3` of the mean,
/// and changes sign at least twice.
pub fn oscillation_indicator(values: &[f64]) -> Oscillation {
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    if values.len() < 8 {
        return Oscillation {
            amplitude: 0.0,
            range: 0.0,
            mean,
            noise: 0.0,
            sign_changes: 0,
            fires: false,
        };
    }
    let resid = detrend(values);
    let amplitude = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    // Fourth differences of white noise have variance 70 σ².
    let d4: Vec<f64> = resid
        .windows(5)
        .map(|w| w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4])
        .collect();
    let noise = (d4.iter().map(|d| d * d).sum::<f64>() / d4.len() as f64).sqrt() / 70f64.sqrt();
    let signs: Vec<bool> = resid
        .iter()
        .filter(|r| r.abs() > 0.1 * amplitude)
        .map(|r| *r > 0.0)
        .collect();
    let sign_changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    let range = values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
        - values.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    let fires = amplitude > 10.0 * noise && amplitude > 1e-3 * mean.abs() && sign_changes >= 2;
    Oscillation {
        amplitude,
        range,
        mean,
        noise,
        sign_changes,
        fires,
    }
}

struct Support {
    period: usize,
    residue: usize,
    indices: Vec<usize>,
}

fn support(coeffs: &[Rational], window: &Range<usize>) -> Result<Support, SingularError> {
    let nonzero: Vec<usize> = window.clone().filter(|&n| !coeffs[n].is_zero()).collect();
    let Some(&first) = nonzero.first() else {
        return Err(SingularError::ZeroCoefficient { n: window.start });
    };
    let period = nonzero
        .iter()
        .fold(0usize, |g, &n| g.gcd(&(n - first)))
        .max(1);
    let residue = first % period;
    let indices: Vec<usize> = window.clone().filter(|n| n % period == residue).collect();
    if let Some(&n) = indices.iter().find(|&&n| coeffs[n].is_zero()) {
        return Err(SingularError::ZeroCoefficient { n });
    }
    if indices.len() < 8 {
        return Err(SingularError::WindowTooShort { len: indices.len() });
    }
    Ok(Support {
        period,
        residue,
        indices,
    })
}

/// `f_n ρ^n n^{1-α}` on the support, computed in log space.
fn normalized(coeffs: &[Rational], indices: &[usize], rho: f64, alpha: f64) -> Vec<f64> {
    indices
        .iter()
        .map(|&n| {
            let sign = if coeffs[n] < Rational::zero() {
                -1.0
            } else {
                1.0
            };
            let nf = n as f64;
            sign * (rational_ln_abs(&coeffs[n]) + nf * rho.ln() - (alpha - 1.0) * nf.ln()).exp()
        })
        .collect()
}

/// Estimate `ρ` and `α` in `f_n ≈ C ρ^{-n} n^{α-1}` from exact coefficients
/// over `window` (indices into `coeffs`).
///
/// Successive ratios are fitted as `a + b/n + c/n²`, giving `ρ = a^{-1/p}`
/// and `α = 1 + b/(a p)` for period `p`. When the normalized coefficients
/// oscillate the ratios are unreliable, and `ln f_n` is instead fitted
/// against `n` and `ln n` over the window widened down to a twentieth of its
/// upper end.
pub fn estimate_from_coefficients(
    coeffs: &[Rational],
    window: Range<usize>,
) -> Result<Estimate, SingularError> {
    if window.end > coeffs.len() || window.start >= window.end {
        return Err(SingularError::WindowTooShort {
            len: window.end.min(coeffs.len()).saturating_sub(window.start),
        });
    }
    let sup = support(coeffs, &window)?;
    let p = sup.period;
    let pairs: Vec<usize> = sup
        .indices
        .iter()
        .copied()
        .filter(|&n| n >= p && !coeffs[n - p].is_zero())
        .collect();
    if pairs.len() < 8 {
        return Err(SingularError::WindowTooShort { len: pairs.len() });
    }
    let rows: Vec<Vec<f64>> = pairs
        .iter()
        .map(|&n| {
            let inv = 1.0 / n as f64;
            vec![1.0, inv, inv * inv]
        })
        .collect();
    let q: Vec<f64> = pairs
        .iter()
        .map(|&n| rational_to_f64(&(&coeffs[n] / &coeffs[n - p])))
        .collect();
    let fit = least_squares(&rows, &q);
    let residual = rows
        .iter()
        .zip(&q)
        .map(|(r, q)| ((fit[0] + fit[1] * r[1] + fit[2] * r[2]) - q).abs() / q.abs())
        .fold(0.0, f64::max);
    let (a, b) = (fit[0], fit[1]);
    let rho = a.abs().powf(-1.0 / p as f64);
    let alpha = b / (a * p as f64) + 1.0;
    let oscillation = oscillation_indicator(&normalized(coeffs, &sup.indices, rho, alpha));
    if !oscillation.fires {
        return Ok(Estimate {
            rho_hat: rho,
            alpha_hat: alpha,
            period: p,
            residue: sup.residue,
            residual,
            oscillation,
            method: EstimateMethod::Ratio,
        });
    }
    let wide = (window.end / 20).max(2)..window.end;
    let wide_sup = support(coeffs, &wide)?;
    let rows: Vec<Vec<f64>> = wide_sup
        .indices
        .iter()
        .map(|&n| vec![1.0, n as f64, (n as f64).ln()])
        .collect();
    let logs: Vec<f64> = wide_sup
        .indices
        .iter()
        .map(|&n| rational_ln_abs(&coeffs[n]))
        .collect();
    let fit = least_squares(&rows, &logs);
    let residual = rows
        .iter()
        .zip(&logs)
        .map(|(r, l)| (fit[0] + fit[1] * r[1] + fit[2] * r[2] - l).abs())
        .fold(0.0, f64::max);
    Ok(Estimate {
        rho_hat: (-fit[1]).exp(),
        alpha_hat: fit[2] + 1.0,
        period: wide_sup.period,
        residue: wide_sup.residue,
        residual,
        oscillation,
        method: EstimateMethod::LogLinear,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::series::Series;

    fn catalan(order: usize) -> Vec<Rational> {
        let mut c = vec![int(1)];
        for n in 1..=order {
            let prev = c[n - 1].clone();
            c.push(prev * int(2 * (2 * n as i64 - 1)) / int(n as i64 + 1));
        }
        c
    }

    #[test]
    fn catalan_ratio_fit() {
        let e = estimate_from_coefficients(&catalan(400), 200..401).unwrap();
        assert_eq!(e.method, EstimateMethod::Ratio);
        assert!((e.rho_hat - 0.25).abs() < 1e-4, "{e:?}");
        assert!((e.alpha_hat + 0.5).abs() < 0.05, "{e:?}");
        assert!(!e.oscillation.fires);
    }

    #[test]
    fn geometric_series() {
        let ones = vec![int(1); 100];
        let e = estimate_from_coefficients(&ones, 20..100).unwrap();
        assert!((e.rho_hat - 1.0).abs() < 1e-12);
        assert!((e.alpha_hat - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_period() {
        // Catalan numbers spread over odd indices.
        let c = catalan(200);
        let mut spread = vec![int(0); 402];
        for (k, v) in c.into_iter().enumerate() {
            spread[2 * k + 1] = v;
        }
        let e = estimate_from_coefficients(&spread, 200..401).unwrap();
        assert_eq!((e.period, e.residue), (2, 1));
        assert!((e.rho_hat - 0.5).abs() < 1e-4, "{e:?}");
    }

    #[test]
    fn two_three_trees_oscillate() {
        // T(z) = z + T(z^2 + z^3)
        let n = 400;
        let mut t = vec![int(0); n + 1];
        t[1] = int(1);
        let sub = Series::polynomial(vec![int(0), int(0), int(1), int(1)]);
        for _ in 0..n {
            let s = Series::polynomial(t.clone()).substitute(&sub).unwrap();
            let mut next = s.coeffs(n);
            next[1] += int(1);
            if next == t {
                break;
            }
            t = next;
        }
        let e = estimate_from_coefficients(&t, 200..401).unwrap();
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!(e.oscillation.fires, "{e:?}");
        assert_eq!(e.method, EstimateMethod::LogLinear);
        assert!((e.rho_hat - golden).abs() < 1e-3, "{e:?}");
    }

    #[test]
    fn short_windows_are_rejected() {
        assert!(matches!(
            estimate_from_coefficients(&catalan(10), 2..6),
            Err(SingularError::WindowTooShort { .. })
        ));
        let mut c = catalan(50);
        c[30] = int(0);
        c[31] = int(0);
        assert!(matches!(
            estimate_from_coefficients(&c, 20..50),
            Err(SingularError::ZeroCoefficient { .. })
        ));
    }
}
