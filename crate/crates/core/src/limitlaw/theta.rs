use std::f64::consts::PI;

/// Theta-law density `4x Σ_{k≥1} k²(2k²x² - 3) e^{-k²x²}`, switched to its
/// Jacobi-transformed form for `x < 1` where the direct series cancels.
pub fn theta_density(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    if x >= 1.0 {
        for k in 1.. {
            let k2 = (k * k) as f64;
            let term = 4.0 * x * k2 * (2.0 * k2 * x * x - 3.0) * (-k2 * x * x).exp();
            total += term;
            if term.abs() < 1e-15 {
                break;
            }
        }
    } else {
        // 4π^{5/2} Σ k² (2π²k² - 3x²) e^{-π²k²/x²} / x^6
        let c = 4.0 * PI.powf(2.5) / x.powi(6);
        for k in 1.. {
            let k2 = (k * k) as f64;
            let term =
                c * k2 * (2.0 * PI * PI * k2 - 3.0 * x * x) * (-PI * PI * k2 / (x * x)).exp();
            total += term;
            if term.abs() < 1e-15 {
                break;
            }
        }
    }
    total
}

/// Composite Simpson rule with `panels` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let m = panels + panels % 2;
    let h = (b - a) / m as f64;
    let inner: f64 = (1..m)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

/// Theta-law distribution function by numerical integration of the density.
pub fn theta_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    // The density is below 1e-300 left of 0.05 and negligible right of 12.
    let upper = x.min(12.0);
    let lower = 0.05f64.min(upper);
    let panels = ((upper - lower) * 400.0).ceil() as usize + 2;
    simpson(theta_density, lower, upper, panels).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `Σ_{k∈Z} (1 - 2k²x²) e^{-k²x²}`, the closed form of the distribution.
    fn closed_cdf(x: f64) -> f64 {
        1.0 + 2.0
            * (1..200)
                .map(|k| {
                    let k2 = (k * k) as f64;
                    (1.0 - 2.0 * k2 * x * x) * (-k2 * x * x).exp()
                })
                .sum::<f64>()
    }

    #[test]
    fn both_forms_agree_at_the_switch() {
        for x in [0.9, 0.99, 1.0, 1.01, 1.2] {
            let direct: f64 = (1..100)
                .map(|k| {
                    let k2 = (k * k) as f64;
                    4.0 * x * k2 * (2.0 * k2 * x * x - 3.0) * (-k2 * x * x).exp()
                })
                .sum();
            assert!((theta_density(x) - direct).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn normalized_and_vanishing_at_both_ends() {
        let mass = simpson(theta_density, 0.0, 20.0, 20_000);
        assert!((mass - 1.0).abs() < 1e-6);
        assert!(theta_density(0.05) < 1e-100);
        assert!(theta_density(15.0) < 1e-90);
        assert!(theta_density(1.7) > theta_density(1.0));
    }

    #[test]
    fn integrated_cdf_matches_closed_form() {
        for x in [1.0, 1.5, 1.77, 2.5, 4.0] {
            assert!((theta_cdf(x) - closed_cdf(x)).abs() < 1e-9, "{x}");
        }
        // Mean √π.
        let mean = simpson(|x| x * theta_density(x), 0.0, 20.0, 20_000);
        assert!((mean - PI.sqrt()).abs() < 1e-8);
    }
}
