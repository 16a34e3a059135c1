use statrs::function::factorial::ln_binomial;

/// Shannon entropy (nats) of the binomial distribution `B(n, p)`, summed
/// term by term in log space.
pub fn binomial_entropy(n: u64, p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "p must lie in (0, 1)");
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut sum = 0.0;
    let mut carry = 0.0;
    for k in 0..=n {
        let ln_pi = ln_binomial(n, k) + k as f64 * lp + (n - k) as f64 * lq;
        let term = -ln_pi * ln_pi.exp();
        // Neumaier summation.
        let t = sum + term;
        carry += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// `½ ln n + ½ + ln √(2π p q)`, the first terms of the entropy expansion.
pub fn binomial_entropy_asymptotic(n: u64, p: f64) -> f64 {
    0.5 * (n as f64).ln() + 0.5 + (2.0 * std::f64::consts::PI * p * (1.0 - p)).sqrt().ln()
}
