//! Numeric boundary of the series layer: polylogarithm constructors and
//! coefficient extraction by discrete Cauchy integrals.

use num_complex::Complex;
use num_traits::{Float, FloatConst, NumCast};
use rustfft::{FftNum, FftPlanner};

use super::Series;

/// Generalized polylogarithm `Li_{α,k}(z) = Σ_{n≥1} (log n)^k n^{-α} z^n`
/// as a floating-point series.
pub fn polylog(alpha: f64, k: u32) -> Series<f64> {
    Series::from_fn(move |n| {
        if n == 0 {
            0.0
        } else {
            let x = n as f64;
            x.ln().powi(k as i32) * x.powf(-alpha)
        }
    })
}

/// Approximate `f_0 … f_{count-1}` from values of `f` on the circle
/// `|z| = radius`, using `M ≥ 4·count` equally spaced nodes (rounded up to
/// a power of two) and one FFT.
///
/// The trapezoidal rule on the circle aliases: the returned `f_n` is really
/// `Σ_{k≥0} f_{n+kM} r^{kM}`, so the error is bounded by
/// `Σ_{k≥1} |f_{n+kM}| r^{kM}`. No certification is attempted.
pub fn cauchy_extract<T, E>(
    mut evaluator: impl FnMut(Complex<T>) -> Result<Complex<T>, E>,
    radius: T,
    count: usize,
) -> Result<Vec<Complex<T>>, E>
where
    T: FftNum + Float + FloatConst,
{
    let m = (4 * count.max(1)).next_power_of_two();
    let mt: T = NumCast::from(m).expect("node count fits the float type");
    let mut samples = Vec::with_capacity(m);
    for j in 0..m {
        let jt: T = NumCast::from(j).expect("node index fits the float type");
        let theta = T::TAU() * jt / mt;
        samples.push(evaluator(Complex::from_polar(radius, theta))?);
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut samples);
    let mut scale = T::one();
    let mut out = Vec::with_capacity(count);
    for s in samples.into_iter().take(count) {
        out.push(s / (mt * scale));
        scale = scale * radius;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn polylog_coefficients() {
        assert!((polylog(0.0, 1).coeff(2) - 2f64.ln()).abs() < 1e-15);
        let li1 = polylog(1.0, 0);
        assert!((1..30).all(|n| (li1.coeff(n) - 1.0 / n as f64).abs() < 1e-15));
        let logfact = Series::<f64>::geometric().mul(&polylog(0.0, 1));
        assert!((logfact.coeff(4) - 24f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn geometric_series_on_half_circle() {
        let c = cauchy_extract(
            |z| Ok::<_, Infallible>(Complex::new(1.0, 0.0) / (Complex::new(1.0, 0.0) - z)),
            0.5,
            12,
        )
        .unwrap();
        assert!(c
            .iter()
            .all(|v| (v.re - 1.0).abs() < 1e-10 && v.im.abs() < 1e-10));
    }

    #[test]
    fn works_in_single_precision() {
        let c = cauchy_extract(|z: Complex<f32>| Ok::<_, Infallible>(z.exp()), 0.5f32, 5).unwrap();
        assert!((c[3].re - 1.0 / 6.0).abs() < 1e-5);
    }

    #[test]
    fn two_regular_graph_egf() {
        let c = cauchy_extract(
            |z: Complex<f64>| {
                let one = Complex::new(1.0, 0.0);
                Ok::<_, Infallible>((-z / 2.0 - z * z / 4.0).exp() / (one - z).sqrt())
            },
            0.5,
            8,
        )
        .unwrap();
        assert!((c[6].re - 70.0 / 720.0).abs() < 1e-9);
    }
}
