use num_complex::Complex64;
use serde::Serialize;

use super::SingularError;
use crate::scalar::{rational_to_f64, Rational};
use crate::series::Series;

/// Polynomial `F(z, y) = Σ_j a_j(z) y^j` with floating coefficients;
/// `coeffs[j][i]` is the coefficient of `z^i y^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    pub coeffs: Vec<Vec<f64>>,
}

fn horner(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

impl BiPoly {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        BiPoly { coeffs }
    }

    pub fn from_rational(coeffs: &[Vec<Rational>]) -> Self {
        BiPoly {
            coeffs: coeffs
                .iter()
                .map(|a| a.iter().map(rational_to_f64).collect())
                .collect(),
        }
    }

    pub fn eval(&self, z: f64, y: f64) -> f64 {
        let column: Vec<f64> = self.coeffs.iter().map(|a| horner(a, z)).collect();
        horner(&column, y)
    }

    /// `∂F/∂y`.
    pub fn dy(&self) -> BiPoly {
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a.iter().map(|c| j as f64 * c).collect())
                .collect(),
        }
    }

    /// `∂F/∂z`.
    pub fn dz(&self) -> BiPoly {
        BiPoly {
            coeffs: self.coeffs.iter().map(|a| derivative(a)).collect(),
        }
    }
}

/// Generating functions whose dominant singularity can be found from their
/// structure.
#[derive(Clone)]
pub enum GfForm {
    /// `num(z) / den(z)`.
    Rational {
        num: Vec<Rational>,
        den: Vec<Rational>,
    },
    /// `1 / (1 - f(z))` for `f` with nonnegative coefficients, `f(0) = 0`.
    QuasiInverse(Series<Rational>),
    /// The branch of `F(z, y) = 0` through `start`, continued along the
    /// positive real axis.
    Algebraic { equation: BiPoly, start: (f64, f64) },
    /// `A(z) (1 - z/ρ)^{-α} (log 1/(1 - z/ρ))^β` with `A` analytic on a disc
    /// larger than `ρ`.
    Scaled {
        prefactor: Series<Rational>,
        rho: Rational,
        alpha: Rational,
        beta: u32,
    },
    /// `exp(H(z))` with `H(z) - log 1/(1 - z/ρ)` analytic beyond `ρ`.
    ExpLog {
        log_part: Series<Rational>,
        rho: Rational,
    },
    /// A sum of the above; the smallest singularity wins.
    Sum(Vec<GfForm>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SingularityKind {
    Pole,
    SqrtBranch,
    Log,
    ExpOfLog,
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Singularity {
    pub rho: f64,
    pub kind: SingularityKind,
    /// Value of the function at the singularity, for algebraic branches.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

const TOL: f64 = 1e-12;

/// Dominant positive singularity of a structured generating function.
pub fn locate_singularity(g: &GfForm) -> Result<Singularity, SingularError> {
    let at = |rho, kind| Singularity {
        rho,
        kind,
        value: None,
    };
    match g {
        GfForm::Rational { num, den } => {
            let den: Vec<f64> = den.iter().map(rational_to_f64).collect();
            let num: Vec<f64> = num.iter().map(rational_to_f64).collect();
            Ok(at(smallest_pole(&num, &den)?.0, SingularityKind::Pole))
        }
        GfForm::QuasiInverse(f) => Ok(at(quasi_inverse_root(f)?, SingularityKind::Pole)),
        GfForm::Algebraic { equation, start } => {
            let (rho, tau) = branch_point(equation, *start)?;
            Ok(Singularity {
                rho,
                kind: SingularityKind::SqrtBranch,
                value: Some(tau),
            })
        }
        GfForm::Scaled {
            rho, alpha, beta, ..
        } => {
            let kind = if alpha.is_integer()
                && *alpha > Rational::from_integer(0.into())
                && *beta == 0
            {
                SingularityKind::Pole
            } else if alpha.is_integer() && *alpha <= Rational::from_integer(0.into()) && *beta > 0
            {
                SingularityKind::Log
            } else if *alpha.denom() == 2.into() && *beta == 0 {
                SingularityKind::SqrtBranch
            } else {
                SingularityKind::Composite
            };
            Ok(at(rational_to_f64(rho), kind))
        }
        GfForm::ExpLog { rho, .. } => Ok(at(rational_to_f64(rho), SingularityKind::ExpOfLog)),
        GfForm::Sum(parts) => {
            let found = parts
                .iter()
                .map(locate_singularity)
                .collect::<Result<Vec<_>, _>>()?;
            let rho = found.iter().map(|s| s.rho).fold(f64::INFINITY, f64::min);
            if !rho.is_finite() {
                return Err(SingularError::Unsupported("empty sum".into()));
            }
            let dominant: Vec<&Singularity> = found
                .iter()
                .filter(|s| (s.rho - rho).abs() <= TOL * rho)
                .collect();
            let kind = if dominant.len() == 1 {
                dominant[0].kind
            } else {
                SingularityKind::Composite
            };
            Ok(at(rho, kind))
        }
    }
}

/// All complex roots of a real polynomial (Durand–Kerner).
pub(crate) fn poly_roots(p: &[f64]) -> Vec<Complex64> {
    let mut p = p.to_vec();
    while p.last().is_some_and(|c| *c == 0.0) {
        p.pop();
    }
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let monic: Vec<f64> = p.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| {
        monic
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    roots
}

/// Smallest positive real zero of `den` not cancelled by `num`, with its
/// multiplicity.
pub(crate) fn smallest_pole(num: &[f64], den: &[f64]) -> Result<(f64, usize), SingularError> {
    let roots = poly_roots(den);
    let mut best: Option<f64> = None;
    for r in &roots {
        if r.re > 0.0 && r.im.abs() < 1e-7 * r.norm().max(1.0) {
            let x = newton_1d(|x| (horner(den, x), horner(&derivative(den), x)), r.re);
            if horner(num, x).abs() > 1e-9 && best.is_none_or(|b| x < b) {
                best = Some(x);
            }
        }
    }
    let rho =
        best.ok_or_else(|| SingularError::NoRoot("denominator has no positive zero".into()))?;
    if let Some(z) = roots.iter().find(|r| r.norm() < rho * (1.0 - 1e-9)) {
        return Err(SingularError::Unsupported(format!(
            "a nonreal zero {z} is closer to the origin than {rho}"
        )));
    }
    // Multiplicity: successive derivatives vanishing at ρ.
    let mut m = 0;
    let mut d = den.to_vec();
    let scale = den.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    while !d.is_empty() && horner(&d, rho).abs() < 1e-8 * scale.max(1.0) {
        m += 1;
        d = derivative(&d);
    }
    Ok((rho, m.max(1)))
}

/// Newton polish of a simple root.
fn newton_1d(f: impl Fn(f64) -> (f64, f64), mut x: f64) -> f64 {
    for _ in 0..60 {
        let (v, dv) = f(x);
        if dv == 0.0 || !v.is_finite() {
            break;
        }
        let step = v / dv;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1e-300) {
            break;
        }
    }
    x
}

/// Partial sum `Σ_{k≤N} f_k x^k` and its derivative, with `N` large enough
/// that the last retained terms are negligible at `x`.
pub(crate) struct PartialSums {
    coeffs: Vec<f64>,
    series: Series<Rational>,
}

impl PartialSums {
    pub(crate) fn new(series: &Series<Rational>, order: usize) -> Self {
        let exact = match series.as_polynomial() {
            Some(poly) => poly.to_vec(),
            None => series.coeffs(order),
        };
        PartialSums {
            coeffs: exact.iter().map(rational_to_f64).collect(),
            series: series.clone(),
        }
    }

    fn grow(&mut self) {
        let n = 2 * self.coeffs.len();
        self.coeffs = self.series.coeffs(n).iter().map(rational_to_f64).collect();
    }

    /// `(f(x), f'(x), f''(x))`; extends the partial sum until the tail is
    /// below `1e-17` relative (or the order cap is reached).
    pub(crate) fn eval(&mut self, x: f64) -> (f64, f64, f64) {
        loop {
            let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
            // powers[k] = x^k, one step behind for the derivatives
            let (mut p, mut p1, mut p2) = (1.0, 0.0, 0.0);
            let mut tail = 0.0f64;
            let len = self.coeffs.len();
            for (k, c) in self.coeffs.iter().enumerate() {
                let kf = k as f64;
                v += c * p;
                d1 += kf * c * p1;
                d2 += kf * (kf - 1.0) * c * p2;
                if k + 8 >= len {
                    tail = tail.max((kf * kf * c * p).abs());
                }
                p2 = p1;
                p1 = p;
                p *= x;
            }
            let done = tail <= 1e-17 * v.abs().max(1.0)
                || len > 4096
                || self.series.as_polynomial().is_some();
            if done {
                return (v, d1, d2);
            }
            self.grow();
        }
    }
}

/// Smallest positive root of `f(x) = 1`.
fn quasi_inverse_root(f: &Series<Rational>) -> Result<f64, SingularError> {
    if !f.coeff(0).eq(&Rational::from_integer(0.into())) {
        return Err(SingularError::Unsupported(
            "quasi-inverse needs f(0) = 0".into(),
        ));
    }
    let mut sums = PartialSums::new(f, 64);
    // Bracket: double until f(hi) > 1, staying inside the apparent radius.
    let mut hi = 1e-3;
    let mut lo = 0.0;
    loop {
        let (v, _, _) = sums.eval(hi);
        if !v.is_finite() || hi > 1e6 {
            return Err(SingularError::NoRoot("f(x) stays below 1".into()));
        }
        if v > 1.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sums.eval(mid).0 > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-6 * hi {
            break;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (v, d, _) = sums.eval(x);
        let step = (v - 1.0) / d;
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    Ok(x)
}

/// Follow the real branch of `F = 0` from `start` until `F_y` vanishes,
/// then solve `{F = 0, F_y = 0}` by Newton's method in two variables.
fn branch_point(eq: &BiPoly, start: (f64, f64)) -> Result<(f64, f64), SingularError> {
    let fy = eq.dy();
    let fz = eq.dz();
    let fyy = fy.dy();
    let fzy = fz.dy();
    let correct = |z: f64, mut y: f64| -> Option<f64> {
        for _ in 0..30 {
            let d = fy.eval(z, y);
            if d == 0.0 {
                return None;
            }
            let step = eq.eval(z, y) / d;
            y -= step;
            if step.abs() < 1e-14 * y.abs().max(1.0) {
                return Some(y);
            }
        }
        None
    };
    let (mut z, mut y) = start;
    y = correct(z, y)
        .ok_or_else(|| SingularError::NoRoot("start point is not on a regular branch".into()))?;
    let sign = fy.eval(z, y).signum();
    let mut h = 1e-3 * z.abs().max(1e-3);
    while h > 1e-9 * z.abs().max(1e-9) {
        if z > 1e6 {
            return Err(SingularError::NoRoot(
                "branch continues past z = 1e6".into(),
            ));
        }
        // Euler predictor along dy/dz = -F_z/F_y, Newton corrector.
        let slope = -fz.eval(z, y) / fy.eval(z, y);
        let (zn, guess) = (z + h, y + h * slope);
        match correct(zn, guess) {
            Some(yn)
                if fy.eval(zn, yn).signum() == sign
                    && (yn - guess).abs() < 0.1 * (1.0 + y.abs()) =>
            {
                z = zn;
                y = yn;
                h *= 1.5;
            }
            _ => h *= 0.25,
        }
    }
    // Two-dimensional Newton on (F, F_y).
    for _ in 0..100 {
        let (f, g) = (eq.eval(z, y), fy.eval(z, y));
        let (a, b, c, d) = (fz.eval(z, y), fy.eval(z, y), fzy.eval(z, y), fyy.eval(z, y));
        let det = a * d - b * c;
        if det == 0.0 {
            return Err(SingularError::NoRoot("degenerate branch point".into()));
        }
        let dz = (f * d - b * g) / det;
        let dy = (a * g - c * f) / det;
        z -= dz;
        y -= dy;
        if dz.abs().max(dy.abs()) < 1e-16 * (1.0 + z.abs() + y.abs()) {
            break;
        }
    }
    if z.is_nan() || z <= 0.0 || eq.eval(z, y).abs() > 1e-9 {
        return Err(SingularError::NoRoot(
            "branch point iteration did not converge".into(),
        ));
    }
    Ok((z, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn rational_pole() {
        let s = locate_singularity(&GfForm::Rational {
            num: vec![int(1)],
            den: vec![int(1), int(-2)],
        })
        .unwrap();
        assert!((s.rho - 0.5).abs() < 1e-15);
        assert_eq!(s.kind, SingularityKind::Pole);
        // Double pole of 1/(1-3z)^2 and a cancelled zero.
        let (rho, m) = smallest_pole(&[1.0], &[1.0, -6.0, 9.0]).unwrap();
        assert!((rho - 1.0 / 3.0).abs() < 1e-7);
        assert_eq!(m, 2);
    }

    #[test]
    fn quasi_inverse_of_fibonacci_kernel() {
        let f = Series::polynomial(vec![int(0), int(1), int(1)]);
        let s = locate_singularity(&GfForm::QuasiInverse(f)).unwrap();
        assert!((s.rho - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-14);
        // Surjections: 1/(2 - e^z) = 1/(1 - (e^z - 1)), root log 2.
        let ez = Series::<Rational>::z().exp().unwrap().sub(&Series::one());
        let s = locate_singularity(&GfForm::QuasiInverse(ez)).unwrap();
        assert!((s.rho - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn catalan_branch_point() {
        // z - y + y^2 = 0
        let eq = BiPoly::new(vec![vec![0.0, 1.0], vec![-1.0], vec![1.0]]);
        let s = locate_singularity(&GfForm::Algebraic {
            equation: eq,
            start: (0.0, 0.0),
        })
        .unwrap();
        assert!((s.rho - 0.25).abs() < 1e-14);
        assert!((s.value.unwrap() - 0.5).abs() < 1e-7);
        assert_eq!(s.kind, SingularityKind::SqrtBranch);
    }

    #[test]
    fn structural_forms() {
        let s = locate_singularity(&GfForm::Sum(vec![
            GfForm::Scaled {
                prefactor: Series::one(),
                rho: ratio(1, 2),
                alpha: int(0),
                beta: 1,
            },
            GfForm::Rational {
                num: vec![int(1)],
                den: vec![int(1), int(-1)],
            },
        ]))
        .unwrap();
        assert_eq!((s.rho, s.kind), (0.5, SingularityKind::Log));
    }
}
