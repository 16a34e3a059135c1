use std::cmp::Ordering;
use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::Zero;

use super::locate::{smallest_pole, BiPoly, GfForm, PartialSums};
use super::{locate_singularity, AsymptoticForm, ScaleElement, SingularError, SingularExpansion};
use crate::scalar::{int, rational_to_f64, Rational};
use crate::series::Series;

/// Singular expansion of `g` at `rho`: the leading scale element and, when
/// the analytic prefactor's derivative is available, the next one.
pub fn singular_expansion(g: &GfForm, rho: f64) -> Result<SingularExpansion, SingularError> {
    let (mut elements, error) = raw_elements(g, rho)?;
    elements.sort_by(|a, b| b.dominance(a));
    let mut merged: Vec<ScaleElement> = Vec::new();
    for e in elements {
        match merged.last_mut() {
            Some(last) if last.dominance(&e) == Ordering::Equal => last.c += e.c,
            _ => merged.push(e),
        }
    }
    merged.retain(|e| e.c != 0.0);
    if merged.is_empty() {
        return Err(SingularError::Unsupported("no singular part at rho".into()));
    }
    let error_order = if merged.len() > 2 {
        let third = merged[2];
        merged.truncate(2);
        Some((third.alpha, third.beta))
    } else {
        error.filter(|&(a, b)| {
            merged
                .last()
                .is_some_and(|l| l.dominance(&ScaleElement::new(0.0, a, b)) == Ordering::Greater)
        })
    };
    SingularExpansion::new(rho, merged, error_order)
}

type Raw = (Vec<ScaleElement>, Option<(f64, u32)>);

fn raw_elements(g: &GfForm, rho: f64) -> Result<Raw, SingularError> {
    let same = |r: f64| (r - rho).abs() <= 1e-9 * rho;
    match g {
        GfForm::Rational { num, den } => {
            let numf: Vec<f64> = num.iter().map(rational_to_f64).collect();
            let denf: Vec<f64> = den.iter().map(rational_to_f64).collect();
            let (r, m) = smallest_pole(&numf, &denf)?;
            if !same(r) {
                return Ok((Vec::new(), None));
            }
            // D(z) ≈ D^{(m)}(ρ)/m! (-ρ)^m (1 - z/ρ)^m near ρ.
            let mut d = denf.clone();
            for _ in 0..m {
                d = d
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, c)| i as f64 * c)
                    .collect();
            }
            let dm = d.iter().rev().fold(0.0, |acc, c| acc * r + c);
            let fact: f64 = (1..=m).map(|k| k as f64).product();
            let nval = numf.iter().rev().fold(0.0, |acc, c| acc * r + c);
            let c = nval * fact / (dm * (-r).powi(m as i32));
            Ok((
                vec![ScaleElement::new(c, m as f64, 0)],
                Some((m as f64 - 1.0, 0)),
            ))
        }
        GfForm::QuasiInverse(f) => {
            let (_, d1, _) = PartialSums::new(f, 64).eval(rho);
            Ok((
                vec![ScaleElement::new(1.0 / (rho * d1), 1.0, 0)],
                Some((0.0, 0)),
            ))
        }
        GfForm::Algebraic { equation, start } => {
            let s = locate_singularity(g)?;
            if !same(s.rho) {
                return Ok((Vec::new(), None));
            }
            let _ = start;
            let tau = s.value.expect("algebraic singularities carry their value");
            let gamma = branch_amplitude(equation, s.rho, tau)?;
            Ok((
                vec![
                    ScaleElement::new(tau, 0.0, 0),
                    ScaleElement::new(-gamma, -0.5, 0),
                ],
                Some((-1.5, 0)),
            ))
        }
        GfForm::Scaled {
            prefactor,
            rho: r,
            alpha,
            beta,
        } => {
            let r = rational_to_f64(r);
            if !same(r) {
                return Ok((Vec::new(), None));
            }
            let (a0, a1, _) = PartialSums::new(prefactor, 64).eval(r);
            let alpha = rational_to_f64(alpha);
            Ok((
                vec![
                    ScaleElement::new(a0, alpha, *beta),
                    ScaleElement::new(-r * a1, alpha - 1.0, *beta),
                ],
                Some((alpha - 2.0, *beta)),
            ))
        }
        GfForm::ExpLog { log_part, rho: r } => {
            if !same(rational_to_f64(r)) {
                return Ok((Vec::new(), None));
            }
            Ok((
                vec![ScaleElement::new(exp_log_constant(log_part, r), 1.0, 0)],
                Some((0.0, 0)),
            ))
        }
        GfForm::Sum(parts) => {
            let mut all = Vec::new();
            let mut err: Option<(f64, u32)> = None;
            for p in parts {
                let (mut e, pe) = raw_elements(p, rho)?;
                all.append(&mut e);
                if let Some(pe) = pe {
                    let dominates = err.is_none_or(|(a, b)| {
                        ScaleElement::new(0.0, pe.0, pe.1).dominance(&ScaleElement::new(0.0, a, b))
                            == Ordering::Greater
                    });
                    if dominates {
                        err = Some(pe);
                    }
                }
            }
            Ok((all, err))
        }
    }
}

/// `exp(R(ρ))` where `R(z) = H(z) - log 1/(1 - z/ρ)`, summed exactly term by
/// term until the terms are negligible.
fn exp_log_constant(h: &Series<Rational>, rho: &Rational) -> f64 {
    let mut total = 0.0;
    let mut power = rho.clone();
    let mut small = 0;
    for n in 1..=4096usize {
        let term = h.coeff(n) * &power - Rational::new(1.into(), (n as i64).into());
        let t = rational_to_f64(&term);
        total += t;
        small = if t.abs() < 1e-18 * total.abs().max(1.0) {
            small + 1
        } else {
            0
        };
        if small >= 8 {
            break;
        }
        power *= rho;
    }
    total.exp()
}

/// `γ` in `y ≈ τ - γ √(1 - z/ρ)` at a simple branch point.
fn branch_amplitude(eq: &BiPoly, rho: f64, tau: f64) -> Result<f64, SingularError> {
    let fz = eq.dz().eval(rho, tau);
    let fyy = eq.dy().dy().eval(rho, tau);
    let g2 = 2.0 * rho * fz / fyy;
    if !g2.is_finite() || g2 <= 0.0 {
        return Err(SingularError::Unsupported(
            "branch point is not of square-root type".into(),
        ));
    }
    Ok(g2.sqrt())
}

/// Universal law of a simple variety of trees `y = z φ(y)`:
/// `[z^n] y ~ c ρ^{-n} n^{-3/2}` with `τ` the root of `φ(τ) = τ φ'(τ)`,
/// `ρ = τ/φ(τ)` and `c = √(φ(τ)/(2π φ''(τ)))`. Under period `p` the
/// coefficients live on `n ≡ 1 (mod p)` and are `p` times larger there.
pub fn simple_variety_asym(phi: &Series<Rational>) -> Result<AsymptoticForm, SingularError> {
    if phi.coeff(0).is_zero() {
        return Err(SingularError::Unsupported("phi(0) must be nonzero".into()));
    }
    const ORDER: usize = 256;
    let coeffs = phi.coeffs(ORDER);
    if coeffs.iter().any(|c| *c < int(0)) {
        return Err(SingularError::Unsupported(
            "phi must have nonnegative coefficients".into(),
        ));
    }
    let period = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .fold(0usize, |g, (k, _)| g.gcd(&k));
    if period == 0 {
        return Err(SingularError::NoRoot("phi is constant".into()));
    }
    let radius = if phi.as_polynomial().is_some() {
        f64::INFINITY
    } else {
        coeffs[ORDER / 2..]
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let k = (i + ORDER / 2) as f64;
                (-crate::scalar::rational_ln_abs(c) / k).exp()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut sums = PartialSums::new(phi, ORDER);
    let mut psi = |t: f64| {
        let (v, d1, d2) = sums.eval(t);
        (v - t * d1, -t * d2)
    };
    // ψ(0) = φ(0) > 0 and ψ decreases.
    let cap = 0.999 * radius;
    let mut lo = 0.0;
    let mut hi = 1.0f64.min(cap / 2.0);
    while psi(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi >= cap || hi > 1e8 {
            return Err(SingularError::NoRoot(
                "characteristic equation phi(t) = t phi'(t) has no root inside the disc of convergence".into(),
            ));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psi(mid).0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-8 * hi {
            break;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (v, d) = psi(tau);
        let step = v / d;
        tau -= step;
        if step.abs() < 1e-16 * tau {
            break;
        }
    }
    let (v, _, d2) = sums.eval(tau);
    let rho = tau / v;
    let c = (v / (2.0 * PI * d2)).sqrt();
    // c n^{-3/2} = (c Γ(-1/2)) n^{-3/2} / Γ(-1/2)
    let amplitude = -2.0 * PI.sqrt() * c;
    Ok(AsymptoticForm {
        rho,
        elements: vec![ScaleElement::new(amplitude, -0.5, 0)],
        oscillation: false,
        error_order: Some((-1.5, 0)),
        period: period as u64,
        residue: 1 % period as u64,
    })
}
