//! Truncated dense polynomial arithmetic (coefficient vectors mod `z^len`).

use crate::scalar::Coeff;

fn get<C: Coeff>(v: &[C], k: usize) -> Option<&C> {
    v.get(k).filter(|c| !c.is_zero())
}

/// `a·b mod z^len`.
pub fn mul<C: Coeff>(a: &[C], b: &[C], len: usize) -> Vec<C> {
    let mut out = vec![C::zero(); len];
    for (i, x) in a.iter().enumerate().take(len) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(len - i) {
            out[i + j].add_product(x, y);
        }
    }
    out
}

/// `1/a mod z^len`, if `a_0` is a unit.
pub fn inverse<C: Coeff>(a: &[C], len: usize) -> Option<Vec<C>> {
    let inv0 = a.first()?.inv()?;
    let mut out: Vec<C> = Vec::with_capacity(len);
    out.push(inv0.clone());
    for n in 1..len {
        let mut acc = C::zero();
        for k in 1..=n {
            if let Some(ak) = get(a, k) {
                acc.add_product(ak, &out[n - k]);
            }
        }
        out.push(acc.mul(&inv0).neg());
    }
    Some(out)
}

/// `Σ_j coeffs[j]·y^j mod z^len`.
pub fn horner<C: Coeff>(coeffs: &[Vec<C>], y: &[C], len: usize) -> Vec<C> {
    let mut acc = vec![C::zero(); len];
    for a in coeffs.iter().rev() {
        acc = mul(&acc, y, len);
        for (k, c) in a.iter().enumerate().take(len) {
            acc[k] = acc[k].add(c);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Rational};

    #[test]
    fn inverse_of_one_minus_z() {
        let inv = inverse(&[int(1), int(-1)], 6).unwrap();
        assert!(inv.iter().all(|c| *c == int(1)));
        assert_eq!(inverse::<Rational>(&[int(0), int(1)], 3), None);
        let prod = mul(&inv, &[int(1), int(-1)], 6);
        assert_eq!(prod, vec![int(1), int(0), int(0), int(0), int(0), int(0)]);
    }
}
