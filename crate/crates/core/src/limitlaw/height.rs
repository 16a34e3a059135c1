use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::DistributionTable;
use crate::scalar::Rational;

/// `p²` truncated after degree `n`.
fn square_truncated(p: &[BigInt], n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n + 1];
    let len = p.len().min(n + 1);
    for i in 0..len {
        if p[i].is_zero() {
            continue;
        }
        let doubled = &p[i] << 1usize;
        if 2 * i <= n {
            out[2 * i] += &p[i] * &p[i];
        }
        for j in i + 1..len {
            if i + j > n {
                break;
            }
            if !p[j].is_zero() {
                out[i + j] += &doubled * &p[j];
            }
        }
    }
    out
}

/// Height of binary trees with `n` external nodes through the iteration
/// `y_0 = z`, `y_h = z + y_{h-1}²`, so that `[z^n] y_h` counts trees of
/// height at most `h` and a single external node has height 0.
///
/// Heights run up to `h_max`; any remaining mass is reported at `h_max + 1`
/// (read "taller than `h_max`").
pub fn height_distribution(n: usize, h_max: usize) -> DistributionTable {
    assert!(n >= 1, "trees have at least one external node");
    let mut y = vec![BigInt::zero(); n + 1];
    y[1] = BigInt::from(1);
    let mut weights: BTreeMap<i64, Rational> = BTreeMap::new();
    let mut below = BigInt::zero();
    // Catalan number C_{n-1} counts all trees.
    let mut total = BigInt::from(1);
    for k in 0..n.saturating_sub(1) {
        total = total * (2 * (2 * k + 1)) / (k + 2);
    }
    for h in 0..=h_max.min(n - 1) {
        if h > 0 {
            y = square_truncated(&y, n);
            y[1] += 1;
        }
        let at = &y[n] - &below;
        if !at.is_zero() {
            weights.insert(h as i64, Rational::from_integer(at));
        }
        below = y[n].clone();
        if below == total {
            break;
        }
    }
    if below != total {
        weights.insert(h_max as i64 + 1, Rational::from_integer(&total - &below));
    }
    DistributionTable::from_weights(n, weights).expect("positive tree counts")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    /// Heights of all binary trees with `n` leaves, by recursion on the root.
    fn heights(n: usize) -> Vec<usize> {
        if n == 1 {
            return vec![0];
        }
        let mut out = Vec::new();
        for left in 1..n {
            for a in heights(left) {
                for b in heights(n - left) {
                    out.push(1 + a.max(b));
                }
            }
        }
        out
    }

    #[test]
    fn matches_exhaustive_trees() {
        assert_eq!(height_distribution(1, 10).prob(0), int(1));
        // Both trees with 3 leaves have height 2.
        assert_eq!(height_distribution(3, 10).prob(2), int(1));
        for n in 1..=9 {
            let hs = heights(n);
            let d = height_distribution(n, n);
            for (h, p) in d.probabilities() {
                let count = hs.iter().filter(|&&x| x as i64 == *h).count();
                assert_eq!(*p, ratio(count as i64, hs.len() as i64), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn truncation_keeps_total_mass() {
        let d = height_distribution(8, 4);
        assert_eq!(d.total(), int(1));
        assert!(d.prob(5) > int(0));
        assert_eq!(d.prob(3), height_distribution(8, 8).prob(3));
    }
}
