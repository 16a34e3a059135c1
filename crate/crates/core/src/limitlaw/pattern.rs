use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{DistributionTable, LimitLawError};
use crate::scalar::{int, Coeff, Rational};
use crate::series::Series;
use crate::upoly::UPoly;

/// Finite-state device: `T[i][j]` is the weight (a polynomial in `u`) of one
/// step, that is one atom `z`, from state `i` to state `j`. The generating
/// function is `initial · (I - z T(u))^{-1} · final`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferModel {
    pub transitions: Vec<Vec<UPoly>>,
    pub initial: Vec<Rational>,
    pub terminal: Vec<Rational>,
}

impl TransferModel {
    pub fn states(&self) -> usize {
        self.transitions.len()
    }

    /// `T(u)` in floating point.
    pub fn matrix_at(&self, u: f64) -> Vec<Vec<f64>> {
        self.transitions
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(u)).collect())
            .collect()
    }

    /// Row sums of `T(1)` all equal to one.
    pub fn is_stochastic(&self) -> bool {
        self.transitions
            .iter()
            .all(|row| row.iter().map(|p| p.eval(&int(1))).sum::<Rational>() == int(1))
    }

    /// The bivariate generating function, one matrix-vector step per index.
    pub fn bivariate_series(&self) -> Series<UPoly> {
        let model = self.clone();
        let mut state: Vec<UPoly> = self
            .initial
            .iter()
            .map(|c| UPoly::constant(c.clone()))
            .collect();
        Series::from_fn(move |n| {
            if n > 0 {
                state = model.step(&state);
            }
            state
                .iter()
                .zip(&model.terminal)
                .fold(UPoly::zero(), |acc, (s, f)| acc.add(&s.scale(f)))
        })
    }

    fn step(&self, state: &[UPoly]) -> Vec<UPoly> {
        let mut next = vec![UPoly::zero(); self.states()];
        for (i, s) in state.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            for (j, t) in self.transitions[i].iter().enumerate() {
                next[j].add_product(s, t);
            }
        }
        next
    }
}

/// Prefix automaton of `pattern` under a memoryless source: state `j` is the
/// length of the longest prefix of the pattern ending the text read so far.
/// Steps that complete an occurrence carry a factor `u`, and overlapping
/// occurrences all count.
pub fn build_pattern_model(
    pattern: &str,
    alphabet: &[(char, Rational)],
) -> Result<TransferModel, LimitLawError> {
    let word: Vec<char> = pattern.chars().collect();
    if word.is_empty() {
        return Err(LimitLawError::EmptyPattern);
    }
    if alphabet.iter().any(|(_, p)| p.is_negative()) {
        return Err(LimitLawError::BadProbabilities(
            "negative letter probability".into(),
        ));
    }
    if alphabet.iter().map(|(_, p)| p).sum::<Rational>() != int(1) {
        return Err(LimitLawError::BadProbabilities(
            "letter probabilities must sum to 1".into(),
        ));
    }
    if let Some(c) = word.iter().find(|c| !alphabet.iter().any(|(a, _)| a == *c)) {
        return Err(LimitLawError::UnknownLetter(*c));
    }
    let m = word.len();
    let mut border = vec![0usize; m + 1];
    for i in 1..m {
        let mut k = border[i];
        while k > 0 && word[i] != word[k] {
            k = border[k];
        }
        border[i + 1] = if word[i] == word[k] { k + 1 } else { 0 };
    }
    let delta = |mut j: usize, c: char| {
        if j == m {
            j = border[m];
        }
        loop {
            if word[j] == c {
                return j + 1;
            }
            if j == 0 {
                return 0;
            }
            j = border[j];
        }
    };
    let mut transitions = vec![vec![UPoly::zero(); m + 1]; m + 1];
    for (i, row) in transitions.iter_mut().enumerate() {
        for (c, p) in alphabet {
            let j = delta(i, *c);
            let w = if j == m {
                UPoly::monomial(p.clone(), 1)
            } else {
                UPoly::constant(p.clone())
            };
            row[j].add_assign(&w);
        }
    }
    let mut initial = vec![int(0); m + 1];
    initial[0] = int(1);
    Ok(TransferModel {
        transitions,
        initial,
        terminal: vec![int(1); m + 1],
    })
}

/// Exact distributions of the marked parameter at each requested size, by
/// dynamic programming over the automaton in integer arithmetic.
pub fn pattern_distributions(
    model: &TransferModel,
    sizes: &[usize],
) -> Result<Vec<DistributionTable>, LimitLawError> {
    // Clear denominators: T = W / d with integer W.
    let d = model
        .transitions
        .iter()
        .flatten()
        .flat_map(|p| p.coeffs().iter().map(|c| c.denom().clone()))
        .fold(BigInt::one(), |acc, x| acc.lcm(&x));
    let scaled = |c: &Rational| (c * Rational::from_integer(d.clone())).to_integer();
    // (from, to, u-degree, weight)
    let mut edges: Vec<(usize, usize, usize, BigInt)> = Vec::new();
    for (i, row) in model.transitions.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            for (k, c) in p.coeffs().iter().enumerate() {
                if !Zero::is_zero(c) {
                    edges.push((i, j, k, scaled(c)));
                }
            }
        }
    }
    let lcm_init = model
        .initial
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut state: Vec<Vec<BigInt>> = model
        .initial
        .iter()
        .map(|c| vec![(c * Rational::from_integer(lcm_init.clone())).to_integer()])
        .collect();
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let mut out = BTreeMap::new();
    for n in 0..=largest {
        if n > 0 {
            let width = state.iter().map(Vec::len).max().unwrap_or(1)
                + edges.iter().map(|e| e.2).max().unwrap_or(0);
            let mut next = vec![vec![BigInt::zero(); width]; model.states()];
            for (i, j, k, w) in &edges {
                for (c, v) in state[*i].iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    if w.is_one() {
                        next[*j][c + k] += v;
                    } else {
                        next[*j][c + k] += v * w;
                    }
                }
            }
            for row in &mut next {
                while row.len() > 1 && row.last().is_some_and(Zero::is_zero) {
                    row.pop();
                }
            }
            state = next;
        }
        if sizes.contains(&n) {
            let mut weights: BTreeMap<i64, Rational> = BTreeMap::new();
            for (s, f) in state.iter().zip(&model.terminal) {
                for (c, v) in s.iter().enumerate() {
                    if !v.is_zero() {
                        *weights
                            .entry(c as i64)
                            .or_insert_with(<Rational as Zero>::zero) +=
                            Rational::from_integer(v.clone()) * f;
                    }
                }
            }
            out.insert(n, DistributionTable::from_weights(n, weights)?);
        }
    }
    Ok(sizes.iter().map(|n| out[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::series::bivariate_distribution;

    fn binary() -> Vec<(char, Rational)> {
        vec![('a', ratio(1, 2)), ('b', ratio(1, 2))]
    }

    /// Occurrences of `pattern` in every string of length `n`.
    fn exhaustive(pattern: &str, n: usize) -> BTreeMap<i64, Rational> {
        let mut w = BTreeMap::new();
        for bits in 0..1u32 << n {
            let s: String = (0..n)
                .map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' })
                .collect();
            let count = (0..=n.saturating_sub(pattern.len()))
                .filter(|&i| s[i..].starts_with(pattern))
                .count();
            *w.entry(count as i64)
                .or_insert_with(<Rational as Zero>::zero) += int(1);
        }
        w
    }

    #[test]
    fn single_letter() {
        let m = build_pattern_model("a", &binary()).unwrap();
        assert!(m.is_stochastic());
        let d = &pattern_distributions(&m, &[1]).unwrap()[0];
        assert_eq!(*d.mean(), ratio(1, 2));
    }

    #[test]
    fn matches_exhaustive_enumeration() {
        for pattern in ["aa", "aba", "abb", "aaa"] {
            let m = build_pattern_model(pattern, &binary()).unwrap();
            let sizes: Vec<usize> = (1..=9).collect();
            let tables = pattern_distributions(&m, &sizes).unwrap();
            for (n, t) in sizes.iter().zip(&tables) {
                let oracle = DistributionTable::from_weights(*n, exhaustive(pattern, *n)).unwrap();
                assert_eq!(*t, oracle, "{pattern} at {n}");
                assert_eq!(
                    bivariate_distribution(&m.bivariate_series(), *n).unwrap(),
                    oracle
                );
            }
        }
        let aa = build_pattern_model("aa", &binary()).unwrap();
        assert_eq!(
            pattern_distributions(&aa, &[2]).unwrap()[0].prob(1),
            ratio(1, 4)
        );
    }

    #[test]
    fn biased_source() {
        let m = build_pattern_model("ab", &[('a', ratio(1, 3)), ('b', ratio(2, 3))]).unwrap();
        let d = &pattern_distributions(&m, &[10]).unwrap()[0];
        assert_eq!(*d.mean(), int(9) * ratio(2, 9));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            build_pattern_model("", &binary()).unwrap_err(),
            LimitLawError::EmptyPattern
        );
        assert!(matches!(
            build_pattern_model("a", &[('a', ratio(1, 2))]),
            Err(LimitLawError::BadProbabilities(_))
        ));
        assert_eq!(
            build_pattern_model("ac", &binary()).unwrap_err(),
            LimitLawError::UnknownLetter('c')
        );
    }
}
