use num_traits::One;
use thiserror::Error;

use super::ast::{Card, Node, SpecSystem};
use super::validate::{
    constant_of, validate_with_tables, Problem, TableLookupError, TableRegistry,
};
use crate::scalar::{int, Rational};
use crate::series::{solve_system, Series, SeriesError};
use crate::upoly::UPoly;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompileError {
    #[error("specification rejected: {}", describe(.0))]
    Rejected(Vec<Problem>),
    #[error("no class named `{0}`")]
    UnknownClass(String),
    #[error("table `{0}` was not supplied")]
    MissingTable(String),
    #[error("table `{name}` has {len} coefficients, order {order} requested")]
    TableTooShort {
        name: String,
        len: usize,
        order: usize,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn describe(problems: &[Problem]) -> String {
    problems
        .iter()
        .map(|p| format!("{}: {}", p.class, p.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

type Q = Series<Rational>;

struct Builder<'a> {
    system: &'a SpecSystem,
    tables: &'a TableRegistry,
    constants: &'a [Rational],
    views: &'a [Q],
    order: usize,
}

impl Builder<'_> {
    fn constant(&self, node: &Node) -> Rational {
        constant_of(node, self.system, self.constants, self.tables).expect("validated")
    }

    fn build(&self, node: &Node) -> Result<Q, CompileError> {
        Ok(match node {
            Node::Atom => Q::z(),
            Node::Epsilon => Q::one(),
            Node::Ref(name) => self.views[self
                .system
                .index_of(name)
                .expect("parser checked references")]
            .clone(),
            Node::Table(name) => self.tables.lookup(name, self.order).map_err(|e| match e {
                TableLookupError::Missing => CompileError::MissingTable(name.clone()),
                TableLookupError::TooShort { len } => CompileError::TableTooShort {
                    name: name.clone(),
                    len,
                    order: self.order,
                },
            })?,
            Node::Union(xs) => {
                let mut acc = Q::zero();
                for x in xs {
                    acc = acc.add(&self.build(x)?);
                }
                acc
            }
            Node::Product(xs) => {
                let mut acc = Q::one();
                for x in xs {
                    acc = acc.mul(&self.build(x)?);
                }
                acc
            }
            Node::Seq(x, card) => {
                let a = self.build(x)?;
                match card.max {
                    None => power(&a, card.min).mul(&a.quasi_inverse_unchecked()),
                    Some(m) => power_sum(&a, card.min, m, |_| Rational::one()),
                }
            }
            Node::Set(x, card, _) => {
                let a = self.build(x)?;
                if self.system.labelled {
                    truncated_family(&a, card, a.exp_unchecked(), 0, factorial_weight)
                } else if card.is_any() {
                    a.polya_set_unchecked()
                } else {
                    project_components(&lift(&a).polya_set_unchecked(), card)
                }
            }
            Node::Cycle(x, card, _) => {
                let a = self.build(x)?;
                if self.system.labelled {
                    truncated_family(&a, card, a.log_inv_unchecked(), 1, |j| {
                        Rational::new(1.into(), (j as i64).into())
                    })
                } else if card.is_any() {
                    a.polya_cycle_unchecked()
                } else {
                    project_components(&lift(&a).polya_cycle_unchecked(), card)
                }
            }
            Node::Scalar(c, x) => self.build(x)?.scale(c),
            Node::Exp(x) => self.build(x)?.exp_unchecked(),
            Node::Log(x) => self.build(x)?.log_inv_unchecked(),
            Node::Pow(x, r) => {
                let a = self.build(x)?;
                if self.constant(x).is_one() {
                    a.pow_unchecked(r)
                } else {
                    let k: usize = r.numer().try_into().expect("validated integer exponent");
                    power(&a, k)
                }
            }
            Node::Quotient(x, y) => {
                let inv0 = self.constant(y).recip();
                self.build(x)?.mul(&self.build(y)?.inverse_unchecked(inv0))
            }
            Node::Subst(f, g) => self.build(f)?.substitute_unchecked(&self.build(g)?),
        })
    }
}

fn power(a: &Q, k: usize) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc.mul(a))
}

fn factorial_weight(j: usize) -> Rational {
    let f: num_bigint::BigInt = (1..=j as u64).product();
    Rational::new(1.into(), f)
}

/// `Σ_{j=lo}^{hi} w(j) a^j`.
fn power_sum(a: &Q, lo: usize, hi: usize, w: impl Fn(usize) -> Rational) -> Q {
    let mut acc = Q::zero();
    let mut p = power(a, lo);
    for j in lo..=hi {
        acc = acc.add(&p.scale(&w(j)));
        p = p.mul(a);
    }
    acc
}

/// Restrict `full = Σ_{j>=first} w(j) a^j` to component counts in `card`
/// by inclusion–exclusion on the leading terms.
fn truncated_family(a: &Q, card: &Card, full: Q, first: usize, w: impl Fn(usize) -> Rational) -> Q {
    let lo = card.min.max(first);
    match card.max {
        Some(m) if m < lo => Q::zero(),
        Some(m) => power_sum(a, lo, m, w),
        None if lo == first => full,
        None => full.sub(&power_sum(a, first, lo - 1, w)),
    }
}

/// `a` with every object marked by `u`.
fn lift(a: &Q) -> Series<UPoly> {
    let a = a.clone();
    Series::from_fn(move |n| UPoly::monomial(a.coeff(n), 1))
}

/// Sum of the `u^j` coefficients for `j` admitted by `card`.
fn project_components(f: &Series<UPoly>, card: &Card) -> Q {
    let f = f.clone();
    let card = card.clone();
    Series::from_fn(move |n| {
        f.coeff(n)
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(j, _)| card.contains(*j))
            .map(|(_, c)| c.clone())
            .sum()
    })
}

/// Lazily solved series of every class, in definition order.
pub fn compile_system(
    system: &SpecSystem,
    tables: &TableRegistry,
    order: usize,
) -> Result<Vec<Q>, CompileError> {
    let report = validate_with_tables(system, tables);
    if !report.accepted {
        return Err(CompileError::Rejected(report.problems));
    }
    let seeds: Vec<Vec<Rational>> = report.constants.iter().map(|c| vec![c.clone()]).collect();
    let eval_order: Vec<usize> = report
        .eval_order
        .iter()
        .map(|n| system.index_of(n).expect("report names defined classes"))
        .collect();
    let mut failure = None;
    let sols = solve_system(seeds, eval_order, |views| {
        let b = Builder {
            system,
            tables,
            constants: &report.constants,
            views,
            order,
        };
        system
            .definitions
            .iter()
            .map(|(_, node)| {
                b.build(node).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    Q::zero()
                })
            })
            .collect()
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(sols),
    }
}

/// The (exponential, for labelled systems) generating function of `class`
/// truncated to `order`.
pub fn compile_to_series(
    system: &SpecSystem,
    class: &str,
    order: usize,
) -> Result<Q, CompileError> {
    compile_with_tables(system, class, order, &TableRegistry::new())
}

pub fn compile_with_tables(
    system: &SpecSystem,
    class: &str,
    order: usize,
    tables: &TableRegistry,
) -> Result<Q, CompileError> {
    let idx = system
        .index_of(class)
        .ok_or_else(|| CompileError::UnknownClass(class.to_string()))?;
    let sols = compile_system(system, tables, order)?;
    Ok(sols[idx].truncate(order))
}

/// Object counts: the coefficients themselves for unlabelled systems,
/// `n!·[z^n]` for labelled ones.
pub fn counts(system: &SpecSystem, series: &Q, order: usize) -> Vec<Rational> {
    let mut fact = int(1);
    series
        .coeffs(order)
        .into_iter()
        .enumerate()
        .map(|(n, c)| {
            if n > 0 {
                fact *= int(n as i64);
            }
            if system.labelled {
                c * &fact
            } else {
                c
            }
        })
        .collect()
}

/// Substitute the truncated solutions back into every right-hand side and
/// compare on `0..=order`. Returns the first mismatching index.
pub fn check_solution(
    system: &SpecSystem,
    tables: &TableRegistry,
    solutions: &[Q],
    order: usize,
) -> Result<(), CompileError> {
    let report = validate_with_tables(system, tables);
    let truncated: Vec<Q> = solutions.iter().map(|s| s.truncate(order)).collect();
    let b = Builder {
        system,
        tables,
        constants: &report.constants,
        views: &truncated,
        order,
    };
    for ((_, node), sol) in system.definitions.iter().zip(&truncated) {
        let image = b.build(node)?;
        if let Some(n) = (0..=order).find(|&n| image.coeff(n) != sol.coeff(n)) {
            return Err(SeriesError::NonContraction { index: n }.into());
        }
    }
    Ok(())
}
