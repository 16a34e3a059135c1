use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::ast::{Card, CycleKind, Node, SpecSystem};
use crate::scalar::{int, Rational};
use crate::series::Series;

/// Coefficient tables referenced by `TABLE(name)` leaves.
#[derive(Clone, Default)]
pub struct TableRegistry {
    tables: BTreeMap<String, TableEntry>,
}

#[derive(Clone)]
struct TableEntry {
    series: Series<Rational>,
    /// Number of known coefficients for finite tables.
    len: Option<usize>,
}

impl TableRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// A finite table; indices past its end are an error at compile time.
    pub fn insert_values(&mut self, name: &str, values: Vec<Rational>) {
        let len = values.len();
        self.tables.insert(
            name.to_string(),
            TableEntry {
                series: Series::polynomial(values),
                len: Some(len),
            },
        );
    }

    /// A table backed by a (possibly infinite) series.
    pub fn insert_series(&mut self, name: &str, series: Series<Rational>) {
        self.tables
            .insert(name.to_string(), TableEntry { series, len: None });
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tables.contains_key(name)
    }

    /// The series for `name` if it is known to `order`.
    pub(crate) fn lookup(
        &self,
        name: &str,
        order: usize,
    ) -> Result<Series<Rational>, TableLookupError> {
        let entry = self.tables.get(name).ok_or(TableLookupError::Missing)?;
        match entry.len {
            Some(len) if len <= order => Err(TableLookupError::TooShort { len }),
            _ => Ok(entry.series.clone()),
        }
    }

    fn constant(&self, name: &str) -> Rational {
        self.tables
            .get(name)
            .map(|e| e.series.coeff(0))
            .unwrap_or_else(Rational::zero)
    }

    fn valuation(&self, name: &str) -> Option<usize> {
        match self.tables.get(name) {
            None => Some(1),
            Some(e) => e
                .series
                .valuation(e.len.map_or(64, |l| l.saturating_sub(1))),
        }
    }
}

pub(crate) enum TableLookupError {
    Missing,
    TooShort { len: usize },
}

/// One failure found by [`validate_wellfounded`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Problem {
    pub class: String,
    pub reason: String,
}

/// Outcome of the well-foundedness analysis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub accepted: bool,
    pub problems: Vec<Problem>,
    pub warnings: Vec<String>,
    /// Classes ordered so that same-index dependencies point backwards.
    pub eval_order: Vec<String>,
    /// Constant terms, in definition order.
    #[serde(skip)]
    pub(crate) constants: Vec<Rational>,
}

impl ValidationReport {
    pub fn offending_classes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.problems.iter().map(|p| p.class.as_str()).collect();
        out.dedup();
        out
    }
}

/// Constant term of a right-hand side given the constant terms of the
/// classes. `Err` names a violated domain condition.
pub(crate) fn constant_of(
    node: &Node,
    system: &SpecSystem,
    consts: &[Rational],
    tables: &TableRegistry,
) -> Result<Rational, String> {
    let rec = |n: &Node| constant_of(n, system, consts, tables);
    let need_zero = |n: &Node, what: &str| -> Result<(), String> {
        if rec(n)?.is_zero() {
            Ok(())
        } else {
            Err(format!("argument of {what} has objects of size 0"))
        }
    };
    Ok(match node {
        Node::Atom => Rational::zero(),
        Node::Epsilon => Rational::one(),
        Node::Ref(name) => {
            consts[system.index_of(name).expect("parser checked references")].clone()
        }
        Node::Table(name) => tables.constant(name),
        Node::Union(xs) => xs.iter().map(rec).sum::<Result<Rational, String>>()?,
        Node::Product(xs) => xs.iter().map(rec).product::<Result<Rational, String>>()?,
        Node::Seq(x, c) => {
            need_zero(x, "SEQ")?;
            indicator(c.contains(0))
        }
        Node::Set(x, c, _) => {
            need_zero(x, "SET")?;
            indicator(c.contains(0))
        }
        Node::Cycle(x, _, _) => {
            need_zero(x, "CYCLE")?;
            Rational::zero()
        }
        Node::Scalar(c, x) => c * rec(x)?,
        Node::Exp(x) => {
            need_zero(x, "EXP")?;
            Rational::one()
        }
        Node::Log(x) => {
            need_zero(x, "LOG")?;
            Rational::zero()
        }
        Node::Pow(x, r) => {
            let b = rec(x)?;
            if b.is_one() {
                Rational::one()
            } else if r.is_integer() && !r.is_negative() {
                let k: usize = r
                    .numer()
                    .try_into()
                    .map_err(|_| "exponent too large".to_string())?;
                (0..k).fold(Rational::one(), |acc, _| acc * &b)
            } else {
                return Err("rational power needs constant term 1".into());
            }
        }
        Node::Quotient(x, y) => {
            let d = rec(y)?;
            if d.is_zero() {
                return Err("denominator has zero constant term".into());
            }
            rec(x)? / d
        }
        Node::Subst(f, g) => {
            need_zero(g, "SUBST (inner series)")?;
            rec(f)?
        }
    })
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

type Val = Option<usize>;

fn val_min(a: Val, b: Val) -> Val {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn val_mul(a: Val, b: Val) -> Val {
    Some(a?.saturating_add(b?))
}

fn val_scale(k: usize, a: Val) -> Val {
    if k == 0 {
        Some(0)
    } else {
        Some(a?.saturating_mul(k))
    }
}

/// Lower bound on the valuation (index of the first nonzero coefficient).
fn valuation_of(node: &Node, system: &SpecSystem, vals: &[Val], tables: &TableRegistry) -> Val {
    let rec = |n: &Node| valuation_of(n, system, vals, tables);
    match node {
        Node::Atom => Some(1),
        Node::Epsilon => Some(0),
        Node::Ref(name) => vals[system.index_of(name).expect("parser checked references")],
        Node::Table(name) => tables.valuation(name),
        Node::Union(xs) => xs.iter().map(rec).fold(None, val_min),
        Node::Product(xs) => xs.iter().map(rec).fold(Some(0), val_mul),
        Node::Seq(x, c) | Node::Set(x, c, _) => val_scale(c.min, rec(x)),
        Node::Cycle(x, c, _) => val_scale(c.min.max(1), rec(x)),
        Node::Scalar(c, x) => {
            if c.is_zero() {
                None
            } else {
                rec(x)
            }
        }
        Node::Exp(_) | Node::Pow(..) => Some(0),
        Node::Log(x) => rec(x),
        Node::Quotient(x, _) => rec(x),
        Node::Subst(f, g) => match (rec(f), rec(g)) {
            (Some(a), Some(b)) => Some(a.saturating_mul(b)),
            (None, _) => None,
            (Some(0), None) => Some(0),
            (Some(_), None) => None,
        },
    }
}

/// Classes whose coefficient `n` (for `n >= 1`) feeds coefficient `n` of
/// the node.
fn same_index_deps(
    node: &Node,
    system: &SpecSystem,
    consts: &[Rational],
    vals: &[Val],
    tables: &TableRegistry,
    out: &mut Vec<usize>,
) {
    let rec =
        |n: &Node, out: &mut Vec<usize>| same_index_deps(n, system, consts, vals, tables, out);
    let cst = |n: &Node| constant_of(n, system, consts, tables).unwrap_or_else(|_| int(1));
    match node {
        Node::Atom | Node::Epsilon | Node::Table(_) => {}
        Node::Ref(name) => out.push(system.index_of(name).expect("parser checked references")),
        Node::Union(xs) => xs.iter().for_each(|x| rec(x, out)),
        Node::Product(xs) => {
            let cs: Vec<Rational> = xs.iter().map(cst).collect();
            for (i, x) in xs.iter().enumerate() {
                let others_nonzero = cs.iter().enumerate().all(|(j, c)| j == i || !c.is_zero());
                if others_nonzero {
                    rec(x, out);
                }
            }
        }
        Node::Seq(x, c) | Node::Set(x, c, _) | Node::Cycle(x, c, _) => {
            if c.contains(1) {
                rec(x, out);
            }
        }
        Node::Scalar(c, x) => {
            if !c.is_zero() {
                rec(x, out);
            }
        }
        Node::Exp(x) | Node::Log(x) => rec(x, out),
        Node::Pow(x, r) => {
            if !r.is_zero() {
                rec(x, out);
            }
        }
        Node::Quotient(x, y) => {
            rec(x, out);
            if !cst(x).is_zero() {
                rec(y, out);
            }
        }
        Node::Subst(f, g) => {
            if valuation_of(g, system, vals, tables).is_none_or(|v| v <= 1) {
                rec(f, out);
            }
            rec(g, out);
        }
    }
}

/// Decide whether the system defines its coefficients uniquely by
/// iteration from the zero series. Table leaves not present in `tables`
/// are assumed to have zero constant term and valuation at least one.
pub fn validate_wellfounded(system: &SpecSystem) -> ValidationReport {
    validate_with_tables(system, &TableRegistry::new())
}

pub fn validate_with_tables(system: &SpecSystem, tables: &TableRegistry) -> ValidationReport {
    let k = system.definitions.len();
    let name = |i: usize| system.definitions[i].0.clone();
    let mut problems = Vec::new();
    let mut warnings = Vec::new();

    // Constant terms by Kleene iteration; domain errors only count once
    // the values have settled.
    let mut consts = vec![Rational::zero(); k];
    let mut settled = false;
    for _ in 0..=k + 1 {
        let next: Vec<Rational> = system
            .definitions
            .iter()
            .map(|(_, node)| {
                constant_of(node, system, &consts, tables).unwrap_or_else(|_| Rational::zero())
            })
            .collect();
        if next == consts {
            settled = true;
            break;
        }
        consts = next;
    }
    if !settled {
        for (i, (_, node)) in system.definitions.iter().enumerate() {
            let again =
                constant_of(node, system, &consts, tables).unwrap_or_else(|_| Rational::zero());
            if again != consts[i] {
                problems.push(Problem {
                    class: name(i),
                    reason: "constant term is not determined by iteration".into(),
                });
            }
        }
    }
    for (i, (_, node)) in system.definitions.iter().enumerate() {
        node.walk(&mut |n| {
            if let Err(reason) = constant_of(n, system, &consts, tables) {
                let p = Problem {
                    class: name(i),
                    reason,
                };
                if !problems.contains(&p) {
                    problems.push(p);
                }
            }
        });
    }

    // Valuation lower bounds: greatest fixed point from "empty".
    let mut vals: Vec<Val> = vec![None; k];
    for _ in 0..(4 * k + 8) {
        let next: Vec<Val> = system
            .definitions
            .iter()
            .map(|(_, node)| valuation_of(node, system, &vals, tables))
            .collect();
        if next == vals {
            break;
        }
        vals = next;
    }
    for (i, v) in vals.iter().enumerate() {
        if v.is_none() {
            warnings.push(format!("class {} is empty", name(i)));
        }
    }

    for (_, node) in &system.definitions {
        warn_unhalved_cycles(node, false, &mut warnings);
        node.walk(&mut |n| {
            if let Node::Table(t) = n {
                if !tables.contains(t) {
                    let w = format!("table {t} not supplied; assuming zero constant term");
                    if !warnings.contains(&w) {
                        warnings.push(w);
                    }
                }
            }
        });
    }

    // Same-index dependency graph must be acyclic.
    let deps: Vec<Vec<usize>> = system
        .definitions
        .iter()
        .map(|(_, node)| {
            let mut d = Vec::new();
            same_index_deps(node, system, &consts, &vals, tables, &mut d);
            d.sort_unstable();
            d.dedup();
            d
        })
        .collect();
    let (order, cyclic) = topological(&deps);
    for i in cyclic {
        problems.push(Problem {
            class: name(i),
            reason: "no valuation gain: coefficient n depends on itself".into(),
        });
    }

    ValidationReport {
        accepted: problems.is_empty(),
        problems,
        warnings,
        eval_order: order.into_iter().map(name).collect(),
        constants: consts,
    }
}

fn warn_unhalved_cycles(node: &Node, halved: bool, warnings: &mut Vec<String>) {
    match node {
        Node::Cycle(_, card, CycleKind::Undirected) if !halved => {
            let w = format!(
                "UCYCLE{} is not scaled by 1/2; it counts directed cycles",
                if card == &Card::any() {
                    String::new()
                } else {
                    " with bounds".into()
                }
            );
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
        Node::Scalar(c, x) => {
            let half = *c == Rational::new(1.into(), 2.into());
            warn_unhalved_cycles(x, half, warnings);
        }
        Node::Union(xs) | Node::Product(xs) => xs
            .iter()
            .for_each(|x| warn_unhalved_cycles(x, false, warnings)),
        Node::Seq(x, _)
        | Node::Set(x, _, _)
        | Node::Cycle(x, _, _)
        | Node::Exp(x)
        | Node::Log(x)
        | Node::Pow(x, _) => warn_unhalved_cycles(x, false, warnings),
        Node::Quotient(x, y) | Node::Subst(x, y) => {
            warn_unhalved_cycles(x, false, warnings);
            warn_unhalved_cycles(y, false, warnings);
        }
        _ => {}
    }
}

/// Dependencies-first order of the acyclic part, and the nodes lying on or
/// behind a cycle.
fn topological(deps: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
        Cyclic,
    }
    fn visit(i: usize, deps: &[Vec<usize>], mark: &mut [Mark], order: &mut Vec<usize>) -> bool {
        match mark[i] {
            Mark::Done => return true,
            Mark::Active | Mark::Cyclic => {
                mark[i] = Mark::Cyclic;
                return false;
            }
            Mark::New => {}
        }
        mark[i] = Mark::Active;
        let mut ok = true;
        for &j in &deps[i] {
            ok &= visit(j, deps, mark, order);
        }
        if ok && mark[i] == Mark::Active {
            mark[i] = Mark::Done;
            order.push(i);
            true
        } else {
            mark[i] = Mark::Cyclic;
            false
        }
    }
    let mut mark = vec![Mark::New; deps.len()];
    let mut order = Vec::new();
    for i in 0..deps.len() {
        visit(i, deps, &mut mark, &mut order);
    }
    let cyclic = (0..deps.len())
        .filter(|&i| mark[i] == Mark::Cyclic)
        .collect();
    (order, cyclic)
}
