use std::fmt::Write;

use super::ast::{Card, CycleKind, Node, SetKeyword, SpecSystem};
use crate::scalar::Rational;

/// Binding strength of the context a node is printed in.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Sum,
    Term,
    Factor,
}

fn literal(q: &Rational) -> String {
    if q.is_integer() {
        format!("({})", q.numer())
    } else {
        format!("({}/{})", q.numer(), q.denom())
    }
}

fn card_prefix(c: &Card) -> String {
    match (c.min, c.max) {
        (0, None) => String::new(),
        (k, Some(m)) if k == m => format!("={k}, "),
        (k, None) => format!(">={k}, "),
        (0, Some(m)) => format!("<={m}, "),
        (k, Some(m)) => format!(">={k}, <={m}, "),
    }
}

fn render(node: &Node, level: Level, out: &mut String) {
    let wrap = match node {
        Node::Union(_) => level > Level::Sum,
        Node::Product(_) | Node::Scalar(..) | Node::Quotient(..) => level > Level::Term,
        _ => false,
    };
    if wrap {
        out.push('(');
    }
    match node {
        Node::Atom => out.push('Z'),
        Node::Epsilon => out.push('1'),
        Node::Ref(name) => out.push_str(name),
        Node::Table(name) => {
            let _ = write!(out, "TABLE({name})");
        }
        Node::Union(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push_str(" + ");
                }
                render(x, Level::Term, out);
            }
        }
        Node::Product(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                render(x, Level::Factor, out);
            }
        }
        Node::Scalar(c, x) => {
            out.push_str(&literal(c));
            out.push('*');
            // A bare product continues the scaled run of factors.
            let inner = if matches!(**x, Node::Product(_)) {
                Level::Term
            } else {
                Level::Factor
            };
            render(x, inner, out);
        }
        Node::Seq(x, c) => constructor("SEQ", c, x, out),
        Node::Set(x, c, kw) => {
            let name = match kw {
                SetKeyword::Set => "SET",
                SetKeyword::Mset => "MSET",
            };
            constructor(name, c, x, out);
        }
        Node::Cycle(x, c, kind) => {
            let name = match kind {
                CycleKind::Directed => "CYCLE",
                CycleKind::Undirected => "UCYCLE",
            };
            constructor(name, c, x, out);
        }
        Node::Exp(x) => call("EXP", &[x], out),
        Node::Log(x) => call("LOG", &[x], out),
        Node::Subst(f, g) => call("SUBST", &[f, g], out),
        Node::Pow(x, r) => {
            let atomic = matches!(
                **x,
                Node::Atom
                    | Node::Epsilon
                    | Node::Ref(_)
                    | Node::Table(_)
                    | Node::Seq(..)
                    | Node::Set(..)
                    | Node::Cycle(..)
                    | Node::Exp(_)
                    | Node::Log(_)
                    | Node::Subst(..)
            );
            if atomic {
                render(x, Level::Factor, out);
            } else {
                out.push('(');
                render(x, Level::Sum, out);
                out.push(')');
            }
            out.push('^');
            out.push_str(&literal(r));
        }
        Node::Quotient(x, y) => {
            let lhs = if matches!(**x, Node::Quotient(..)) {
                Level::Factor
            } else {
                Level::Term
            };
            render(x, lhs, out);
            out.push_str(" / ");
            render(y, Level::Factor, out);
        }
    }
    if wrap {
        out.push(')');
    }
}

fn constructor(name: &str, card: &Card, x: &Node, out: &mut String) {
    let _ = write!(out, "{name}({}", card_prefix(card));
    render(x, Level::Sum, out);
    out.push(')');
}

fn call(name: &str, args: &[&Node], out: &mut String) {
    out.push_str(name);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        render(a, Level::Sum, out);
    }
    out.push(')');
}

/// Canonical text of a single right-hand side.
pub fn print_node(node: &Node) -> String {
    let mut out = String::new();
    render(node, Level::Sum, &mut out);
    out
}

/// Canonical text of a whole system; parsing it yields the same system.
pub fn print_spec(system: &SpecSystem) -> String {
    let mut out = String::from(if system.labelled {
        "labelled\n"
    } else {
        "unlabelled\n"
    });
    for (name, node) in &system.definitions {
        let _ = writeln!(out, "{name} = {}", print_node(node));
    }
    out
}
