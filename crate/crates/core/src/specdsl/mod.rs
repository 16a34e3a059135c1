//! Combinatorial specifications: a small textual language for classes
//! built from union, product, sequence, set, multiset and cycle, with an
//! escape hatch for closed-form generating functions, and its translation
//! into generating-function series.
//!
//! ```text
//! labelled
//! # sets of undirected cycles of length at least three
//! G = SET((1/2)*UCYCLE(>=3, Z))
//! ```

mod ast;
mod compile;
mod parser;
mod printer;
mod validate;

pub use ast::{Card, CycleKind, Node, SetKeyword, SpecSystem};
pub use compile::{
    check_solution, compile_system, compile_to_series, compile_with_tables, counts, CompileError,
};
pub use parser::{parse_spec, parse_spec_with_externals, ParseError};
pub use printer::{print_node, print_spec};
pub use validate::{
    validate_wellfounded, validate_with_tables, Problem, TableRegistry, ValidationReport,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn binary_trees_parse_and_count() {
        let s = parse_spec("labelled B = Z + B*B").unwrap();
        assert!(s.labelled);
        assert_eq!(
            s.definitions,
            vec![(
                "B".to_string(),
                Node::Union(vec![
                    Node::Atom,
                    Node::Product(vec![Node::class("B"), Node::class("B")])
                ])
            )]
        );
        assert!(validate_wellfounded(&s).accepted);
        let b = compile_to_series(&s, "B", 6).unwrap();
        assert_eq!(b.coeff(4), int(5));
    }

    #[test]
    fn two_regular_graphs() {
        let s = parse_spec("labelled G = SET( (1/2)*UCYCLE(>=3, Z) )").unwrap();
        let report = validate_wellfounded(&s);
        assert!(report.accepted && report.warnings.is_empty(), "{report:?}");
        let g = compile_to_series(&s, "G", 8).unwrap();
        assert_eq!(g.coeff(6), ratio(70, 720));
        assert_eq!(counts(&s, &g, 6)[6], int(70));
    }

    #[test]
    fn closed_form_matches_specification() {
        let spec = parse_spec("labelled G = SET((1/2)*UCYCLE(>=3, Z))").unwrap();
        let closed = parse_spec("labelled H = EXP((1/2)*LOG(Z) - (1/2)*Z - (1/4)*Z^2)").unwrap();
        let g = compile_to_series(&spec, "G", 20).unwrap();
        let h = compile_to_series(&closed, "H", 20).unwrap();
        assert_eq!(g.coeffs(20), h.coeffs(20));
    }

    #[test]
    fn multisets_of_one_atom() {
        let s = parse_spec("M = MSET(Z)").unwrap();
        assert!(!s.labelled);
        let m = compile_to_series(&s, "M", 30).unwrap();
        assert!((0..=30).all(|n| m.coeff(n) == int(1)));
    }

    #[test]
    fn polynomial_factorisation_over_f2() {
        // Irreducible monic polynomials over F_2 by degree.
        let irreducible = [0, 2, 1, 2, 3, 6, 9, 18].iter().map(|&c| int(c)).collect();
        let mut tables = TableRegistry::new();
        tables.insert_values("I", irreducible);
        let s = parse_spec("extern I\nP = MSET(I)").unwrap();
        let p = compile_with_tables(&s, "P", 7, &tables).unwrap();
        assert_eq!(p.coeff(4), int(16));
        assert!((0..=7).all(|n| p.coeff(n) == int(1 << n)));
        let s2 = parse_spec_with_externals("P = MSET(I)", &["I"]).unwrap();
        assert_eq!(
            compile_with_tables(&s2, "P", 7, &tables).unwrap().coeffs(7),
            p.coeffs(7)
        );
        assert!(matches!(
            compile_with_tables(&s, "P", 9, &tables),
            Err(CompileError::TableTooShort { len: 8, .. })
        ));
    }

    #[test]
    fn wellfoundedness_examples() {
        let a = parse_spec("A = A").unwrap();
        let r = validate_wellfounded(&a);
        assert!(!r.accepted);
        assert_eq!(r.offending_classes(), vec!["A"]);
        assert!(matches!(
            compile_to_series(&a, "A", 3),
            Err(CompileError::Rejected(_))
        ));

        let t = parse_spec("T = Z + SUBST(T, Z^2 + Z^3)").unwrap();
        assert!(validate_wellfounded(&t).accepted);
        let series = compile_to_series(&t, "T", 12).unwrap();
        let expect = [0, 1, 1, 1, 1, 2, 2, 3, 4, 5, 8, 14, 23];
        assert!(expect
            .iter()
            .enumerate()
            .all(|(n, &e)| series.coeff(n) == int(e)));

        // Substitution by a valuation-one series keeps the self-dependency.
        assert!(!validate_wellfounded(&parse_spec("T = Z + SUBST(T, Z + Z^2)").unwrap()).accepted);
        // A nonzero constant term under SEQ is a domain error.
        let bad = validate_wellfounded(&parse_spec("S = SEQ(1 + Z)").unwrap());
        assert!(!bad.accepted);
        assert!(bad.problems[0].reason.contains("size 0"));
    }

    #[test]
    fn mutual_recursion_and_constant_terms() {
        // Plane trees and forests; F has constant term 1.
        let s = parse_spec("T = Z*F\nF = SEQ(T)").unwrap();
        let r = validate_wellfounded(&s);
        assert!(r.accepted, "{r:?}");
        let t = compile_to_series(&s, "T", 10).unwrap();
        assert_eq!(t.coeffs(6), [0, 1, 1, 2, 5, 14, 42].map(int));
        let sols = compile_system(&s, &TableRegistry::new(), 10).unwrap();
        check_solution(&s, &TableRegistry::new(), &sols, 10).unwrap();
    }

    #[test]
    fn quotient_and_power_expressions() {
        let s = parse_spec("F = Z / (1 - Z - Z^2)\nR = (1 - 4*Z)^(1/2)").unwrap();
        let f = compile_to_series(&s, "F", 10).unwrap();
        assert_eq!(f.coeff(10), int(55));
        let r = compile_to_series(&s, "R", 4).unwrap();
        assert_eq!(r.coeffs(3), vec![int(1), int(-2), int(-2), int(-4)]);
    }

    #[test]
    fn unlabelled_cycles_and_bounds() {
        // Binary necklaces.
        let s = parse_spec("N = CYCLE(Z + Z)").unwrap();
        let n = compile_to_series(&s, "N", 6).unwrap();
        assert_eq!(
            n.coeffs(6)[1..].to_vec(),
            [2, 3, 4, 6, 8, 14].map(int).to_vec()
        );
        // Multisets of exactly two positive integers: partitions into two parts.
        let s = parse_spec("I = SEQ(>=1, Z)\nP = MSET(=2, I)").unwrap();
        let p = compile_to_series(&s, "P", 10).unwrap();
        assert!((0..=10).all(|n| p.coeff(n) == int(n as i64 / 2)));
        // Compositions into at most two parts.
        let s = parse_spec("C = SEQ(<=2, SEQ(>=1, Z))").unwrap();
        let c = compile_to_series(&s, "C", 8).unwrap();
        assert_eq!(c.coeff(0), int(1));
        assert!((1..=8).all(|n| c.coeff(n) == int(n as i64)));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_spec("A = Z +\n").unwrap_err();
        assert_eq!(e.position(), (1, 8));
        let e = parse_spec("labelled\nA = Z\nB = A + C").unwrap_err();
        assert_eq!(
            e,
            ParseError::UndefinedClass {
                line: 3,
                column: 9,
                name: "C".into()
            }
        );
        let e = parse_spec("A = SEQ(>=, Z)").unwrap_err();
        assert!(matches!(
            e,
            ParseError::Cardinality {
                line: 1,
                column: 9,
                ..
            }
        ));
        let e = parse_spec("A = SEQ(>=3, <=2, Z)").unwrap_err();
        assert!(matches!(e, ParseError::Cardinality { .. }));
        let e = parse_spec("A = Z\nA = Z*Z").unwrap_err();
        assert!(matches!(e, ParseError::Duplicate { line: 2, .. }));
        assert!(parse_spec("A = Z $ Z").is_err());
    }

    #[test]
    fn printing_is_canonical() {
        let text =
            "labelled\n# comment\nG = SET((1/2)*UCYCLE(>=3, Z))  # trailing\nH = Z^2 - Z / (2)\n";
        let s = parse_spec(text).unwrap();
        let printed = print_spec(&s);
        assert_eq!(
            printed,
            "labelled\nG = SET((1/2)*UCYCLE(>=3, Z))\nH = Z*Z + (-1)*(Z / ((2)*1))\n"
        );
        assert_eq!(parse_spec(&printed).unwrap(), s);
    }
}
