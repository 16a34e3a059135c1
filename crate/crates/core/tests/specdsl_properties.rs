use anacomb_core::specdsl::{
    check_solution, compile_system, compile_to_series, parse_spec, print_spec, Card, CycleKind,
    Node, SetKeyword, SpecSystem, TableRegistry,
};
use anacomb_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..10, 1i64..6).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn card() -> impl Strategy<Value = Card> {
    (0usize..4, prop::option::of(0usize..4)).prop_map(|(lo, hi)| Card {
        min: lo,
        max: hi.map(|h| h + lo),
    })
}

fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        Just(Node::Atom),
        Just(Node::Epsilon),
        prop::sample::select(vec!["A", "B", "C"]).prop_map(Node::class),
        Just(Node::Table("T".into())),
    ];
    leaf.prop_recursive(4, 24, 4, |inner| {
        let boxed = inner.clone().prop_map(Box::new);
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Node::Union),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Node::Product),
            (boxed.clone(), card()).prop_map(|(x, c)| Node::Seq(x, c)),
            (boxed.clone(), card(), any::<bool>()).prop_map(|(x, c, m)| Node::Set(
                x,
                c,
                if m { SetKeyword::Mset } else { SetKeyword::Set }
            )),
            (boxed.clone(), card(), any::<bool>()).prop_map(|(x, c, u)| Node::Cycle(
                x,
                c,
                if u {
                    CycleKind::Undirected
                } else {
                    CycleKind::Directed
                }
            )),
            (rational(), boxed.clone()).prop_map(|(c, x)| Node::Scalar(c, x)),
            boxed.clone().prop_map(Node::Exp),
            boxed.clone().prop_map(Node::Log),
            (boxed.clone(), rational()).prop_map(|(x, r)| Node::Pow(x, r)),
            (boxed.clone(), boxed.clone()).prop_map(|(x, y)| Node::Quotient(x, y)),
            (boxed.clone(), boxed).prop_map(|(x, y)| Node::Subst(x, y)),
        ]
    })
}

fn system() -> impl Strategy<Value = SpecSystem> {
    (any::<bool>(), node(), node(), node()).prop_map(|(labelled, a, b, c)| SpecSystem {
        labelled,
        definitions: vec![("A".into(), a), ("B".into(), b), ("C".into(), c)],
    })
}

/// Small non-recursive classes with no object of size 0.
fn simple_class() -> impl Strategy<Value = String> {
    let poly = (1u32..4, 1u32..4).prop_map(|(a, b)| format!("Z^{a} + (2)*Z^{b}"));
    prop_oneof![
        poly.clone(),
        poly.clone().prop_map(|p| format!("SEQ(>=1, {p})")),
        poly.clone().prop_map(|p| format!("Z*MSET({p})")),
        poly.clone().prop_map(|p| format!("CYCLE({p})")),
        (poly, card()).prop_map(|(p, c)| format!("Z*SET({}{p})", card_text(&c))),
    ]
}

fn card_text(c: &Card) -> String {
    match c.max {
        Some(m) => format!(">={}, <={m}, ", c.min),
        None => format!(">={}, ", c.min),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_print_round_trip(s in system()) {
        let printed = print_spec(&s);
        let back = parse_spec(&printed).map_err(|e| TestCaseError::fail(format!("{e}\n{printed}")))?;
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(print_spec(&back), printed);
    }

    #[test]
    fn compile_commutes_with_union_and_product(x in simple_class(), y in simple_class(), labelled in any::<bool>()) {
        let header = if labelled { "labelled" } else { "unlabelled" };
        let text = format!("{header}\nX = {x}\nY = {y}\nS = X + Y\nP = X*Y");
        let s = parse_spec(&text).unwrap();
        let order = 12;
        let [a, b, sum, prod] = ["X", "Y", "S", "P"].map(|c| compile_to_series(&s, c, order).unwrap());
        let direct_prod = a.mul(&b);
        for n in 0..=order {
            prop_assert_eq!(sum.coeff(n), a.coeff(n) + b.coeff(n));
            prop_assert_eq!(prod.coeff(n), direct_prod.coeff(n));
        }
    }

    #[test]
    fn labelled_set_is_exponential(x in simple_class()) {
        let s = parse_spec(&format!("labelled\nX = {x}\nS = SET(X)")).unwrap();
        let a = compile_to_series(&s, "X", 10).unwrap();
        let e = compile_to_series(&s, "S", 10).unwrap();
        let direct = a.exp().unwrap();
        for n in 0..=10 {
            prop_assert_eq!(e.coeff(n), direct.coeff(n));
        }
    }

    #[test]
    fn unlabelled_set_of_one_atom_kind(k in 1usize..5) {
        // Multisets of a single object of size k.
        let s = parse_spec(&format!("M = MSET(Z^{k})")).unwrap();
        let m = compile_to_series(&s, "M", 20).unwrap();
        for n in 0..=20 {
            let expect = if n % k == 0 { 1 } else { 0 };
            prop_assert_eq!(m.coeff(n), Rational::from_integer(expect.into()));
        }
    }

    #[test]
    fn recursive_solutions_satisfy_their_equations(a in 1u32..4, m in 0usize..4, b in 0u32..3, labelled in any::<bool>()) {
        let header = if labelled { "labelled" } else { "unlabelled" };
        let pow = if b == 0 { "1".to_string() } else { format!("T^{b}") };
        let text = format!("{header}\nT = Z^{a} + Z*SEQ(<={m}, T)*{pow} + F\nF = CYCLE(>=2, T)");
        let s = parse_spec(&text).unwrap();
        let tables = TableRegistry::new();
        let sols = compile_system(&s, &tables, 15).unwrap();
        prop_assert!(check_solution(&s, &tables, &sols, 15).is_ok());
    }
}
