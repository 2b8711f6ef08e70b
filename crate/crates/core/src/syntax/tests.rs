use proptest::prelude::*;

use super::*;

fn sig_graph() -> Signature {
    let mut sig = Signature::new();
    sig.add_rel("E", 2).unwrap();
    sig.add_rel("P", 1).unwrap();
    sig.add_so_rel("R", 1).unwrap();
    sig.add_so_rel("S", 1).unwrap();
    sig.add_fun("f", 1).unwrap();
    sig.add_const("c").unwrap();
    sig
}

fn p(text: &str) -> Formula {
    parse_formula(text, &sig_graph()).unwrap()
}

#[test]
fn parses_cycle_formula() {
    let f = p("exists x. exists y. ((y) <= (x) & E(x,y))");
    match &f {
        Formula::Exists(x, body) => {
            assert_eq!(x, "x");
            match body.as_ref() {
                Formula::Exists(y, inner) => {
                    assert_eq!(y, "y");
                    match inner.as_ref() {
                        Formula::And(l, r) => {
                            assert_eq!(
                                l.as_ref(),
                                &Formula::Incl {
                                    left: vec![Term::var("y")],
                                    right: vec![Term::var("x")],
                                }
                            );
                            assert_eq!(
                                r.as_ref(),
                                &Formula::rel("E", vec![Term::var("x"), Term::var("y")])
                            );
                        }
                        other => panic!("expected conjunction, got {other:?}"),
                    }
                }
                other => panic!("expected inner exists, got {other:?}"),
            }
        }
        other => panic!("expected exists, got {other:?}"),
    }
}

#[test]
fn parses_identity_equality_without_signature() {
    let f = parse_formula("x = x", &Signature::new()).unwrap();
    assert_eq!(
        f,
        Formula::Eq {
            negated: false,
            left: Term::var("x"),
            right: Term::var("x"),
        }
    );
}

#[test]
fn rejects_inclusion_tuple_length_mismatch() {
    let err = parse_formula("(x,y) <= (y)", &Signature::new()).unwrap_err();
    assert!(err.message.contains("equal length"), "{err}");
}

#[test]
fn rejects_unknown_relation() {
    let err = parse_formula("Q(x)", &Signature::new()).unwrap_err();
    assert!(err.message.contains("unknown symbol"), "{err}");
    let err = parse_formula("Q(x) & x = x", &Signature::new()).unwrap_err();
    assert!(err.message.contains("unknown symbol"), "{err}");
}

#[test]
fn rejects_arity_mismatch() {
    let err = parse_formula("E(x)", &sig_graph()).unwrap_err();
    assert!(err.message.contains("declared arity 2"), "{err}");
    let err = parse_formula("f(x,y) = x", &sig_graph()).unwrap_err();
    assert!(err.message.contains("declared arity 1"), "{err}");
}

#[test]
fn parse_reports_position() {
    let err = parse_formula("exists x. (x = x &", &sig_graph()).unwrap_err();
    assert_eq!(err.line, 1);
    assert!(err.column > 10);
}

#[test]
fn check_positive_examples() {
    let f = p("R(x) | E(x,y)");
    assert!(f.check_positive("R"));
    let f = p("!R(x)");
    assert!(!f.check_positive("R"));
    let f = p("gfp S(x). (R(x) & S(x)) @ (y)");
    assert!(f.check_positive("R"));
}

#[test]
fn check_positive_respects_fixpoint_rebinding() {
    // The negated occurrence refers to the rebound inner T, not the outer one.
    let f = p("gfp T(x). !T(x) @ (y)");
    assert!(f.check_positive("T"));
    assert!(!matches!(f.check_pgfp(), Ok(())));
}

#[test]
fn rank_examples() {
    assert_eq!(p("E(x,y)").rank().unwrap(), 0);
    assert_eq!(
        p("exists x. exists y. ((y) <= (x) & E(x,y))").rank().unwrap(),
        2
    );
    assert_eq!(p("P(x) & E(x,y)").rank().unwrap(), 0);
    assert_eq!(p("P(x) | E(x,y)").rank().unwrap(), 1);
    assert!(p("gfp T(x). T(x) @ (y)").rank().is_err());
}

#[test]
fn free_vars_examples() {
    let fv = |t: &str| {
        p(t).free_vars()
            .into_iter()
            .collect::<Vec<_>>()
            .join(",")
    };
    assert_eq!(fv("E(x,y)"), "x,y");
    assert_eq!(fv("exists y. E(x,y)"), "x");
    assert_eq!(fv("gfp T(x). E(x,x) @ (z)"), "z");
    assert_eq!(fv("f(x) = c"), "x");
}

#[test]
fn nnf_examples() {
    let f = p("!(E(x,y) | x = y)");
    assert_eq!(f.to_nnf().unwrap(), p("!E(x,y) & x != y"));

    let already = p("(!E(x,y) & x != y)");
    assert_eq!(already.to_nnf().unwrap(), already);

    let err = p("!((x) <= (y))").to_nnf().unwrap_err();
    assert_eq!(err, SyntaxError::NegatedDependencyAtom);

    let err = p("!(gfp T(x). T(x) @ (y))").to_nnf().unwrap_err();
    assert_eq!(err, SyntaxError::NegatedFixpoint);
}

#[test]
fn nnf_desugars_implication() {
    let f = p("E(x,y) -> x = y");
    assert_eq!(f.to_nnf().unwrap(), p("!E(x,y) | x = y"));
    let f = p("!(E(x,y) -> x = y)");
    assert_eq!(f.to_nnf().unwrap(), p("E(x,y) & x != y"));
}

#[test]
fn roundtrip_spec_strings() {
    for s in [
        "exists x. exists y. ((y) <= (x) & E(x,y))",
        "gfp S(x). (exists y. (E(x,y) & S(y))) @ (z)",
        "dep(x; y)",
        "excl(x,y; y,x)",
        "indep(x; y)",
        "cindep(x; y; z)",
        "forall x. (R(x) -> exists y. (R(y) & E(x,y)))",
        "!(P(x) & (exists y. E(y,y)))",
        "(f(x) = c & !P(c))",
        "lfp T(x,y). (E(x,y) | (exists z. (E(x,z) & T(z,y)))) @ (x,y)",
    ] {
        let f = parse_formula(s, &sig_graph()).unwrap();
        let printed = f.to_string();
        let reparsed = parse_formula(&printed, &sig_graph()).unwrap();
        assert_eq!(f, reparsed, "print/parse mismatch for {s} -> {printed}");
    }
}

#[test]
fn fresh_names_are_deterministic_and_avoid_inputs() {
    let mut gen = FreshNames::new();
    assert_eq!(gen.var(), "_v0");
    assert_eq!(gen.var(), "_v1");
    assert_eq!(gen.rel(), "_R0");

    let f = p("exists _v3. (_v3) <= (x)");
    let mut gen = FreshNames::avoiding([&f]);
    assert_eq!(gen.var(), "_v4");
    assert_eq!(gen.rel(), "_R0");
}

#[test]
fn substitute_var_respects_binders() {
    let f = p("(x) <= (y) & (exists x. E(x,y))");
    let g = f.substitute_var("x", &Term::var("z"));
    assert_eq!(g, p("(z) <= (y) & (exists x. E(x,y))"));

    let f = p("gfp T(x). E(x,x) @ (x)");
    let g = f.substitute_var("x", &Term::var("w"));
    assert_eq!(g, p("gfp T(x). E(x,x) @ (w)"));
}

// Random formula generation for the structural properties.

fn arb_var() -> impl Strategy<Value = String> {
    prop_oneof![Just("x".to_string()), Just("y".to_string()), Just("z".to_string())]
}

fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        arb_var().prop_map(Term::Var),
        Just(Term::Const("c".into())),
        arb_var().prop_map(|v| Term::App("f".into(), vec![Term::Var(v)])),
    ]
}

fn arb_leaf() -> impl Strategy<Value = Formula> {
    prop_oneof![
        (any::<bool>(), arb_term(), arb_term()).prop_map(|(n, l, r)| Formula::Eq {
            negated: n,
            left: l,
            right: r
        }),
        (any::<bool>(), arb_term(), arb_term()).prop_map(|(n, a, b)| Formula::Rel {
            negated: n,
            name: "E".into(),
            args: vec![a, b],
        }),
        (any::<bool>(), arb_term()).prop_map(|(n, a)| Formula::Rel {
            negated: n,
            name: "R".into(),
            args: vec![a],
        }),
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Incl {
            left: vec![a],
            right: vec![b]
        }),
        (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Dep {
            left: vec![a],
            right: vec![b]
        }),
    ]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    arb_leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (arb_var(), inner.clone()).prop_map(|(v, b)| Formula::exists(v, b)),
            (arb_var(), inner.clone()).prop_map(|(v, b)| Formula::forall(v, b)),
            (arb_var(), inner.clone(), arb_term()).prop_map(|(v, b, t)| Formula::Fix {
                op: FixOp::Gfp,
                rel: "S".into(),
                vars: vec![v],
                body: Box::new(b),
                args: vec![t],
            }),
            inner.clone().prop_map(|a| Formula::Not(Box::new(a))),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_roundtrip(f in arb_formula()) {
        let sig = sig_graph();
        let printed = f.to_string();
        let reparsed = parse_formula(&printed, &sig);
        prop_assert_eq!(reparsed.as_ref().ok(), Some(&f), "printed: {}", printed);
    }

    #[test]
    fn positivity_matches_naive_subtree_scan(f in arb_formula()) {
        // Reference: scan for a negated R-literal, treating a pre-NNF `Not`
        // as making everything below it suspect, and skipping subtrees where
        // R is rebound. The generator only rebinds S, so rebinding never
        // interferes with R here.
        fn scan(f: &Formula, under_not: bool) -> bool {
            match f {
                Formula::Rel { negated, name, .. } => {
                    name == "R" && (*negated != under_not)
                }
                Formula::Not(a) => scan(a, !under_not),
                Formula::Implies(a, b) => scan(a, !under_not) || scan(b, under_not),
                Formula::And(a, b) | Formula::Or(a, b) => {
                    scan(a, under_not) || scan(b, under_not)
                }
                Formula::Exists(_, b) | Formula::Forall(_, b) => scan(b, under_not),
                Formula::Fix { body, .. } => scan(body, under_not),
                _ => false,
            }
        }
        // `check_positive` is conservative under `Not`: any occurrence below
        // a pre-NNF negation counts as negative. Compare on NNF inputs where
        // the two notions coincide.
        if let Ok(nnf) = f.to_nnf() {
            prop_assert_eq!(nnf.check_positive("R"), !scan(&nnf, false));
        }
    }

    #[test]
    fn rank_monotone_under_embedding(f in arb_formula()) {
        if let Ok(nnf) = f.to_nnf() {
            let has_fix = nnf.rank().is_err();
            if !has_fix {
                let r = nnf.rank().unwrap();
                prop_assert_eq!(Formula::exists("x", nnf.clone()).rank().unwrap(), r + 1);
                prop_assert_eq!(Formula::forall("x", nnf.clone()).rank().unwrap(), r + 1);
                let atom = Formula::Eq {
                    negated: false,
                    left: Term::var("x"),
                    right: Term::var("x"),
                };
                prop_assert_eq!(Formula::or(nnf.clone(), atom.clone()).rank().unwrap(), r + 1);
                prop_assert!(Formula::and(nnf.clone(), atom).rank().unwrap() >= r);
            }
        }
    }
}
