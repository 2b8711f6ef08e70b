use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::enumerate::{all_relations, all_teams};
use crate::oracles::{has_cycle, reachability};
use crate::structures::{team_relation, Team};
use crate::syntax::{parse_formula, Signature};
use crate::team_eval::eval_tarski;

fn sig() -> Signature {
    let mut sig = Signature::new();
    sig.add_rel("E", 2).unwrap();
    sig.add_so_rel("R", 1).unwrap();
    sig.add_so_rel("R2", 2).unwrap();
    sig
}

fn pf(text: &str) -> Formula {
    parse_formula(text, &sig()).unwrap()
}

fn graph(n: Element, edges: &[(Element, Element)]) -> Structure {
    let mut m = Structure::new(n).unwrap();
    m.add_rel(
        "E",
        Relation::from_tuples(2, edges.iter().map(|&(a, b)| vec![a, b])),
    )
    .unwrap();
    m
}

fn unary(elems: &[Element]) -> Relation {
    Relation::from_tuples(1, elems.iter().map(|&e| vec![e]))
}

const X: &[&str] = &["x"];

fn xs(vars: &[&str]) -> Vec<String> {
    vars.iter().map(|v| v.to_string()).collect()
}

#[test]
fn gamma_identity_operator() {
    let m = graph(3, &[]);
    let ctx = FixpointContext::new(&m);
    let body = pf("R(x)");
    for mask in 0u64..8 {
        let p = Relation::from_bitmask(3, 1, mask);
        assert_eq!(gamma(&ctx, &body, "R", &xs(X), &p).unwrap(), p);
    }
}

#[test]
fn gamma_successor_example() {
    let m = graph(3, &[(0, 1), (1, 0)]);
    let ctx = FixpointContext::new(&m);
    let body = pf("exists y. (E(x,y) & R(y))");
    let p = unary(&[0, 1, 2]);
    assert_eq!(
        gamma(&ctx, &body, "R", &xs(X), &p).unwrap(),
        unary(&[0, 1])
    );
}

#[test]
fn gamma_monotone_floor() {
    let m = graph(3, &[(0, 0), (1, 1), (2, 2)]);
    let ctx = FixpointContext::new(&m);
    let body = pf("E(x,x) & R(x)");
    assert_eq!(
        gamma(&ctx, &body, "R", &xs(X), &Relation::new(1)).unwrap(),
        Relation::new(1)
    );
}

#[test]
fn gamma_rejects_negative_occurrence() {
    let m = graph(2, &[]);
    let ctx = FixpointContext::new(&m);
    let body = pf("!R(x)");
    assert_eq!(
        gamma(&ctx, &body, "R", &xs(X), &Relation::new(1)),
        Err(EvalError::PositivityViolation("R".into()))
    );
}

#[test]
fn gamma_rejects_arity_mismatch() {
    let m = graph(2, &[]);
    let ctx = FixpointContext::new(&m);
    let body = pf("R(x)");
    assert!(matches!(
        gamma(&ctx, &body, "R", &xs(X), &Relation::new(2)),
        Err(EvalError::ArityMismatch { .. })
    ));
}

#[test]
fn gfp_examples() {
    // Everything is a fixed point of the identity; the greatest is all.
    let m = graph(3, &[(0, 1), (1, 0)]);
    let ctx = FixpointContext::new(&m);
    assert_eq!(
        gfp(&ctx, &pf("R(x)"), "R", &xs(X)).unwrap(),
        Relation::full(3, 1)
    );

    // E-successor body on a 2-cycle plus an isolated node.
    let body = pf("exists y. (E(x,y) & R(y))");
    assert_eq!(gfp(&ctx, &body, "R", &xs(X)).unwrap(), unary(&[0, 1]));

    // Constant-empty transformer.
    assert_eq!(
        gfp(&ctx, &pf("x != x"), "R", &xs(X)).unwrap(),
        Relation::new(1)
    );
}

#[test]
fn lfp_examples() {
    let m = graph(3, &[(0, 1), (1, 2)]);
    let ctx = FixpointContext::new(&m);
    assert_eq!(
        lfp(&ctx, &pf("R(x)"), "R", &xs(X)).unwrap(),
        Relation::new(1)
    );

    // Transitive closure of a 3-path equals the reachability oracle.
    let tc_body = pf("E(x,y) | (exists z. (E(x,z) & R2(z,y)))");
    let tc = lfp(&ctx, &tc_body, "R2", &xs(&["x", "y"])).unwrap();
    assert_eq!(tc, reachability(m.rel("E").unwrap(), 3));

    // Constant-true body fills up in one step.
    assert_eq!(
        lfp(&ctx, &pf("x = x"), "R", &xs(X)).unwrap(),
        Relation::full(3, 1)
    );
}

#[test]
fn gfp_result_is_a_fixed_point() {
    for edges in [
        vec![(0, 1), (1, 0)],
        vec![(0, 1), (1, 2), (2, 0)],
        vec![(0, 0)],
        vec![],
    ] {
        let m = graph(3, &edges);
        let ctx = FixpointContext::new(&m);
        let body = pf("exists y. (E(x,y) & R(y))");
        let fp = gfp(&ctx, &body, "R", &xs(X)).unwrap();
        assert_eq!(gamma(&ctx, &body, "R", &xs(X), &fp).unwrap(), fp);
        let lf = lfp(&ctx, &body, "R", &xs(X)).unwrap();
        assert_eq!(gamma(&ctx, &body, "R", &xs(X), &lf).unwrap(), lf);
    }
}

/// The ten-body suite used for the subset-enumeration cross-checks; unary
/// and binary bound tuples.
pub(crate) fn kt_suite_unary() -> Vec<&'static str> {
    vec![
        "R(x)",
        "x != x",
        "x = x",
        "exists y. (E(x,y) & R(y))",
        "forall y. (!E(x,y) | R(y))",
        "E(x,x) & R(x)",
        "(R(x) | E(x,x))",
    ]
}

pub(crate) fn kt_suite_binary() -> Vec<&'static str> {
    vec![
        "R2(x,y)",
        "E(x,y) | (exists z. (E(x,z) & R2(z,y)))",
        "E(x,y) & R2(y,x)",
    ]
}

fn gfp_by_subsets(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
) -> Relation {
    let n = ctx.structure().universe();
    let k = vars.len();
    let mut acc = Relation::new(k);
    for q in all_relations(n, k) {
        if q.is_subset(&gamma(ctx, body, rel, vars, &q).unwrap()) {
            acc = acc.union(&q);
        }
    }
    acc
}

fn lfp_by_subsets(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
) -> Relation {
    let n = ctx.structure().universe();
    let k = vars.len();
    let mut acc = Relation::full(n, k);
    for q in all_relations(n, k) {
        if gamma(ctx, body, rel, vars, &q).unwrap().is_subset(&q) {
            acc = acc.intersection(&q);
        }
    }
    acc
}

/// Knaster-Tarski cross-check: iteration agrees with the union/intersection
/// characterizations by exhaustive subset enumeration.
#[test]
fn knaster_tarski_cross_check() {
    for n in 1..=2u32 {
        for e in all_relations(n, 2) {
            let mut m = Structure::new(n).unwrap();
            m.add_rel("E", e).unwrap();
            let ctx = FixpointContext::new(&m);
            for text in kt_suite_unary() {
                let body = pf(text);
                let vars = xs(X);
                assert_eq!(
                    gfp(&ctx, &body, "R", &vars).unwrap(),
                    gfp_by_subsets(&ctx, &body, "R", &vars),
                    "gfp mismatch for {text} at n={n}"
                );
                assert_eq!(
                    lfp(&ctx, &body, "R", &vars).unwrap(),
                    lfp_by_subsets(&ctx, &body, "R", &vars),
                    "lfp mismatch for {text} at n={n}"
                );
            }
            for text in kt_suite_binary() {
                let body = pf(text);
                let vars = xs(&["x", "y"]);
                assert_eq!(
                    gfp(&ctx, &body, "R2", &vars).unwrap(),
                    gfp_by_subsets(&ctx, &body, "R2", &vars),
                    "gfp mismatch for {text} at n={n}"
                );
                assert_eq!(
                    lfp(&ctx, &body, "R2", &vars).unwrap(),
                    lfp_by_subsets(&ctx, &body, "R2", &vars),
                    "lfp mismatch for {text} at n={n}"
                );
            }
        }
    }
    // Universe 3, arity 1, over a sample of graphs.
    for mask in [0u64, 3, 27, 73, 146, 292, 511, 345] {
        let mut m = Structure::new(3).unwrap();
        m.add_rel("E", Relation::from_bitmask(3, 2, mask)).unwrap();
        let ctx = FixpointContext::new(&m);
        for text in kt_suite_unary() {
            let body = pf(text);
            let vars = xs(X);
            assert_eq!(
                gfp(&ctx, &body, "R", &vars).unwrap(),
                gfp_by_subsets(&ctx, &body, "R", &vars),
                "gfp mismatch for {text} at n=3 mask={mask}"
            );
        }
    }
}

#[test]
fn eval_pgfp_trivial_fixpoints() {
    let m = graph(2, &[]);
    let ctx = FixpointContext::new(&m);
    let s = Assignment::from_pairs([("y", 1u32)]);
    assert!(eval_pgfp(&ctx, &s, &pf("gfp T(x). T(x) @ (y)")).unwrap());
    assert!(!eval_pgfp(&ctx, &s, &pf("lfp T(x). T(x) @ (y)")).unwrap());
}

#[test]
fn pgfp_cycle_sentence_matches_oracle() {
    let f = pf("exists z. gfp T(x). (exists y. (E(x,y) & T(y))) @ (z)");
    for n in 1..=3u32 {
        for e in all_relations(n, 2) {
            let mut m = Structure::new(n).unwrap();
            m.add_rel("E", e.clone()).unwrap();
            let ctx = FixpointContext::new(&m);
            let got = eval_pgfp(&ctx, &Assignment::empty(), &f).unwrap();
            assert_eq!(got, has_cycle(&e, n), "n={n} E={e}");
        }
    }
}

#[test]
fn nested_fixpoints_with_outer_parameters() {
    // The inner fixed point depends on an outer quantified variable.
    let m = graph(3, &[(0, 1), (1, 2)]);
    let ctx = FixpointContext::new(&m);
    // "some y reachable from x in one step has a self-loop-free chain to z=y"
    let f = pf("exists y. (E(x,y) & (lfp T(u). (u = y | (exists w. (E(w,u) & T(w)))) @ (x)))");
    // At x=0: y must be 1; lfp contains everything reachable-from-or-equal 1
    // going forward... direct check: T = {u : u = y or some predecessor of u in T}.
    // With y=1: closure over successors of 1: {1, 2}. x=0 not in it.
    let s0 = Assignment::from_pairs([("x", 0u32)]);
    assert!(!eval_pgfp(&ctx, &s0, &f).unwrap());
    // At x=1: y=2, lfp from {2} forward: {2}; x=1 not in it? E(1,2): u=2=y in T;
    // successors of 2: none. So false as well.
    let s1 = Assignment::from_pairs([("x", 1u32)]);
    assert!(!eval_pgfp(&ctx, &s1, &f).unwrap());
    // Cross-check both against a hand Tarski unfolding at n=3: the lfp of
    // T(u) ⟸ u=y ∨ ∃w(E(w,u) ∧ T(w)) is forward-reachability from y.
    for x in 0..3u32 {
        let s = Assignment::from_pairs([("x", x)]);
        let got = eval_pgfp(&ctx, &s, &f).unwrap();
        let mut want = false;
        for y in 0..3u32 {
            if !m.rel("E").unwrap().contains(&[x, y]) {
                continue;
            }
            let mut reach = unary(&[y]);
            loop {
                let mut next = reach.clone();
                for t in m.rel("E").unwrap().iter() {
                    if reach.contains(&[t[0]]) {
                        next.insert(vec![t[1]]);
                    }
                }
                if next == reach {
                    break;
                }
                reach = next;
            }
            if reach.contains(&[x]) {
                want = true;
            }
        }
        assert_eq!(got, want, "x={x}");
    }
}

#[test]
fn lemma_gfp_half_on_sampled_teams() {
    // If every assignment of Y satisfies the body with the bound symbol
    // interpreted as Y(x̄), then Y(x̄) is contained in the gfp.
    let bodies = [
        "exists y. (E(x,y) & R(y))",
        "forall y. (!E(x,y) | R(y))",
        "R(x) | E(x,x)",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.gen_range(1..=3u32);
        let e_mask = rng.gen_range(0..(1u64 << (n * n)));
        let mut m = Structure::new(n).unwrap();
        m.add_rel("E", Relation::from_bitmask(n, 2, e_mask)).unwrap();
        let body = pf(bodies[rng.gen_range(0..bodies.len())]);
        let y_mask = rng.gen_range(0..(1u64 << n));
        let y = Team::from_rows(
            vec!["x"],
            (0..n).filter(|i| y_mask >> i & 1 == 1).map(|i| vec![i]),
        )
        .unwrap();
        let y_rel = team_relation(&m, &y, &[Term::var("x")]).unwrap();
        let me = m.with_param("R", y_rel.clone()).unwrap();
        let premise = y
            .assignments()
            .all(|s| eval_tarski(&me, &s, &body).unwrap());
        if !premise {
            continue;
        }
        let ctx = FixpointContext::new(&m);
        let fp = gfp(&ctx, &body, "R", &xs(X)).unwrap();
        assert!(
            y_rel.is_subset(&fp),
            "lemma instance failed: n={n} E-mask={e_mask} Y={y_rel} body={body}"
        );
        checked += 1;
    }
}

prop_compose! {
    fn arb_masks()(e in 0u64..512, q in 0u64..8, sub in 0u64..8) -> (u64, u64, u64) {
        (e, q, q & sub)
    }
}

proptest! {
    /// Monotonicity of the transformer on positive bodies: P ⊆ Q implies
    /// Γ(P) ⊆ Γ(Q).
    #[test]
    fn gamma_is_monotone((e_mask, q_mask, p_mask) in arb_masks(), body_idx in 0usize..4) {
        let bodies = [
            "R(x)",
            "exists y. (E(x,y) & R(y))",
            "forall y. (!E(x,y) | R(y))",
            "(R(x) & E(x,x)) | (exists y. (E(y,x) & R(y)))",
        ];
        let mut m = Structure::new(3).unwrap();
        m.add_rel("E", Relation::from_bitmask(3, 2, e_mask)).unwrap();
        let ctx = FixpointContext::new(&m);
        let body = pf(bodies[body_idx]);
        let q = Relation::from_bitmask(3, 1, q_mask);
        let p = Relation::from_bitmask(3, 1, p_mask);
        let gp = gamma(&ctx, &body, "R", &xs(X), &p).unwrap();
        let gq = gamma(&ctx, &body, "R", &xs(X), &q).unwrap();
        prop_assert!(gp.is_subset(&gq));
    }
}

/// The relational transformer agrees with a direct per-tuple Tarski
/// evaluation of the body (dual-route check on the engine internals).
#[test]
fn gamma_agrees_with_pointwise_tarski() {
    for e_mask in [0u64, 5, 100, 262, 511] {
        let mut m = Structure::new(3).unwrap();
        m.add_rel("E", Relation::from_bitmask(3, 2, e_mask)).unwrap();
        for p_mask in 0u64..8 {
            let p = Relation::from_bitmask(3, 1, p_mask);
            let ctx = FixpointContext::new(&m);
            for text in kt_suite_unary() {
                let body = pf(text);
                let fast = gamma(&ctx, &body, "R", &xs(X), &p).unwrap();
                let me = m.with_param("R", p.clone()).unwrap();
                let mut slow = Relation::new(1);
                for a in 0..3u32 {
                    let s = Assignment::from_pairs([("x", a)]);
                    if eval_tarski(&me, &s, &body).unwrap() {
                        slow.insert(vec![a]);
                    }
                }
                assert_eq!(fast, slow, "gamma mismatch for {text}, E={e_mask}, P={p}");
            }
        }
    }
}

#[test]
fn all_teams_lemma_edge_case_empty() {
    // The empty team trivially satisfies the premise; its relation is empty
    // and contained in every gfp.
    let m = graph(2, &[(0, 1)]);
    let ctx = FixpointContext::new(&m);
    let body = pf("exists y. (E(x,y) & R(y))");
    let fp = gfp(&ctx, &body, "R", &xs(X)).unwrap();
    for t in all_teams(&["x"], 2) {
        let rel = team_relation(&m, &t, &[Term::var("x")]).unwrap();
        if rel.is_empty() {
            assert!(rel.is_subset(&fp));
        }
    }
}
