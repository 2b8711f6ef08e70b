//! End-to-end verification suites: every headline property is checked
//! oracle-style over exhaustively enumerated small models (with documented
//! deterministic sampling where exhaustion is infeasible), plus an
//! informational performance probe of the fixed-point engine.
//!
//! The `acceptance` integration test asserts these criteria; the CLI
//! exposes them under `suite acceptance` / `suite perf`.

use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::efgame::{
    self, canonical_duplicator, choice_count, choice_function_by_index, cover_by_index,
    cover_count, empty_signature_preset, enumerate_formulas, holds_injection_invariant,
    EnumBudget, GameError, GamePosition, SolveConfig, Solver, SpoilerMove, Winner,
};
use crate::enumerate::{all_relations, all_teams};
use crate::error::EvalError;
use crate::fixpoint::{eval_pgfp, gamma, gfp, lfp, FixpointContext};
use crate::oracles::{agap_player1_wins, has_cycle};
use crate::structures::{team_relation, Assignment, Element, Relation, Structure, Team};
use crate::syntax::{parse_formula, Formula, Signature, Term};
use crate::team_eval::{eval_flat, eval_naive, eval_naive_opts, NaiveOptions};
use crate::translate::{
    gfp_inc_both_sides, gfp_to_inc_sentence, inc_gfp_both_sides, myopic_both_sides,
    wrap_sentence_inc_to_gfp,
};

/// Outcome of one criterion run.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    /// Informational entries report numbers without gating.
    pub informational: bool,
    pub detail: String,
    pub millis: u128,
}

impl CriterionResult {
    fn finish(id: u32, name: &str, started: Instant, outcome: Result<String, String>) -> Self {
        let millis = started.elapsed().as_millis();
        match outcome {
            Ok(detail) => CriterionResult {
                id,
                name: name.to_string(),
                passed: true,
                informational: false,
                detail,
                millis,
            },
            Err(detail) => CriterionResult {
                id,
                name: name.to_string(),
                passed: false,
                informational: false,
                detail,
                millis,
            },
        }
    }
}

pub const CYCLE_INCL_SENTENCE: &str = "exists x. exists y. ((y) <= (x) & E(x,y))";
pub const CYCLE_PGFP_SENTENCE: &str =
    "exists z. gfp T(x). (exists y. (E(x,y) & T(y))) @ (z)";
pub const AGAP_INCL_SENTENCE: &str = "exists w. ((exists u. (P(u) & (u) <= (w))) & (forall u. (E(w,u) -> (exists v. (E(u,v) & (v) <= (w))))))";

/// Signature with one binary relation, the enumeration vocabulary for most
/// criteria.
pub fn graph_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_rel("E", 2).expect("fresh");
    sig
}

fn agap_signature() -> Signature {
    let mut sig = Signature::new();
    sig.add_rel("E", 2).expect("fresh");
    sig.add_rel("P", 1).expect("fresh");
    sig
}

fn graph_model(n: Element, e: Relation) -> Structure {
    let mut m = Structure::new(n).expect("n >= 1");
    m.add_rel("E", e).expect("fresh");
    m
}

/// A formula of the curated suites with its feasibility caps for the
/// brute-force engine: the largest team evaluated at universe <= 2, and
/// the largest sampled-team size at universe 3. Disjunctions inside
/// quantifier scope and stacked existentials multiply the definitional
/// enumeration, so those shapes carry tighter caps.
#[derive(Debug, Clone, Copy)]
pub struct SuiteFormula {
    pub text: &'static str,
    pub max_rows_small: usize,
    pub max_rows_large: usize,
}

const fn light(text: &'static str) -> SuiteFormula {
    SuiteFormula {
        text,
        max_rows_small: usize::MAX,
        max_rows_large: 3,
    }
}

const fn heavy(text: &'static str) -> SuiteFormula {
    SuiteFormula {
        text,
        max_rows_small: 3,
        max_rows_large: 1,
    }
}

const fn capped(text: &'static str, small: usize, large: usize) -> SuiteFormula {
    SuiteFormula {
        text,
        max_rows_small: small,
        max_rows_large: large,
    }
}

/// The inclusion-logic suite: every translation case (literals, inclusion
/// atoms over assorted term tuples, conjunction, disjunction, both
/// quantifiers, and nested quantification over inclusion atoms).
pub fn incl_suite() -> Vec<SuiteFormula> {
    vec![
        light("E(x,y)"),
        light("!E(y,x)"),
        light("x = y"),
        light("x != y"),
        light("x = x"),
        light("!E(x,x)"),
        light("(x) <= (y)"),
        light("(y) <= (x)"),
        light("(x,y) <= (y,x)"),
        light("(x,x) <= (x,y)"),
        light("(x,y) <= (x,x)"),
        light("(E(x,y) & (x) <= (y))"),
        light("(E(x,y) | x = y)"),
        light("((x) <= (y) | (y) <= (x))"),
        light("((x) <= (y) & (y) <= (x))"),
        light("((x) <= (y) & (E(x,y) | E(y,x)))"),
        light("exists z. (z) <= (x)"),
        light("exists z. (E(x,z) & (z) <= (y))"),
        light("exists z. ((z) <= (x) & E(z,y))"),
        light("exists z. ((x,z) <= (y,x) & E(z,z))"),
        light("(E(x,x) | (exists z. (z,x) <= (x,y)))"),
        light("forall z. ((x) <= (z) | E(z,z))"),
        light("forall z. (E(z,x) | (z) <= (y))"),
        heavy("exists z. exists w. (E(z,w) & (w,z) <= (x,y))"),
        heavy("exists z. ((z) <= (y) & (exists w. ((w) <= (x) & E(z,w))))"),
        heavy("forall z. (exists w. (E(z,w) & (w) <= (x)))"),
        heavy("exists z. (forall w. ((z) <= (x) & (w,z) <= (y,x)))"),
    ]
}

/// Positive-occurrence first-order suite for the reverse translation:
/// `(formula, relation symbol, team tuple)`. The reverse translation
/// stores team values behind an extra existential per disjunction, so
/// disjunction shapes carry tight caps.
pub fn positive_fo_suite() -> Vec<(SuiteFormula, &'static str, &'static [&'static str])> {
    vec![
        (light("R(x)"), "R", &["x"]),
        (light("R(y)"), "R", &["x"]),
        (light("E(x,y)"), "R", &["x"]),
        (light("!E(x,y)"), "R", &["x"]),
        (light("x = y"), "R", &["x"]),
        (light("x != x"), "R", &["x"]),
        (light("R(x) & E(x,y)"), "R", &["x"]),
        (light("R(x) & R(y)"), "R", &["x"]),
        (light("forall z. R(z)"), "R", &["x"]),
        (light("forall z. (R(z) & E(z,x))"), "R", &["x"]),
        (light("exists z. (R(z) & E(x,z))"), "R", &["x"]),
        (heavy("exists z. exists w. (E(z,w) & R(w))"), "R", &["x"]),
        (heavy("R(x) | E(x,y)"), "R", &["x"]),
        (heavy("R(x) | R(y)"), "R", &["x"]),
        (heavy("E(x,y) | E(y,x)"), "R", &["x"]),
        (capped("forall z. (!E(x,z) | R(z))", 1, 0), "R", &["x"]),
        (light("R2(y,x)"), "R2", &["x", "y"]),
        (light("exists z. (E(x,z) & R2(z,y))"), "R2", &["x", "y"]),
        (capped("R2(x,y) | E(x,y)", 2, 0), "R2", &["x", "y"]),
    ]
}

/// First-order suite for the flatness check.
pub fn fo_suite() -> Vec<&'static str> {
    vec![
        "E(x,y)",
        "!E(y,x)",
        "x = y",
        "x != y",
        "(E(x,y) | x = y)",
        "(E(x,x) & x != y)",
        "exists z. (E(x,z) & E(z,y))",
        "forall z. (E(z,x) | z = y)",
        "exists z. (E(x,z) | E(z,y))",
        "exists z. (forall w. (E(z,w) & w != z))",
    ]
}

/// Fixed-point bodies for the subset-characterization cross-checks.
pub fn fixpoint_bodies_unary() -> Vec<&'static str> {
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

pub fn fixpoint_bodies_binary() -> Vec<&'static str> {
    vec![
        "R2(x,y)",
        "E(x,y) | (exists z. (E(x,z) & R2(z,y)))",
        "E(x,y) & R2(y,x)",
    ]
}

/// Myopic sentences for the compiler check.
pub fn myopic_suite() -> Vec<&'static str> {
    vec![
        "forall x. (R(x) -> exists y. (R(y) & E(x,y)))",
        "forall x. (R(x) -> x = x)",
        "forall x. (R(x) -> exists y. (E(x,y) & E(y,x)))",
        "forall x. (R(x) -> forall y. (!E(x,y) | R(y)))",
        "forall x. (R(x) -> (E(x,x) | (exists y. (R(y) & E(y,x)))))",
    ]
}

fn suite_sig() -> Signature {
    let mut sig = graph_signature();
    sig.add_so_rel("R", 1).expect("fresh");
    sig.add_so_rel("R2", 2).expect("fresh");
    sig
}

fn parse(text: &str) -> Formula {
    parse_formula(text, &suite_sig())
        .unwrap_or_else(|e| panic!("suite formula `{text}` failed to parse: {e}"))
}

/// Deterministically sampled teams over `domain` at universe size `n`:
/// `per_size` teams for each row count in `sizes`.
fn sampled_teams(
    domain: &[&str],
    n: Element,
    sizes: &[usize],
    per_size: usize,
    seed: u64,
) -> Vec<Team> {
    let rows = crate::enumerate::all_rows(n, domain.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for &size in sizes {
        for _ in 0..per_size {
            let mut picked: Vec<usize> = Vec::new();
            while picked.len() < size.min(rows.len()) {
                let i = rng.gen_range(0..rows.len());
                if !picked.contains(&i) {
                    picked.push(i);
                }
            }
            out.push(
                Team::from_rows(
                    domain.to_vec(),
                    picked.iter().map(|&i| rows[i].clone()),
                )
                .expect("valid rows"),
            );
        }
    }
    out
}

// ----------------------------------------------------------------------
// Criterion 1: inclusion-to-fixed-point contract.
// ----------------------------------------------------------------------

pub fn run_inc_to_gfp_contract() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut checks = 0u64;
        for sf in incl_suite() {
            let f = parse(sf.text);
            // Universe <= 2: all models, all 2-variable teams (up to the
            // formula's feasibility cap).
            for n in 1..=2u32 {
                for e in all_relations(n, 2) {
                    let m = graph_model(n, e);
                    for x in all_teams(&["x", "y"], n) {
                        if x.len() > sf.max_rows_small {
                            continue;
                        }
                        let (naive, translated) = inc_gfp_both_sides(&m, &x, &f, opts())
                            .map_err(|e| format!("{}: {e}", sf.text))?;
                        if naive != translated {
                            return Err(format!(
                                "mismatch for `{}` at n={n}, E={}, team {x}: naive={naive} translated={translated}",
                                sf.text,
                                m.rel("E").unwrap()
                            ));
                        }
                        checks += 1;
                    }
                }
            }
            // Universe 3: sampled models and teams.
            let sizes: Vec<usize> = (0..=sf.max_rows_large).collect();
            let teams = sampled_teams(&["x", "y"], 3, &sizes, 2, 0xC1);
            let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
            for _ in 0..24 {
                let e = Relation::from_bitmask(3, 2, rng.gen_range(0..512));
                let m = graph_model(3, e);
                for x in &teams {
                    let (naive, translated) = inc_gfp_both_sides(&m, x, &f, opts())
                        .map_err(|e| format!("{}: {e}", sf.text))?;
                    if naive != translated {
                        return Err(format!(
                            "mismatch for `{}` at n=3, E={}, team {x}",
                            sf.text,
                            m.rel("E").unwrap()
                        ));
                    }
                    checks += 1;
                }
            }
        }
        Ok(format!(
            "{} formulas, {checks} (model, team) checks, exact agreement",
            incl_suite().len()
        ))
    })();
    CriterionResult::finish(1, "inclusion-to-fixed-point contract", started, outcome)
}

fn opts() -> NaiveOptions {
    NaiveOptions::default()
}

// ----------------------------------------------------------------------
// Criterion 2: first-order-to-inclusion contract.
// ----------------------------------------------------------------------

pub fn run_gfp_to_inc_contract() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut checks = 0u64;
        for (sf, rel, tuple) in positive_fo_suite() {
            let eta = parse(sf.text);
            let tuple: Vec<String> = tuple.iter().map(|s| s.to_string()).collect();
            for n in 1..=2u32 {
                for e in all_relations(n, 2) {
                    let m = graph_model(n, e);
                    for x in all_teams(&["x", "y"], n) {
                        if x.len() > sf.max_rows_small {
                            continue;
                        }
                        let (team_side, point_side) =
                            gfp_inc_both_sides(&m, &x, &eta, rel, &tuple, opts())
                                .map_err(|e| format!("{}: {e}", sf.text))?;
                        if team_side != point_side {
                            return Err(format!(
                                "mismatch for `{}` at n={n}, E={}, team {x}",
                                sf.text,
                                m.rel("E").unwrap()
                            ));
                        }
                        checks += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{} formulas, {checks} (model, team) checks, exact agreement",
            positive_fo_suite().len()
        ))
    })();
    CriterionResult::finish(2, "first-order-to-inclusion contract", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 3: the cycle sentence, both translation directions, against
// the graph oracle.
// ----------------------------------------------------------------------

pub fn run_cycle_sentence() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let incl = parse(CYCLE_INCL_SENTENCE);
        let wrapped =
            wrap_sentence_inc_to_gfp(&incl).map_err(|e| format!("wrap failed: {e}"))?;
        let pgfp = parse(CYCLE_PGFP_SENTENCE);
        let unwrapped =
            gfp_to_inc_sentence(&pgfp).map_err(|e| format!("normal-form translation: {e}"))?;
        // The reverse-translated sentence stacks three existentials, which
        // outgrows the brute-force guards at universe 3; there it is
        // checked through the round trip back into the fixed-point engine.
        let rewrapped =
            wrap_sentence_inc_to_gfp(&unwrapped).map_err(|e| format!("round trip: {e}"))?;
        let mut checks = 0u64;
        for n in 1..=3u32 {
            for e in all_relations(n, 2) {
                let want = has_cycle(&e, n);
                let m = graph_model(n, e);
                let ctx = FixpointContext::new(&m);
                let via_naive = eval_naive(&m, &Team::singleton_empty(), &incl)
                    .map_err(|e| e.to_string())?;
                if via_naive != want {
                    return Err(format!(
                        "team-semantics evaluation disagrees with the cycle oracle at n={n}, E={}",
                        m.rel("E").unwrap()
                    ));
                }
                let via_wrap = eval_pgfp(&ctx, &Assignment::empty(), &wrapped)
                    .map_err(|e| e.to_string())?;
                if via_wrap != want {
                    return Err(format!(
                        "wrapped sentence disagrees with the cycle oracle at n={n}, E={}",
                        m.rel("E").unwrap()
                    ));
                }
                if n <= 2 {
                    let via_incl = eval_naive(&m, &Team::singleton_empty(), &unwrapped)
                        .map_err(|e| e.to_string())?;
                    if via_incl != want {
                        return Err(format!(
                            "normal-form translation disagrees with the cycle oracle at n={n}, E={}",
                            m.rel("E").unwrap()
                        ));
                    }
                }
                let via_roundtrip = eval_pgfp(&ctx, &Assignment::empty(), &rewrapped)
                    .map_err(|e| e.to_string())?;
                if via_roundtrip != want {
                    return Err(format!(
                        "round-tripped sentence disagrees with the cycle oracle at n={n}, E={}",
                        m.rel("E").unwrap()
                    ));
                }
                checks += 1;
            }
        }
        Ok(format!(
            "{checks} digraphs (all n <= 3): team semantics, both translation directions, and the round trip match the cycle oracle (reverse direction brute-forced at n <= 2)"
        ))
    })();
    CriterionResult::finish(3, "cycle sentence vs graph oracle", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 4: the alternating-game sentence against the game oracle.
// ----------------------------------------------------------------------

pub fn run_agap_sentence() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let raw = parse_formula(AGAP_INCL_SENTENCE, &agap_signature())
            .map_err(|e| format!("parse: {e}"))?;
        let psi = raw.to_nnf().map_err(|e| format!("nnf: {e}"))?;
        let wrapped = wrap_sentence_inc_to_gfp(&psi).map_err(|e| format!("wrap: {e}"))?;
        let mut checks = 0u64;
        for n in 1..=3u32 {
            for p_rel in all_relations(n, 1) {
                for e_rel in all_relations(n, 2) {
                    let want = agap_player1_wins(&p_rel, &e_rel, n);
                    let mut m = Structure::new(n).expect("n >= 1");
                    m.add_rel("E", e_rel).expect("fresh");
                    m.add_rel("P", p_rel.clone()).expect("fresh");
                    let ctx = FixpointContext::new(&m);
                    let via_gfp = eval_pgfp(&ctx, &Assignment::empty(), &wrapped)
                        .map_err(|e| e.to_string())?;
                    if via_gfp != want {
                        return Err(format!(
                            "translated evaluation disagrees with the game oracle at n={n}, P={}, E={}",
                            m.rel("P").unwrap(),
                            m.rel("E").unwrap()
                        ));
                    }
                    // The naive engine stays feasible up to universe 2.
                    if n <= 2 {
                        let via_naive = eval_naive(&m, &Team::singleton_empty(), &psi)
                            .map_err(|e| e.to_string())?;
                        if via_naive != want {
                            return Err(format!(
                                "naive evaluation disagrees with the game oracle at n={n}, P={}, E={}",
                                m.rel("P").unwrap(),
                                m.rel("E").unwrap()
                            ));
                        }
                    }
                    checks += 1;
                }
            }
        }
        Ok(format!(
            "{checks} (P, E) instances (all n <= 3), translated evaluation matches the game oracle; naive engine cross-checked at n <= 2"
        ))
    })();
    CriterionResult::finish(4, "alternating-game sentence vs game oracle", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 5: flatness of first-order formulas.
// ----------------------------------------------------------------------

pub fn run_flatness() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut checks = 0u64;
        for text in fo_suite() {
            let f = parse(text);
            for n in 1..=2u32 {
                for e in all_relations(n, 2) {
                    let m = graph_model(n, e);
                    for x in all_teams(&["x", "y"], n) {
                        let naive =
                            eval_naive_opts(&m, &x, &f, opts()).map_err(|e| e.to_string())?;
                        let flat = eval_flat(&m, &x, &f).map_err(|e| e.to_string())?;
                        if naive != flat {
                            return Err(format!(
                                "flatness fails for `{text}` at n={n}, E={}, team {x}",
                                m.rel("E").unwrap()
                            ));
                        }
                        checks += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{} first-order formulas, {checks} checks, team = pointwise everywhere",
            fo_suite().len()
        ))
    })();
    CriterionResult::finish(5, "first-order flatness", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 6: union closure and the empty team property.
// ----------------------------------------------------------------------

pub fn run_union_and_empty_team() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut union_checks = 0u64;
        let mut empty_checks = 0u64;
        let n = 2u32;
        for sf in incl_suite() {
            let f = parse(sf.text);
            for e in all_relations(n, 2) {
                let m = graph_model(n, e);
                // Empty team property.
                let empty = Team::new(vec!["x", "y"]).expect("fresh domain");
                if !eval_naive_opts(&m, &empty, &f, opts()).map_err(|e| e.to_string())? {
                    return Err(format!("empty team fails `{}`", sf.text));
                }
                empty_checks += 1;
                // Union closure over all satisfying pairs (within the
                // formula's feasibility cap).
                let teams = all_teams(&["x", "y"], n);
                let mut sat = Vec::new();
                for x in &teams {
                    if x.len() > sf.max_rows_small {
                        continue;
                    }
                    if eval_naive_opts(&m, x, &f, opts()).map_err(|e| e.to_string())? {
                        sat.push(x);
                    }
                }
                for a in &sat {
                    for b in &sat {
                        let u = a.union(b).expect("same domain");
                        if !eval_naive_opts(&m, &u, &f, opts()).map_err(|e| e.to_string())? {
                            return Err(format!(
                                "union closure fails for `{}` at E={}: {a} + {b}",
                                sf.text,
                                m.rel("E").unwrap()
                            ));
                        }
                        union_checks += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{union_checks} satisfying-pair unions closed, {empty_checks} empty-team checks"
        ))
    })();
    CriterionResult::finish(6, "union closure and empty team property", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 7: fixed points vs subset characterizations; the team/fixpoint
// lemma on sampled instances.
// ----------------------------------------------------------------------

pub fn run_fixpoint_correctness() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut checks = 0u64;
        let unary: Vec<Formula> = fixpoint_bodies_unary().iter().map(|t| parse(t)).collect();
        let binary: Vec<Formula> = fixpoint_bodies_binary().iter().map(|t| parse(t)).collect();
        let x1 = vec!["x".to_string()];
        let x2 = vec!["x".to_string(), "y".to_string()];
        for n in 1..=2u32 {
            for e in all_relations(n, 2) {
                let m = graph_model(n, e);
                let ctx = FixpointContext::new(&m);
                for body in &unary {
                    verify_subset_characterization(&ctx, body, "R", &x1)?;
                    checks += 1;
                }
                for body in &binary {
                    verify_subset_characterization(&ctx, body, "R2", &x2)?;
                    checks += 1;
                }
            }
        }
        for mask in 0..512u64 {
            let m = graph_model(3, Relation::from_bitmask(3, 2, mask));
            let ctx = FixpointContext::new(&m);
            for body in &unary {
                verify_subset_characterization(&ctx, body, "R", &x1)?;
                checks += 1;
            }
        }

        // Sampled instances of the gfp half of the team/fixpoint lemma.
        let mut rng = ChaCha8Rng::seed_from_u64(0x31A);
        let mut lemma_checks = 0u64;
        while lemma_checks < 100 {
            let n = rng.gen_range(1..=3u32);
            let e = Relation::from_bitmask(n, 2, rng.gen_range(0..(1u64 << (n * n))));
            let m = graph_model(n, e);
            let body = &unary[rng.gen_range(0..unary.len())];
            let y_mask = rng.gen_range(0..(1u64 << n));
            let y = Team::from_rows(
                vec!["x"],
                (0..n).filter(|i| y_mask >> i & 1 == 1).map(|i| vec![i]),
            )
            .expect("valid rows");
            let y_rel = team_relation(&m, &y, &[Term::var("x")]).map_err(|e| e.to_string())?;
            let ctx = FixpointContext::new(&m);
            let gamma_y =
                gamma(&ctx, body, "R", &x1, &y_rel).map_err(|e| e.to_string())?;
            if !y_rel.is_subset(&gamma_y) {
                continue; // premise fails; sample again
            }
            let fp = gfp(&ctx, body, "R", &x1).map_err(|e| e.to_string())?;
            if !y_rel.is_subset(&fp) {
                return Err(format!(
                    "lemma instance failed: n={n}, body `{body}`, Y={y_rel}"
                ));
            }
            lemma_checks += 1;
        }
        Ok(format!(
            "{checks} subset-characterization checks, {lemma_checks} lemma instances"
        ))
    })();
    CriterionResult::finish(7, "fixed points vs subset characterizations", started, outcome)
}

fn verify_subset_characterization(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
) -> Result<(), String> {
    let n = ctx.structure().universe();
    let k = vars.len();
    let mut union = Relation::new(k);
    let mut inter = Relation::full(n, k);
    for q in all_relations(n, k) {
        let gq = gamma(ctx, body, rel, vars, &q).map_err(|e| e.to_string())?;
        if q.is_subset(&gq) {
            union = union.union(&q);
        }
        if gq.is_subset(&q) {
            inter = inter.intersection(&q);
        }
    }
    let got_gfp = gfp(ctx, body, rel, vars).map_err(|e| e.to_string())?;
    if got_gfp != union {
        return Err(format!(
            "gfp differs from the union characterization for `{body}` (n={n})"
        ));
    }
    let got_lfp = lfp(ctx, body, rel, vars).map_err(|e| e.to_string())?;
    if got_lfp != inter {
        return Err(format!(
            "lfp differs from the intersection characterization for `{body}` (n={n})"
        ));
    }
    Ok(())
}

// ----------------------------------------------------------------------
// Criterion 8: the myopic compiler.
// ----------------------------------------------------------------------

pub fn run_myopic_compiler() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut checks = 0u64;
        for text in myopic_suite() {
            let phi = parse(text);
            for n in 1..=3u32 {
                for e in all_relations(n, 2) {
                    let m = graph_model(n, e);
                    for x in all_teams(&["x"], n) {
                        let (team_side, sentence_side) =
                            myopic_both_sides(&m, &x, &phi, opts())
                                .map_err(|e| format!("{text}: {e}"))?;
                        if team_side != sentence_side {
                            return Err(format!(
                                "mismatch for `{text}` at n={n}, E={}, team {x}",
                                m.rel("E").unwrap()
                            ));
                        }
                        checks += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{} myopic sentences, {checks} (model, team) checks, exact agreement",
            myopic_suite().len()
        ))
    })();
    CriterionResult::finish(8, "myopic sentence compiler", started, outcome)
}

// ----------------------------------------------------------------------
// Criterion 9: game solver vs bounded formula search; the canonical
// strategy replay.
// ----------------------------------------------------------------------

pub fn run_efgame_correspondence() -> CriterionResult {
    let started = Instant::now();
    let outcome = (|| {
        let mut positions = 0u64;
        // Both directions over all empty-signature positions with
        // universes <= 2 and one round, for domains of 0, 1, 2 variables.
        let domains: [&[&str]; 3] = [&[], &["x"], &["x", "y"]];
        for (na, nb) in [(1u32, 1), (1, 2), (2, 1), (2, 2)] {
            let a = Arc::new(Structure::new(na).expect("n >= 1"));
            let b = Arc::new(Structure::new(nb).expect("n >= 1"));
            for domain in domains {
                let free: Vec<String> = domain.iter().map(|s| s.to_string()).collect();
                let extra = vec!["_q0".to_string()];
                let budget = EnumBudget {
                    max_rank: 1,
                    max_conj: 3,
                    max_formulas: 400_000,
                    ..Default::default()
                };
                let formulas = enumerate_formulas(&a, &free, &extra, &budget)
                    .map_err(|e| e.to_string())?;
                let teams_a = all_teams(domain, na);
                let teams_b = all_teams(domain, nb);
                let p0 = GamePosition::new(
                    a.clone(),
                    b.clone(),
                    teams_a[0].clone(),
                    teams_b[0].clone(),
                    1,
                )
                .map_err(|e| e.to_string())?;
                let mut solver =
                    Solver::new(&p0, &SolveConfig::default()).map_err(|e| e.to_string())?;
                for x in &teams_a {
                    for y in &teams_b {
                        let winner = solver.winner(x, y, 1).map_err(|e| e.to_string())?;
                        let witness = efgame::distinguishing_formula(&a, x, &b, y, &formulas)
                            .map_err(|e| e.to_string())?;
                        match winner {
                            Winner::Spoiler if witness.is_none() => {
                                return Err(format!(
                                    "solver says Spoiler, no rank-1 formula found: nA={na} nB={nb} X={x} Y={y}"
                                ));
                            }
                            Winner::Duplicator if witness.is_some() => {
                                return Err(format!(
                                    "solver says Duplicator, but `{}` distinguishes: nA={na} nB={nb} X={x} Y={y}",
                                    witness.unwrap()
                                ));
                            }
                            _ => {}
                        }
                        positions += 1;
                    }
                }
            }
        }

        // The empty-signature preset at n=1 is a Duplicator win.
        let p = empty_signature_preset(1);
        let mut solver = Solver::new(&p, &SolveConfig::default()).map_err(|e| e.to_string())?;
        if solver.winner(&p.x, &p.y, p.rounds).map_err(|e| e.to_string())? != Winner::Duplicator {
            return Err("solver does not confirm the n=1 preset as a Duplicator win".into());
        }

        // Canonical-strategy replay for n rounds, n <= 3. Move families
        // beyond the per-family budget are sampled deterministically.
        let mut replay_moves = 0u64;
        for n in 1..=3u32 {
            replay_moves += replay_canonical_strategy(n, 600, 0xEF0 + n as u64)
                .map_err(|e| e.to_string())?;
        }
        Ok(format!(
            "{positions} positions agree with the bounded formula search; canonical strategy survived {replay_moves} replayed moves over presets n <= 3"
        ))
    })();
    CriterionResult::finish(9, "game solver vs formula transfer", started, outcome)
}

/// Replays the canonical Duplicator strategy from the empty-signature
/// preset for `n` rounds, checking invariant preservation against every
/// (budgeted) Spoiler move at every visited position. Returns the number
/// of moves checked.
pub fn replay_canonical_strategy(
    n: Element,
    per_family_budget: u64,
    seed: u64,
) -> Result<u64, GameError> {
    let start = empty_signature_preset(n);
    let pool = efgame::default_pool(start.x.domain());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frontier = vec![start];
    let mut checked = 0u64;
    for _round in 0..n {
        let mut next = Vec::new();
        for pos in &frontier {
            let pool_here: Vec<String> = {
                // The pool tracks the growing domain plus fresh names.
                let mut p = pos.x.domain().to_vec();
                for v in &pool {
                    if !p.contains(v) {
                        p.push(v.clone());
                    }
                }
                p
            };
            let mut moves: Vec<SpoilerMove> = Vec::new();
            // Splits.
            let n_covers = cover_count(&pos.x).unwrap_or(u64::MAX);
            if n_covers <= per_family_budget {
                for idx in 0..n_covers {
                    let (x1, x2) = cover_by_index(&pos.x, idx);
                    moves.push(SpoilerMove::Split { x1, x2 });
                }
            } else {
                for _ in 0..per_family_budget {
                    let idx = rng.gen_range(0..n_covers);
                    let (x1, x2) = cover_by_index(&pos.x, idx);
                    moves.push(SpoilerMove::Split { x1, x2 });
                }
            }
            // Supplements, one family per pool variable.
            for v in &pool_here {
                let count = choice_count(&pos.x, pos.left.universe()).unwrap_or(u64::MAX);
                let budget = per_family_budget / pool_here.len().max(1) as u64;
                if count <= budget {
                    for idx in 0..count {
                        moves.push(SpoilerMove::Supplement {
                            var: v.clone(),
                            h: choice_function_by_index(&pos.x, pos.left.universe(), idx),
                        });
                    }
                } else {
                    for _ in 0..budget {
                        let idx = rng.gen_range(0..count);
                        moves.push(SpoilerMove::Supplement {
                            var: v.clone(),
                            h: choice_function_by_index(&pos.x, pos.left.universe(), idx),
                        });
                    }
                }
            }
            // Duplications.
            for v in &pool_here {
                moves.push(SpoilerMove::Duplicate { var: v.clone() });
            }

            for mv in moves {
                let resp = canonical_duplicator(pos, &mv)?;
                let successors = match &mv {
                    SpoilerMove::Split { .. } => vec![
                        efgame::apply_moves(pos, &mv, &resp, 1)?,
                        efgame::apply_moves(pos, &mv, &resp, 2)?,
                    ],
                    _ => vec![efgame::apply_moves(pos, &mv, &resp, 1)?],
                };
                for np in successors {
                    if !holds_injection_invariant(
                        &np.x,
                        &np.y,
                        np.left.universe(),
                        np.right.universe(),
                    ) {
                        return Err(GameError::InvariantViolated(format!(
                            "after {mv:?} at round with |X|={}",
                            pos.x.len()
                        )));
                    }
                    next.push(np);
                }
                checked += 1;
            }
        }
        // Descend into a bounded, deterministic frontier sample.
        if next.len() > 24 {
            let mut sampled = Vec::new();
            for _ in 0..24 {
                let i = rng.gen_range(0..next.len());
                sampled.push(next[i].clone());
            }
            next = sampled;
        }
        frontier = next;
    }
    Ok(checked)
}

// ----------------------------------------------------------------------
// Criterion 10 (informational): performance of the fixed-point engine on
// the alternating-game sentence, and the naive engine's guard.
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PerfPoint {
    pub n: u32,
    pub millis: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerfReport {
    pub points: Vec<PerfPoint>,
    /// Least-squares slope of log(time) against log(n).
    pub fitted_exponent: f64,
    pub naive_guard_trips_at: u32,
}

/// Times the translated alternating-game sentence on random instances for
/// `n = 5..=max_n` and fits a growth exponent; also demonstrates that the
/// naive engine's guard refuses the same sentence at small n.
pub fn run_perf(max_n: u32) -> Result<PerfReport, String> {
    let raw = parse_formula(AGAP_INCL_SENTENCE, &agap_signature())
        .map_err(|e| format!("parse: {e}"))?;
    let psi = raw.to_nnf().map_err(|e| format!("nnf: {e}"))?;
    let wrapped = wrap_sentence_inc_to_gfp(&psi).map_err(|e| format!("wrap: {e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE9C);
    let mut points = Vec::new();
    let mut n = 5u32;
    while n <= max_n {
        let mut total = 0.0;
        let reps = 2;
        for _ in 0..reps {
            let m = random_agap_instance(n, &mut rng);
            let ctx = FixpointContext::new(&m);
            let t0 = Instant::now();
            let _ = eval_pgfp(&ctx, &Assignment::empty(), &wrapped)
                .map_err(|e| e.to_string())?;
            total += t0.elapsed().as_secs_f64() * 1000.0;
        }
        points.push(PerfPoint {
            n,
            millis: total / reps as f64,
        });
        n += 3;
    }

    // The naive engine refuses the sentence once team sizes outgrow the
    // exists-guard.
    let mut guard_n = 0u32;
    for n in 3..=6u32 {
        let m = random_agap_instance(n, &mut rng);
        match eval_naive(&m, &Team::singleton_empty(), &psi) {
            Err(EvalError::ExistsGuard { .. }) | Err(EvalError::SplitGuard { .. }) => {
                guard_n = n;
                break;
            }
            Ok(_) => continue,
            Err(e) => return Err(format!("unexpected naive failure at n={n}: {e}")),
        }
    }
    if guard_n == 0 {
        return Err("naive engine never tripped its guard up to n=6".into());
    }

    // log-log least squares.
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.millis > 0.0)
        .map(|p| ((p.n as f64).ln(), p.millis.ln()))
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        cov / var
    } else {
        f64::NAN
    };
    Ok(PerfReport {
        points,
        fitted_exponent,
        naive_guard_trips_at: guard_n,
    })
}

fn random_agap_instance(n: u32, rng: &mut ChaCha8Rng) -> Structure {
    let mut m = Structure::new(n).expect("n >= 1");
    let mut e = Relation::new(2);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(0.3) {
                e.insert(vec![a, b]);
            }
        }
    }
    let mut p = Relation::new(1);
    for a in 0..n {
        if rng.gen_bool(0.3) {
            p.insert(vec![a]);
        }
    }
    m.add_rel("E", e).expect("fresh");
    m.add_rel("P", p).expect("fresh");
    m
}

pub fn run_perf_criterion(max_n: u32) -> CriterionResult {
    let started = Instant::now();
    let (passed, detail) = match run_perf(max_n) {
        Ok(report) => {
            let pts: Vec<String> = report
                .points
                .iter()
                .map(|p| format!("n={}: {:.1}ms", p.n, p.millis))
                .collect();
            (
                true,
                format!(
                    "fitted growth exponent {:.2} over [{}]; naive guard trips at n={} (informational)",
                    report.fitted_exponent,
                    pts.join(", "),
                    report.naive_guard_trips_at
                ),
            )
        }
        Err(e) => (false, e),
    };
    CriterionResult {
        id: 10,
        name: "fixed-point engine growth (informational)".into(),
        passed,
        informational: true,
        detail,
        millis: started.elapsed().as_millis(),
    }
}

/// Runs every criterion; `perf_max_n` bounds the informational ladder.
pub fn run_all(perf_max_n: u32) -> Vec<CriterionResult> {
    vec![
        run_inc_to_gfp_contract(),
        run_gfp_to_inc_contract(),
        run_cycle_sentence(),
        run_agap_sentence(),
        run_flatness(),
        run_union_and_empty_team(),
        run_fixpoint_correctness(),
        run_myopic_compiler(),
        run_efgame_correspondence(),
        run_perf_criterion(perf_max_n),
    ]
}
