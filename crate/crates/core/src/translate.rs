//! Constructive translations between the inclusion-atom fragment and the
//! positive greatest-fixed-point fragment, in both directions, plus the
//! compiler from myopic sentences to inclusion formulas.
//!
//! Each translation threads an explicit [`FreshNames`] generator, so
//! outputs are deterministic given the input; generated names live in the
//! reserved `_v*`/`_R*` namespace and generators are seeded past any such
//! names already present in the input.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{FixOp, Formula, FreshNames, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unsupported atom in this fragment: {0}")]
    UnsupportedAtom(String),
    #[error("free variable `{0}` is not among the team variables")]
    FreeVariableOutsideTuple(String),
    #[error("expected a sentence, found free variable `{0}`")]
    NotSentence(String),
    #[error("formula must be in negation normal form: {0}")]
    NotNnf(String),
    #[error("`{0}` occurs negatively where only positive occurrences are allowed")]
    NegativeOccurrence(String),
    #[error("the team variable tuple must be nonempty and duplicate-free")]
    BadTuple,
    #[error("not in normal form: {0}; expected `exists z1. ... exists zk. gfp R(x1,...,xk). BODY @ (z1,...,zk)` with a first-order body")]
    NotNormalForm(String),
    #[error("not a myopic sentence: {0}")]
    NotMyopic(String),
}

/// Result of the inclusion-to-fixed-point translation: the formula and the
/// designated fresh relation symbol standing for the team's relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncToGfp {
    pub formula: Formula,
    pub team_rel: String,
}

fn check_tuple(xs: &[String]) -> Result<(), TranslateError> {
    if xs.is_empty() {
        return Err(TranslateError::BadTuple);
    }
    let mut seen = BTreeSet::new();
    for v in xs {
        if !seen.insert(v) {
            return Err(TranslateError::BadTuple);
        }
    }
    Ok(())
}

fn vars_as_terms(vs: &[String]) -> Vec<Term> {
    vs.iter().map(|v| Term::Var(v.clone())).collect()
}

/// Translates an inclusion-logic formula `f` with free variables among
/// `xs` into a fixed-point formula over a designated fresh relation symbol
/// `R` of arity `|xs|`, such that a team `X` with domain `xs` satisfies `f`
/// exactly when every assignment of `X` satisfies the output with `R`
/// interpreted as `X(xs)`.
pub fn inc_to_gfp(
    f: &Formula,
    xs: &[String],
    fresh: &mut FreshNames,
) -> Result<IncToGfp, TranslateError> {
    check_tuple(xs)?;
    for v in f.free_vars() {
        if !xs.contains(&v) {
            return Err(TranslateError::FreeVariableOutsideTuple(v));
        }
    }
    let team_rel = fresh.rel();
    let formula = inc_to_gfp_rec(f, xs, &team_rel, fresh)?;
    debug_assert!(formula.check_positive(&team_rel));
    Ok(IncToGfp { formula, team_rel })
}

fn inc_to_gfp_rec(
    f: &Formula,
    xs: &[String],
    team_rel: &str,
    fresh: &mut FreshNames,
) -> Result<Formula, TranslateError> {
    match f {
        // First-order literals pass through untouched.
        Formula::Rel { .. } | Formula::Eq { .. } => Ok(f.clone()),

        // An inclusion atom t̄1 ⊆ t̄2 becomes
        //   ∃z̄ (R z̄ ∧ t̄1 = t̄2[z̄/x̄])
        // with z̄ a fresh copy of the team tuple; tuple equality expands to
        // a conjunction of component equalities.
        Formula::Incl { left, right } => {
            let zs: Vec<String> = xs.iter().map(|_| fresh.var()).collect();
            let rename = |v: &str| -> Option<Term> {
                xs.iter()
                    .position(|x| x == v)
                    .map(|i| Term::Var(zs[i].clone()))
            };
            let mut parts = vec![Formula::rel(team_rel, vars_as_terms(&zs))];
            for (t1, t2) in left.iter().zip(right.iter()) {
                parts.push(Formula::Eq {
                    negated: false,
                    left: t1.clone(),
                    right: t2.rename_vars(&rename),
                });
            }
            let mut out = Formula::conj(parts);
            for z in zs.iter().rev() {
                out = Formula::exists(z.clone(), out);
            }
            Ok(out)
        }

        // ψ ∨ θ: each disjunct becomes a gfp over a fresh symbol applied to
        // the team tuple, with the current team relation conjoined so the
        // fixed point stays inside it.
        Formula::Or(a, b) => {
            let s = fresh.rel();
            let a_star = inc_to_gfp_rec(a, xs, &s, fresh)?;
            let t = fresh.rel();
            let b_star = inc_to_gfp_rec(b, xs, &t, fresh)?;
            let guard = Formula::rel(team_rel, vars_as_terms(xs));
            let left = Formula::Fix {
                op: FixOp::Gfp,
                rel: s,
                vars: xs.to_vec(),
                body: Box::new(Formula::and(guard.clone(), a_star)),
                args: vars_as_terms(xs),
            };
            let right = Formula::Fix {
                op: FixOp::Gfp,
                rel: t,
                vars: xs.to_vec(),
                body: Box::new(Formula::and(guard, b_star)),
                args: vars_as_terms(xs),
            };
            Ok(Formula::or(left, right))
        }

        Formula::And(a, b) => Ok(Formula::and(
            inc_to_gfp_rec(a, xs, team_rel, fresh)?,
            inc_to_gfp_rec(b, xs, team_rel, fresh)?,
        )),

        // ∃v ψ: the extended tuple x̄v carries the supplemented team.
        Formula::Exists(v, body) => {
            let (v, body) = disentangle(v, body, xs, fresh);
            let s = fresh.rel();
            let mut xsv = xs.to_vec();
            xsv.push(v.clone());
            let inner = inc_to_gfp_rec(&body, &xsv, &s, fresh)?;
            let guard = Formula::rel(team_rel, vars_as_terms(xs));
            Ok(Formula::exists(
                v,
                Formula::Fix {
                    op: FixOp::Gfp,
                    rel: s,
                    vars: xsv.clone(),
                    body: Box::new(Formula::and(guard, inner)),
                    args: vars_as_terms(&xsv),
                },
            ))
        }

        Formula::Forall(v, body) => {
            let (v, body) = disentangle(v, body, xs, fresh);
            let s = fresh.rel();
            let mut xsv = xs.to_vec();
            xsv.push(v.clone());
            let inner = inc_to_gfp_rec(&body, &xsv, &s, fresh)?;
            let guard = Formula::rel(team_rel, vars_as_terms(xs));
            Ok(Formula::forall(
                v,
                Formula::Fix {
                    op: FixOp::Gfp,
                    rel: s,
                    vars: xsv.clone(),
                    body: Box::new(Formula::and(guard, inner)),
                    args: vars_as_terms(&xsv),
                },
            ))
        }

        Formula::Dep { .. }
        | Formula::Excl { .. }
        | Formula::Indep { .. }
        | Formula::CondIndep { .. } => Err(TranslateError::UnsupportedAtom(
            "only inclusion atoms translate; dep/excl/indep/cindep do not".into(),
        )),
        Formula::Not(_) | Formula::Implies(..) => {
            Err(TranslateError::NotNnf(format!("offending subformula `{f}`")))
        }
        Formula::Fix { .. } => Err(TranslateError::UnsupportedAtom(
            "fixed-point operators cannot appear in the input".into(),
        )),
    }
}

/// Re-quantification over a team variable is resolved by renaming the bound
/// variable to a fresh one (the translation needs the extended tuple to be
/// duplicate-free).
fn disentangle(
    v: &str,
    body: &Formula,
    xs: &[String],
    fresh: &mut FreshNames,
) -> (String, Formula) {
    if xs.iter().any(|x| x == v) {
        let v2 = fresh.var();
        let renamed = body.substitute_var(v, &Term::Var(v2.clone()));
        (v2, renamed)
    } else {
        (v.to_string(), body.clone())
    }
}

/// Wraps an inclusion-logic sentence as an equivalent fixed-point
/// sentence: translate over one fresh dummy variable and close with
/// `∀x [gfp_{R,x} φ*(R,x)] x`.
pub fn wrap_sentence_inc_to_gfp(f: &Formula) -> Result<Formula, TranslateError> {
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(TranslateError::NotSentence(v));
    }
    let mut fresh = FreshNames::avoiding([f]);
    let x = fresh.var();
    let IncToGfp { formula, team_rel } = inc_to_gfp(f, &[x.clone()], &mut fresh)?;
    Ok(Formula::forall(
        x.clone(),
        Formula::Fix {
            op: FixOp::Gfp,
            rel: team_rel,
            vars: vec![x.clone()],
            body: Box::new(formula),
            args: vec![Term::Var(x)],
        },
    ))
}

/// Translates a first-order formula `eta` in which the relation symbol
/// `rel` (of arity `|xs|`) occurs only positively into an inclusion-logic
/// formula, such that a team `X` satisfies the output exactly when every
/// assignment of `X` satisfies `eta` with `rel` interpreted as `X(xs)`.
pub fn gfp_to_inc_fo(
    eta: &Formula,
    rel: &str,
    xs: &[String],
    fresh: &mut FreshNames,
) -> Result<Formula, TranslateError> {
    check_tuple(xs)?;
    if !eta.is_nnf() {
        return Err(TranslateError::NotNnf(
            "apply to_nnf before translating".into(),
        ));
    }
    if !eta.check_positive(rel) {
        return Err(TranslateError::NegativeOccurrence(rel.to_string()));
    }
    gfp_to_inc_rec(eta, rel, xs, fresh)
}

fn gfp_to_inc_rec(
    eta: &Formula,
    rel: &str,
    cur: &[String],
    fresh: &mut FreshNames,
) -> Result<Formula, TranslateError> {
    match eta {
        // R t̄ becomes the inclusion atom t̄ ⊆ cur̄.
        Formula::Rel {
            negated,
            name,
            args,
        } if name == rel => {
            if *negated {
                return Err(TranslateError::NegativeOccurrence(rel.to_string()));
            }
            if args.len() != cur.len() {
                return Err(TranslateError::NotNormalForm(format!(
                    "`{name}` applied to {} term(s), bound tuple has {}",
                    args.len(),
                    cur.len()
                )));
            }
            Ok(Formula::Incl {
                left: args.clone(),
                right: vars_as_terms(cur),
            })
        }

        // Literals free of the bound relation pass through.
        Formula::Rel { .. } | Formula::Eq { .. } => Ok(eta.clone()),

        Formula::And(a, b) => Ok(Formula::and(
            gfp_to_inc_rec(a, rel, cur, fresh)?,
            gfp_to_inc_rec(b, rel, cur, fresh)?,
        )),

        // α ∨ β: a fresh copy ū of the team tuple stores the team's values
        // across the split, so each side keeps access to the whole of
        // X(cur̄) through ū ⊆ cur̄.
        Formula::Or(a, b) => {
            let us: Vec<String> = cur.iter().map(|_| fresh.var()).collect();
            let a_plus = gfp_to_inc_rec(a, rel, &us, fresh)?;
            let b_plus = gfp_to_inc_rec(b, rel, &us, fresh)?;
            let mut out = Formula::and(
                Formula::Incl {
                    left: vars_as_terms(&us),
                    right: vars_as_terms(cur),
                },
                Formula::or(a_plus, b_plus),
            );
            for u in us.iter().rev() {
                out = Formula::exists(u.clone(), out);
            }
            Ok(out)
        }

        Formula::Exists(v, body) => {
            let (v, body) = disentangle(v, body, cur, fresh);
            Ok(Formula::exists(
                v,
                gfp_to_inc_rec(&body, rel, cur, fresh)?,
            ))
        }
        Formula::Forall(v, body) => {
            let (v, body) = disentangle(v, body, cur, fresh);
            Ok(Formula::forall(
                v,
                gfp_to_inc_rec(&body, rel, cur, fresh)?,
            ))
        }

        Formula::Not(_) | Formula::Implies(..) => Err(TranslateError::NotNnf(format!(
            "offending subformula `{eta}`"
        ))),
        Formula::Fix { .. } => Err(TranslateError::NotNormalForm(
            "the body must be first-order (no nested fixed points)".into(),
        )),
        _ => Err(TranslateError::UnsupportedAtom(format!(
            "first-order body expected, found `{eta}`"
        ))),
    }
}

/// Recognized normal-form shape: `∃z̄ [gfp_{R,x̄} η(R,x̄)] z̄`.
#[derive(Debug, Clone)]
pub struct NormalFormParts {
    pub outer_vars: Vec<String>,
    pub rel: String,
    pub bound_vars: Vec<String>,
    pub body: Formula,
}

/// Destructures a fixed-point sentence in normal form, with diagnostics
/// explaining any shape mismatch.
pub fn match_normal_form(psi: &Formula) -> Result<NormalFormParts, TranslateError> {
    if let Some(v) = psi.free_vars().into_iter().next() {
        return Err(TranslateError::NotSentence(v));
    }
    let mut outer_vars = Vec::new();
    let mut cursor = psi;
    while let Formula::Exists(v, body) = cursor {
        outer_vars.push(v.clone());
        cursor = body;
    }
    let Formula::Fix {
        op,
        rel,
        vars,
        body,
        args,
    } = cursor
    else {
        return Err(TranslateError::NotNormalForm(format!(
            "after the existential prefix, expected a gfp application, found `{cursor}`"
        )));
    };
    if *op != FixOp::Gfp {
        return Err(TranslateError::NotNormalForm(
            "the fixed point must be a gfp".into(),
        ));
    }
    let applied: Vec<String> = args
        .iter()
        .map(|t| match t {
            Term::Var(v) => Ok(v.clone()),
            other => Err(TranslateError::NotNormalForm(format!(
                "applied terms must be the prefix variables, found `{other}`"
            ))),
        })
        .collect::<Result<_, _>>()?;
    if applied != outer_vars {
        return Err(TranslateError::NotNormalForm(format!(
            "the gfp must be applied to the prefix variables ({}) in order, found ({})",
            outer_vars.join(","),
            applied.join(",")
        )));
    }
    if outer_vars.iter().any(|z| vars.contains(z)) {
        return Err(TranslateError::NotNormalForm(
            "prefix variables must be distinct from the bound tuple".into(),
        ));
    }
    if let Some(v) = body.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(TranslateError::NotNormalForm(format!(
            "the body has the free variable `{v}` outside the bound tuple; translation needs a parameter-free body"
        )));
    }
    if !body.is_fo() {
        return Err(TranslateError::NotNormalForm(
            "the body must be first-order (no nested fixed points or team atoms)".into(),
        ));
    }
    if !body.is_nnf() {
        return Err(TranslateError::NotNnf(
            "apply to_nnf before translating".into(),
        ));
    }
    if !body.check_positive(rel) {
        return Err(TranslateError::NegativeOccurrence(rel.clone()));
    }
    Ok(NormalFormParts {
        outer_vars,
        rel: rel.clone(),
        bound_vars: vars.clone(),
        body: body.as_ref().clone(),
    })
}

/// Translates a normal-form fixed-point sentence
/// `∃z̄ [gfp_{R,x̄} η(R,x̄)] z̄` into the equivalent inclusion-logic
/// sentence `∃z̄ ∃x̄ ((z̄) <= (x̄) ∧ η+(x̄))`.
pub fn gfp_to_inc_sentence(psi: &Formula) -> Result<Formula, TranslateError> {
    let parts = match_normal_form(psi)?;
    if parts.bound_vars.iter().any(|x| parts.outer_vars.contains(x)) {
        return Err(TranslateError::NotNormalForm(
            "prefix variables may not reuse bound-tuple names".into(),
        ));
    }
    let mut fresh = FreshNames::avoiding([psi]);
    let eta_plus = gfp_to_inc_fo(&parts.body, &parts.rel, &parts.bound_vars, &mut fresh)?;
    let mut out = Formula::and(
        Formula::Incl {
            left: vars_as_terms(&parts.outer_vars),
            right: vars_as_terms(&parts.bound_vars),
        },
        eta_plus,
    );
    for x in parts.bound_vars.iter().rev() {
        out = Formula::exists(x.clone(), out);
    }
    for z in parts.outer_vars.iter().rev() {
        out = Formula::exists(z.clone(), out);
    }
    Ok(out)
}

/// The components of a myopic sentence `∀x̄ (R x̄ → θ(R, x̄))`.
#[derive(Debug, Clone)]
pub struct MyopicParts {
    pub rel: String,
    pub vars: Vec<String>,
    /// The consequent, already in negation normal form.
    pub theta: Formula,
}

/// Checks the myopic shape: a universal prefix over exactly the antecedent
/// tuple, an implication whose antecedent is the bound relation applied to
/// that tuple, and a first-order consequent where the relation occurs only
/// positively. The implication is consumed structurally; the antecedent is
/// never negated.
pub fn check_myopic(phi: &Formula) -> Result<MyopicParts, TranslateError> {
    let mut vars = Vec::new();
    let mut cursor = phi;
    while let Formula::Forall(v, body) = cursor {
        vars.push(v.clone());
        cursor = body;
    }
    if vars.is_empty() {
        return Err(TranslateError::NotMyopic(
            "missing the universal prefix ∀x̄".into(),
        ));
    }
    let Formula::Implies(antecedent, theta) = cursor else {
        return Err(TranslateError::NotMyopic(format!(
            "after the universal prefix, expected `R(x̄) -> ...`, found `{cursor}`"
        )));
    };
    let Formula::Rel {
        negated: false,
        name,
        args,
    } = antecedent.as_ref()
    else {
        return Err(TranslateError::NotMyopic(format!(
            "the antecedent must be a positive relation atom, found `{antecedent}`"
        )));
    };
    let arg_vars: Vec<String> = args
        .iter()
        .map(|t| match t {
            Term::Var(v) => Ok(v.clone()),
            other => Err(TranslateError::NotMyopic(format!(
                "the antecedent must be applied to the quantified variables, found `{other}`"
            ))),
        })
        .collect::<Result<_, _>>()?;
    if arg_vars != vars {
        return Err(TranslateError::NotMyopic(format!(
            "the antecedent tuple ({}) must be the quantified tuple ({}) in order",
            arg_vars.join(","),
            vars.join(","),
        )));
    }
    if !theta.is_fo() {
        return Err(TranslateError::NotMyopic(
            "the consequent must be first-order".into(),
        ));
    }
    let theta_nnf = theta
        .to_nnf()
        .map_err(|e| TranslateError::NotNnf(e.to_string()))?;
    if !theta_nnf.check_positive(name) {
        return Err(TranslateError::NegativeOccurrence(name.clone()));
    }
    if let Some(v) = theta_nnf.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(TranslateError::NotMyopic(format!(
            "the consequent has the free variable `{v}` outside the quantified tuple"
        )));
    }
    Ok(MyopicParts {
        rel: name.clone(),
        vars,
        theta: theta_nnf,
    })
}

pub fn is_myopic(phi: &Formula) -> bool {
    check_myopic(phi).is_ok()
}

/// Compiles a myopic sentence `∀x̄(R x̄ → θ(R, x̄))` into an inclusion
/// formula over x̄ whose teams are exactly the relations satisfying it.
pub fn myopic_to_inc(phi: &Formula) -> Result<Formula, TranslateError> {
    let parts = check_myopic(phi)?;
    let mut fresh = FreshNames::avoiding([phi]);
    gfp_to_inc_fo(&parts.theta, &parts.rel, &parts.vars, &mut fresh)
}

// ----------------------------------------------------------------------
// Contract checkers: both semantic readings of each translation, for one
// model and team. The verification suites and the CLI's `both` mode run
// these over enumerated inputs.
// ----------------------------------------------------------------------

use crate::error::EvalError;
use crate::fixpoint::{eval_pgfp_team, FixpointContext};
use crate::structures::{team_relation, Structure, StructureError, Team};
use crate::team_eval::{eval_naive_opts, eval_tarski, NaiveOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Evaluates both sides of the inclusion-to-fixed-point correspondence:
/// the team-semantics reading of `f` on `x`, and the pointwise
/// fixed-point reading of its translation with the designated relation
/// bound to `X(dom)`. The team's domain is the translation tuple.
pub fn inc_gfp_both_sides(
    m: &Structure,
    x: &Team,
    f: &Formula,
    opts: NaiveOptions,
) -> Result<(bool, bool), ContractError> {
    let xs = x.domain().to_vec();
    let mut fresh = FreshNames::avoiding([f]);
    let tr = inc_to_gfp(f, &xs, &mut fresh)?;
    let naive = eval_naive_opts(m, x, f, opts)?;
    let rel = team_relation(m, x, &vars_as_terms(&xs))?;
    let ctx = FixpointContext::new(m).with_binding(tr.team_rel.clone(), rel);
    let translated = eval_pgfp_team(&ctx, x, &tr.formula)?;
    Ok((naive, translated))
}

/// Evaluates both sides of the first-order-to-inclusion correspondence:
/// the team-semantics reading of `η+` on `x`, and the pointwise Tarski
/// reading of `eta` with `rel` bound to `X(xs)`.
pub fn gfp_inc_both_sides(
    m: &Structure,
    x: &Team,
    eta: &Formula,
    rel: &str,
    xs: &[String],
    opts: NaiveOptions,
) -> Result<(bool, bool), ContractError> {
    let mut fresh = FreshNames::avoiding([eta]);
    let eta_plus = gfp_to_inc_fo(eta, rel, xs, &mut fresh)?;
    let team_side = eval_naive_opts(m, x, &eta_plus, opts)?;
    let rel_val = team_relation(m, x, &vars_as_terms(xs))?;
    let me = m.with_param(rel, rel_val)?;
    let mut point_side = true;
    for s in x.assignments() {
        if !eval_tarski(&me, &s, eta)? {
            point_side = false;
            break;
        }
    }
    Ok((team_side, point_side))
}

/// Evaluates both sides of the myopic correspondence: the team-semantics
/// reading of the compiled formula on `x`, and classical truth of the
/// myopic sentence with its relation bound to `X(x̄)`.
pub fn myopic_both_sides(
    m: &Structure,
    x: &Team,
    phi: &Formula,
    opts: NaiveOptions,
) -> Result<(bool, bool), ContractError> {
    let parts = check_myopic(phi)?;
    let phi_plus = myopic_to_inc(phi)?;
    let team_side = eval_naive_opts(m, x, &phi_plus, opts)?;
    let rel_val = team_relation(m, x, &vars_as_terms(&parts.vars))?;
    let me = m.with_param(&parts.rel, rel_val)?;
    let sentence_side = eval_tarski(&me, &crate::structures::Assignment::empty(), phi)?;
    Ok((team_side, sentence_side))
}

#[cfg(test)]
mod tests;
