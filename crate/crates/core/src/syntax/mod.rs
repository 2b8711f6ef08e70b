//! Abstract syntax for both object logics: first-order formulas with
//! dependency atoms (inclusion, functional dependence, exclusion,
//! independence, conditional independence) and with greatest/least
//! fixed-point operators, together with the structural analyses used by the
//! evaluators and translators: negation normal form, positivity, rank, free
//! variables, substitution.
//!
//! Formulas are plain immutable trees. Evaluation-facing code expects them
//! in negation normal form (negation only on relational/equality literals);
//! the `Not` and `Implies` nodes exist as parser conveniences and are
//! removed by [`Formula::to_nnf`] or consumed structurally (the myopic
//! translator handles `->` itself).

mod parser;
mod printer;

pub use parser::{parse_formula, parse_term, ParseError};

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// First-order terms: variables, constants, and function applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    /// Collects the variables of the term into `out`.
    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Simultaneously replaces variables according to `map`. The caller is
    /// responsible for freshness of the targets; no capture analysis happens
    /// at the term level.
    pub fn rename_vars(&self, map: &dyn Fn(&str) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(
                f.clone(),
                args.iter().map(|a| a.rename_vars(map)).collect(),
            ),
        }
    }
}

/// Which extreme fixed point a [`Formula::Fix`] node denotes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixOp {
    Gfp,
    Lfp,
}

impl fmt::Display for FixOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixOp::Gfp => write!(f, "gfp"),
            FixOp::Lfp => write!(f, "lfp"),
        }
    }
}

/// Formula trees shared by both object logics.
///
/// One unified type serves the inclusion-logic fragment, the fixed-point
/// fragment, and the mixed shapes arising mid-translation; the predicates
/// [`Formula::is_fo`], [`Formula::is_incl`] and [`Formula::check_pgfp`]
/// gate the individual operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// Relational literal `R(t̄)` / `!R(t̄)`. The symbol may name a model
    /// relation, a second-order relation variable, or a fixpoint-bound
    /// relation.
    Rel {
        negated: bool,
        name: String,
        args: Vec<Term>,
    },
    /// Equality literal `t1 = t2` / `t1 != t2`.
    Eq {
        negated: bool,
        left: Term,
        right: Term,
    },
    /// Inclusion atom `(t̄1) <= (t̄2)`, tuples of equal length.
    Incl { left: Vec<Term>, right: Vec<Term> },
    /// Functional dependence atom `dep(t̄1; t̄2)`.
    Dep { left: Vec<Term>, right: Vec<Term> },
    /// Exclusion atom `excl(t̄1; t̄2)`, tuples of equal length.
    Excl { left: Vec<Term>, right: Vec<Term> },
    /// Independence atom `indep(t̄1; t̄2)`.
    Indep { left: Vec<Term>, right: Vec<Term> },
    /// Conditional independence atom `cindep(t̄1; t̄2; t̄3)`.
    CondIndep {
        cond: Vec<Term>,
        left: Vec<Term>,
        right: Vec<Term>,
    },
    /// Negation over an arbitrary subformula; parser convenience, removed
    /// by [`Formula::to_nnf`].
    Not(Box<Formula>),
    /// Implication; parser convenience (myopic sentences are written with
    /// it), removed by [`Formula::to_nnf`].
    Implies(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
    /// `gfp R(x̄). body @ (t̄)` or `lfp R(x̄). body @ (t̄)`.
    Fix {
        op: FixOp,
        rel: String,
        vars: Vec<String>,
        body: Box<Formula>,
        args: Vec<Term>,
    },
}

/// Errors from the structural analyses.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("negation over a dependency atom is not defined")]
    NegatedDependencyAtom,
    #[error("negation over a fixed-point operator is not defined")]
    NegatedFixpoint,
    #[error("rank is undefined on fixed-point operators")]
    RankOnFixpoint,
    #[error("formula is not in negation normal form: {0}")]
    NotNnf(String),
}

impl Formula {
    pub fn and(left: Formula, right: Formula) -> Formula {
        Formula::And(Box::new(left), Box::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Formula {
        Formula::Or(Box::new(left), Box::new(right))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn rel(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Rel {
            negated: false,
            name: name.into(),
            args,
        }
    }

    /// Conjunction of a nonempty list, right-nested.
    pub fn conj(mut parts: Vec<Formula>) -> Formula {
        let last = parts.pop().expect("conj of empty list");
        parts
            .into_iter()
            .rev()
            .fold(last, |acc, f| Formula::and(f, acc))
    }

    /// True iff the node is a (possibly negated) relational or equality
    /// literal.
    pub fn is_literal(&self) -> bool {
        matches!(self, Formula::Rel { .. } | Formula::Eq { .. })
    }


    /// True iff negation appears only on literals (no `Not`/`Implies`
    /// nodes anywhere).
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(_) | Formula::Implies(..) => false,
            Formula::Rel { .. }
            | Formula::Eq { .. }
            | Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_nnf() && b.is_nnf(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_nnf(),
            Formula::Fix { body, .. } => body.is_nnf(),
        }
    }

    /// Plain first-order: no dependency atoms, no fixed points. `Not` and
    /// `Implies` are allowed (they are classical connectives).
    pub fn is_fo(&self) -> bool {
        match self {
            Formula::Rel { .. } | Formula::Eq { .. } => true,
            Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. }
            | Formula::Fix { .. } => false,
            Formula::Not(a) => a.is_fo(),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_fo() && b.is_fo()
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_fo(),
        }
    }

    /// Inclusion-logic formula: NNF, literals, inclusion atoms, the lattice
    /// connectives and quantifiers. No other dependency atoms, no fixed
    /// points.
    pub fn is_incl(&self) -> bool {
        match self {
            Formula::Rel { .. } | Formula::Eq { .. } | Formula::Incl { .. } => true,
            Formula::And(a, b) | Formula::Or(a, b) => a.is_incl() && b.is_incl(),
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.is_incl(),
            _ => false,
        }
    }

    /// Checks the fixed-point fragment shape: NNF, no dependency atoms, and
    /// every `Fix` node binding a nonempty variable tuple whose length
    /// matches the applied term tuple, with the bound relation occurring
    /// only positively in the body. Returns the first violation.
    pub fn check_pgfp(&self) -> Result<(), String> {
        match self {
            Formula::Rel { .. } | Formula::Eq { .. } => Ok(()),
            Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. } => {
                Err("dependency atoms do not belong to the fixed-point fragment".into())
            }
            Formula::Not(_) | Formula::Implies(..) => {
                Err("formula must be in negation normal form".into())
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.check_pgfp()?;
                b.check_pgfp()
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.check_pgfp(),
            Formula::Fix {
                rel,
                vars,
                body,
                args,
                ..
            } => {
                if vars.is_empty() {
                    return Err(format!("fixed point over `{rel}` binds an empty tuple"));
                }
                if vars.len() != args.len() {
                    return Err(format!(
                        "fixed point over `{rel}` binds {} variable(s) but is applied to {} term(s)",
                        vars.len(),
                        args.len()
                    ));
                }
                let mut seen = BTreeSet::new();
                for v in vars {
                    if !seen.insert(v) {
                        return Err(format!("fixed point over `{rel}` repeats variable `{v}`"));
                    }
                }
                if !body.check_positive(rel) {
                    return Err(format!("`{rel}` occurs negatively in its fixed-point body"));
                }
                body.check_pgfp()
            }
        }
    }

    /// Free first-order variables, ordered. Quantifiers bind their variable;
    /// fixed-point operators bind their variable tuple within the body
    /// (applied terms stay free).
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            let add_terms = |ts: &[Term], bound: &Vec<String>, out: &mut BTreeSet<String>| {
                let mut vs = BTreeSet::new();
                for t in ts {
                    t.collect_vars(&mut vs);
                }
                for v in vs {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            };
            match f {
                Formula::Rel { args, .. } => add_terms(args, bound, out),
                Formula::Eq { left, right, .. } => {
                    add_terms(std::slice::from_ref(left), bound, out);
                    add_terms(std::slice::from_ref(right), bound, out);
                }
                Formula::Incl { left, right }
                | Formula::Dep { left, right }
                | Formula::Excl { left, right }
                | Formula::Indep { left, right } => {
                    add_terms(left, bound, out);
                    add_terms(right, bound, out);
                }
                Formula::CondIndep { cond, left, right } => {
                    add_terms(cond, bound, out);
                    add_terms(left, bound, out);
                    add_terms(right, bound, out);
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Exists(v, b) | Formula::Forall(v, b) => {
                    bound.push(v.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                Formula::Fix {
                    vars, body, args, ..
                } => {
                    add_terms(args, bound, out);
                    let depth = bound.len();
                    bound.extend(vars.iter().cloned());
                    go(body, bound, out);
                    bound.truncate(depth);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// True iff `rel` never occurs as a negated literal, scope-aware: a
    /// subtree in which `rel` is rebound by a fixed-point operator refers to
    /// the inner binding and is skipped.
    pub fn check_positive(&self, rel: &str) -> bool {
        match self {
            Formula::Rel { negated, name, .. } => !(*negated && name == rel),
            Formula::Eq { .. }
            | Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. } => true,
            Formula::Not(a) => {
                // A pre-NNF negation makes every occurrence below it suspect.
                !a.mentions_rel(rel)
            }
            Formula::Implies(a, b) => !a.mentions_rel(rel) && b.check_positive(rel),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.check_positive(rel) && b.check_positive(rel)
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.check_positive(rel),
            Formula::Fix {
                rel: bound, body, ..
            } => {
                if bound == rel {
                    true
                } else {
                    body.check_positive(rel)
                }
            }
        }
    }

    /// True iff a relational literal with this symbol occurs anywhere
    /// (respecting fixed-point rebinding).
    pub fn mentions_rel(&self, rel: &str) -> bool {
        match self {
            Formula::Rel { name, .. } => name == rel,
            Formula::Eq { .. }
            | Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. } => false,
            Formula::Not(a) => a.mentions_rel(rel),
            Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                a.mentions_rel(rel) || b.mentions_rel(rel)
            }
            Formula::Exists(_, b) | Formula::Forall(_, b) => b.mentions_rel(rel),
            Formula::Fix {
                rel: bound, body, ..
            } => bound != rel && body.mentions_rel(rel),
        }
    }

    /// Classical push-down of negation. `Not` over dependency atoms or
    /// fixed-point nodes is rejected (their negation has no semantics
    /// here); `Implies` becomes `!antecedent | consequent`.
    pub fn to_nnf(&self) -> Result<Formula, SyntaxError> {
        fn pos(f: &Formula) -> Result<Formula, SyntaxError> {
            match f {
                Formula::Not(a) => neg(a),
                Formula::Implies(a, b) => Ok(Formula::or(neg(a)?, pos(b)?)),
                Formula::And(a, b) => Ok(Formula::and(pos(a)?, pos(b)?)),
                Formula::Or(a, b) => Ok(Formula::or(pos(a)?, pos(b)?)),
                Formula::Exists(v, b) => Ok(Formula::exists(v.clone(), pos(b)?)),
                Formula::Forall(v, b) => Ok(Formula::forall(v.clone(), pos(b)?)),
                Formula::Fix {
                    op,
                    rel,
                    vars,
                    body,
                    args,
                } => Ok(Formula::Fix {
                    op: *op,
                    rel: rel.clone(),
                    vars: vars.clone(),
                    body: Box::new(pos(body)?),
                    args: args.clone(),
                }),
                _ => Ok(f.clone()),
            }
        }
        fn neg(f: &Formula) -> Result<Formula, SyntaxError> {
            match f {
                Formula::Rel {
                    negated,
                    name,
                    args,
                } => Ok(Formula::Rel {
                    negated: !negated,
                    name: name.clone(),
                    args: args.clone(),
                }),
                Formula::Eq {
                    negated,
                    left,
                    right,
                } => Ok(Formula::Eq {
                    negated: !negated,
                    left: left.clone(),
                    right: right.clone(),
                }),
                Formula::Incl { .. }
                | Formula::Dep { .. }
                | Formula::Excl { .. }
                | Formula::Indep { .. }
                | Formula::CondIndep { .. } => Err(SyntaxError::NegatedDependencyAtom),
                Formula::Fix { .. } => Err(SyntaxError::NegatedFixpoint),
                Formula::Not(a) => pos(a),
                Formula::Implies(a, b) => Ok(Formula::and(pos(a)?, neg(b)?)),
                Formula::And(a, b) => Ok(Formula::or(neg(a)?, neg(b)?)),
                Formula::Or(a, b) => Ok(Formula::and(neg(a)?, neg(b)?)),
                Formula::Exists(v, b) => Ok(Formula::forall(v.clone(), neg(b)?)),
                Formula::Forall(v, b) => Ok(Formula::exists(v.clone(), neg(b)?)),
            }
        }
        pos(self)
    }

    /// Rank of a fixpoint-free NNF formula: 0 on literals and atoms, max on
    /// conjunction, max+1 on disjunction, +1 under either quantifier.
    pub fn rank(&self) -> Result<u32, SyntaxError> {
        match self {
            Formula::Rel { .. }
            | Formula::Eq { .. }
            | Formula::Incl { .. }
            | Formula::Dep { .. }
            | Formula::Excl { .. }
            | Formula::Indep { .. }
            | Formula::CondIndep { .. } => Ok(0),
            Formula::And(a, b) => Ok(a.rank()?.max(b.rank()?)),
            Formula::Or(a, b) => Ok(a.rank()?.max(b.rank()?) + 1),
            Formula::Exists(_, b) | Formula::Forall(_, b) => Ok(b.rank()? + 1),
            Formula::Fix { .. } => Err(SyntaxError::RankOnFixpoint),
            Formula::Not(_) | Formula::Implies(..) => Err(SyntaxError::NotNnf(
                "rank is defined on negation normal forms only".into(),
            )),
        }
    }

    /// Replaces free occurrences of variable `from` by the term `to`.
    /// Binders shadowing `from` stop the substitution; `to` must not
    /// contain variables that become captured (callers pass fresh names).
    pub fn substitute_var(&self, from: &str, to: &Term) -> Formula {
        let map = |v: &str| {
            if v == from {
                Some(to.clone())
            } else {
                None
            }
        };
        let sub_terms = |ts: &[Term]| -> Vec<Term> { ts.iter().map(|t| t.rename_vars(&map)).collect() };
        match self {
            Formula::Rel {
                negated,
                name,
                args,
            } => Formula::Rel {
                negated: *negated,
                name: name.clone(),
                args: sub_terms(args),
            },
            Formula::Eq {
                negated,
                left,
                right,
            } => Formula::Eq {
                negated: *negated,
                left: left.rename_vars(&map),
                right: right.rename_vars(&map),
            },
            Formula::Incl { left, right } => Formula::Incl {
                left: sub_terms(left),
                right: sub_terms(right),
            },
            Formula::Dep { left, right } => Formula::Dep {
                left: sub_terms(left),
                right: sub_terms(right),
            },
            Formula::Excl { left, right } => Formula::Excl {
                left: sub_terms(left),
                right: sub_terms(right),
            },
            Formula::Indep { left, right } => Formula::Indep {
                left: sub_terms(left),
                right: sub_terms(right),
            },
            Formula::CondIndep { cond, left, right } => Formula::CondIndep {
                cond: sub_terms(cond),
                left: sub_terms(left),
                right: sub_terms(right),
            },
            Formula::Not(a) => Formula::Not(Box::new(a.substitute_var(from, to))),
            Formula::Implies(a, b) => Formula::Implies(
                Box::new(a.substitute_var(from, to)),
                Box::new(b.substitute_var(from, to)),
            ),
            Formula::And(a, b) => {
                Formula::and(a.substitute_var(from, to), b.substitute_var(from, to))
            }
            Formula::Or(a, b) => {
                Formula::or(a.substitute_var(from, to), b.substitute_var(from, to))
            }
            Formula::Exists(v, b) => {
                if v == from {
                    self.clone()
                } else {
                    Formula::exists(v.clone(), b.substitute_var(from, to))
                }
            }
            Formula::Forall(v, b) => {
                if v == from {
                    self.clone()
                } else {
                    Formula::forall(v.clone(), b.substitute_var(from, to))
                }
            }
            Formula::Fix {
                op,
                rel,
                vars,
                body,
                args,
            } => {
                let new_args = sub_terms(args);
                let new_body = if vars.iter().any(|v| v == from) {
                    body.as_ref().clone()
                } else {
                    body.substitute_var(from, to)
                };
                Formula::Fix {
                    op: *op,
                    rel: rel.clone(),
                    vars: vars.clone(),
                    body: Box::new(new_body),
                    args: new_args,
                }
            }
        }
    }
}

/// Errors while building a [`Signature`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` is already declared")]
    Duplicate(String),
    #[error("arity of `{0}` must be at least 1")]
    ZeroArity(String),
}

/// Symbol declarations: relation, function and constant symbols of the
/// model vocabulary, plus a disjoint set of second-order relation variables
/// (the parameters threaded through the translations).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    rels: std::collections::BTreeMap<String, usize>,
    funs: std::collections::BTreeMap<String, usize>,
    consts: BTreeSet<String>,
    so_rels: std::collections::BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> Result<(), SignatureError> {
        if self.rels.contains_key(name)
            || self.funs.contains_key(name)
            || self.consts.contains(name)
            || self.so_rels.contains_key(name)
        {
            Err(SignatureError::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn add_rel(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SignatureError> {
        let name = name.into();
        if arity == 0 {
            return Err(SignatureError::ZeroArity(name));
        }
        self.check_fresh(&name)?;
        self.rels.insert(name, arity);
        Ok(())
    }

    pub fn add_fun(&mut self, name: impl Into<String>, arity: usize) -> Result<(), SignatureError> {
        let name = name.into();
        if arity == 0 {
            return Err(SignatureError::ZeroArity(name));
        }
        self.check_fresh(&name)?;
        self.funs.insert(name, arity);
        Ok(())
    }

    pub fn add_const(&mut self, name: impl Into<String>) -> Result<(), SignatureError> {
        let name = name.into();
        self.check_fresh(&name)?;
        self.consts.insert(name);
        Ok(())
    }

    pub fn add_so_rel(
        &mut self,
        name: impl Into<String>,
        arity: usize,
    ) -> Result<(), SignatureError> {
        let name = name.into();
        if arity == 0 {
            return Err(SignatureError::ZeroArity(name));
        }
        self.check_fresh(&name)?;
        self.so_rels.insert(name, arity);
        Ok(())
    }

    pub fn rel_arity(&self, name: &str) -> Option<usize> {
        self.rels.get(name).copied()
    }

    pub fn fun_arity(&self, name: &str) -> Option<usize> {
        self.funs.get(name).copied()
    }

    pub fn is_const(&self, name: &str) -> bool {
        self.consts.contains(name)
    }

    pub fn so_arity(&self, name: &str) -> Option<usize> {
        self.so_rels.get(name).copied()
    }

    pub fn rels(&self) -> impl Iterator<Item = (&str, usize)> {
        self.rels.iter().map(|(n, a)| (n.as_str(), *a))
    }

    pub fn consts(&self) -> impl Iterator<Item = &str> {
        self.consts.iter().map(|s| s.as_str())
    }
}

/// Deterministic generator for fresh variable and relation names, threaded
/// explicitly through the translations so outputs are reproducible.
///
/// Generated names live in the `_v<k>` / `_R<k>` namespace. Seeding via
/// [`FreshNames::avoiding`] skips past any such names already present in
/// the inputs, so re-translating previously generated formulas cannot
/// capture.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    next_var: u32,
    next_rel: u32,
}

impl FreshNames {
    pub fn new() -> Self {
        Self::default()
    }

    /// A generator whose counters start above every `_v<k>` / `_R<k>` name
    /// occurring in `inputs`.
    pub fn avoiding<'a>(inputs: impl IntoIterator<Item = &'a Formula>) -> Self {
        fn scan_name(name: &str, gen: &mut FreshNames) {
            if let Some(rest) = name.strip_prefix("_v") {
                if let Ok(k) = rest.parse::<u32>() {
                    gen.next_var = gen.next_var.max(k + 1);
                }
            }
            if let Some(rest) = name.strip_prefix("_R") {
                if let Ok(k) = rest.parse::<u32>() {
                    gen.next_rel = gen.next_rel.max(k + 1);
                }
            }
        }
        fn scan_term(t: &Term, gen: &mut FreshNames) {
            match t {
                Term::Var(v) => scan_name(v, gen),
                Term::Const(_) => {}
                Term::App(_, args) => args.iter().for_each(|a| scan_term(a, gen)),
            }
        }
        fn scan(f: &Formula, gen: &mut FreshNames) {
            match f {
                Formula::Rel { name, args, .. } => {
                    scan_name(name, gen);
                    args.iter().for_each(|t| scan_term(t, gen));
                }
                Formula::Eq { left, right, .. } => {
                    scan_term(left, gen);
                    scan_term(right, gen);
                }
                Formula::Incl { left, right }
                | Formula::Dep { left, right }
                | Formula::Excl { left, right }
                | Formula::Indep { left, right } => {
                    left.iter().chain(right).for_each(|t| scan_term(t, gen));
                }
                Formula::CondIndep { cond, left, right } => cond
                    .iter()
                    .chain(left)
                    .chain(right)
                    .for_each(|t| scan_term(t, gen)),
                Formula::Not(a) => scan(a, gen),
                Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
                    scan(a, gen);
                    scan(b, gen);
                }
                Formula::Exists(v, b) | Formula::Forall(v, b) => {
                    scan_name(v, gen);
                    scan(b, gen);
                }
                Formula::Fix {
                    rel,
                    vars,
                    body,
                    args,
                    ..
                } => {
                    scan_name(rel, gen);
                    vars.iter().for_each(|v| scan_name(v, gen));
                    args.iter().for_each(|t| scan_term(t, gen));
                    scan(body, gen);
                }
            }
        }
        let mut gen = FreshNames::new();
        for f in inputs {
            scan(f, &mut gen);
        }
        gen
    }

    pub fn var(&mut self) -> String {
        let name = format!("_v{}", self.next_var);
        self.next_var += 1;
        name
    }

    pub fn rel(&mut self) -> String {
        let name = format!("_R{}", self.next_rel);
        self.next_rel += 1;
        name
    }
}

#[cfg(test)]
mod tests;
