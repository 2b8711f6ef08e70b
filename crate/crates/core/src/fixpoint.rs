//! Evaluator for formulas with greatest/least fixed-point operators over
//! finite structures, via the induced relation transformer and
//! Knaster-Tarski iteration.
//!
//! The iteration runs from the top (gfp) or bottom (lfp); positivity of the
//! bound relation symbol makes the transformer monotone, so the chain
//! stabilizes within `|universe|^k + 1` steps. The transformer itself is
//! computed relationally: each body subformula yields the set of its
//! satisfying assignments (a column-labelled relation), combined by
//! joins/projections. That keeps one transformer application polynomial in
//! the relation sizes instead of re-walking the body per candidate tuple,
//! which is what makes the translated formulas (deeply nested fixed points
//! over wide tuples) evaluable at non-toy universe sizes.
//!
//! Fixed points are cached per (node, outer bindings, pinned variables);
//! bindings are compared by pointer, so a stabilized outer iteration reuses
//! inner fixed points at zero cost.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::error::EvalError;
use crate::structures::{Assignment, Element, Relation, Structure};
use crate::syntax::{FixOp, Formula, Term};

/// A structure together with a stack of second-order relation bindings
/// (innermost last; bindings shadow by name, then the structure's own
/// parameter mapping applies).
#[derive(Debug, Clone)]
pub struct FixpointContext<'m> {
    m: &'m Structure,
    bindings: Vec<(String, Arc<Relation>)>,
}

impl<'m> FixpointContext<'m> {
    pub fn new(m: &'m Structure) -> Self {
        FixpointContext {
            m,
            bindings: Vec::new(),
        }
    }

    pub fn structure(&self) -> &'m Structure {
        self.m
    }

    /// Pushes a binding; later bindings shadow earlier ones by name.
    pub fn bind(&mut self, name: impl Into<String>, rel: Relation) {
        self.bindings.push((name.into(), Arc::new(rel)));
    }

    pub fn with_binding(mut self, name: impl Into<String>, rel: Relation) -> Self {
        self.bind(name, rel);
        self
    }

    pub fn binding(&self, name: &str) -> Option<&Relation> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.as_ref())
            .or_else(|| self.m.param(name))
    }
}

/// `Γ(P)`: the relation transformer induced by `body` with `rel` bound to
/// `p`, computed over the bound tuple `vars`. Free first-order variables of
/// `body` must lie within `vars`.
pub fn gamma(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
    p: &Relation,
) -> Result<Relation, EvalError> {
    validate_fix_shape(body, rel, vars)?;
    if p.arity() != vars.len() {
        return Err(EvalError::ArityMismatch {
            name: rel.to_string(),
            declared: vars.len(),
            found: p.arity(),
        });
    }
    require_no_loose_vars(body, vars)?;
    let mut eng = Engine::new(ctx.m);
    let mut bindings = ctx.bindings.clone();
    bindings.push((rel.to_string(), Arc::new(p.clone())));
    let sat = eng.sat_set(&mut bindings, &BTreeMap::new(), body)?;
    Ok(expand_to_tuple(&sat, vars, ctx.m.universe()))
}

/// Greatest fixed point of the transformer: iterate downward from the full
/// relation until stable.
pub fn gfp(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
) -> Result<Relation, EvalError> {
    extreme_fixpoint(ctx, body, rel, vars, FixOp::Gfp)
}

/// Least fixed point: iterate upward from the empty relation.
pub fn lfp(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
) -> Result<Relation, EvalError> {
    extreme_fixpoint(ctx, body, rel, vars, FixOp::Lfp)
}

fn extreme_fixpoint(
    ctx: &FixpointContext,
    body: &Formula,
    rel: &str,
    vars: &[String],
    op: FixOp,
) -> Result<Relation, EvalError> {
    validate_fix_shape(body, rel, vars)?;
    require_no_loose_vars(body, vars)?;
    let node = Formula::Fix {
        op,
        rel: rel.to_string(),
        vars: vars.to_vec(),
        body: Box::new(body.clone()),
        args: vars.iter().map(|v| Term::Var(v.clone())).collect(),
    };
    let mut eng = Engine::new(ctx.m);
    let mut bindings = ctx.bindings.clone();
    let fp = eng.fixpoint_value(&mut bindings, &BTreeMap::new(), &node)?;
    Ok(fp.as_ref().clone())
}

fn require_no_loose_vars(body: &Formula, vars: &[String]) -> Result<(), EvalError> {
    if let Some(v) = body.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(EvalError::UnboundVariable(v));
    }
    Ok(())
}

fn fix_error(rel: &str, message: &str) -> EvalError {
    if message.contains("negatively") {
        EvalError::PositivityViolation(rel.to_string())
    } else {
        EvalError::NotNnf(message.to_string())
    }
}

fn validate_fix_shape(body: &Formula, rel: &str, vars: &[String]) -> Result<(), EvalError> {
    if vars.is_empty() {
        return Err(EvalError::ArityMismatch {
            name: rel.to_string(),
            declared: 1,
            found: 0,
        });
    }
    let mut seen = BTreeSet::new();
    for v in vars {
        if !seen.insert(v) {
            return Err(EvalError::TeamDomain(format!(
                "repeated bound variable `{v}`"
            )));
        }
    }
    if !body.check_positive(rel) {
        return Err(EvalError::PositivityViolation(rel.to_string()));
    }
    body.check_pgfp().map_err(|e| fix_error(rel, &e))
}

/// Tarski-style satisfaction extended with the fixed-point clause: a
/// `gfp`/`lfp` node holds iff the applied term tuple's value lies in the
/// computed fixed point. Formulas must be in the fixed-point fragment
/// (NNF, no dependency atoms).
pub fn eval_pgfp(ctx: &FixpointContext, s: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    f.check_pgfp().map_err(EvalError::NotNnf)?;
    let mut eng = Engine::new(ctx.m);
    let mut bindings = ctx.bindings.clone();
    let mut env: Vec<(String, Element)> = s
        .vars()
        .map(|v| (v.to_string(), s.get(v).unwrap()))
        .collect();
    eng.eval_point(&mut bindings, &mut env, f)
}

/// Evaluates a fixed-point-fragment formula at every assignment of a team
/// (the pointwise reading used on translated formulas). One engine serves
/// the whole team, so fixed points are shared across assignments.
pub fn eval_pgfp_team(
    ctx: &FixpointContext,
    team: &crate::structures::Team,
    f: &Formula,
) -> Result<bool, EvalError> {
    f.check_pgfp().map_err(EvalError::NotNnf)?;
    let mut eng = Engine::new(ctx.m);
    let mut bindings = ctx.bindings.clone();
    for s in team.assignments() {
        let mut env: Vec<(String, Element)> = s
            .vars()
            .map(|v| (v.to_string(), s.get(v).unwrap()))
            .collect();
        if !eng.eval_point(&mut bindings, &mut env, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Column-labelled relation: the satisfying assignments of a subformula
/// over its (sorted) unpinned free variables. Rows are sorted and unique.
struct SatRel {
    vars: Vec<String>,
    rows: Vec<Vec<Element>>,
}

impl SatRel {
    fn normalize(&mut self) {
        self.rows.sort_unstable();
        self.rows.dedup();
    }
}

type Bindings = Vec<(String, Arc<Relation>)>;

/// Cache key for a fixed-point computation: the node's address, the
/// resolved binding pointers for every second-order name the node uses,
/// and the pinned values of outer first-order variables free in the body.
#[derive(PartialEq, Eq, Hash, Clone)]
struct FpKey {
    node: usize,
    bindings: Vec<(String, usize)>,
    pins: Vec<(String, Element)>,
}

const FP_CACHE_TUPLE_BUDGET: usize = 4_000_000;

struct Engine<'m> {
    m: &'m Structure,
    fp_cache: HashMap<FpKey, Arc<Relation>>,
    fp_order: VecDeque<FpKey>,
    fp_tuples: usize,
}

impl<'m> Engine<'m> {
    fn new(m: &'m Structure) -> Self {
        Engine {
            m,
            fp_cache: HashMap::new(),
            fp_order: VecDeque::new(),
            fp_tuples: 0,
        }
    }

    fn resolve<'a>(&'a self, bindings: &'a Bindings, name: &str) -> Option<&'a Relation> {
        bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.as_ref())
            .or_else(|| self.m.param(name))
            .or_else(|| self.m.rel(name))
    }

    // ------------------------------------------------------------------
    // Point evaluation (single assignment).
    // ------------------------------------------------------------------

    fn eval_point(
        &mut self,
        bindings: &mut Bindings,
        env: &mut Vec<(String, Element)>,
        f: &Formula,
    ) -> Result<bool, EvalError> {
        match f {
            Formula::Rel {
                negated,
                name,
                args,
            } => {
                let tuple: Vec<Element> = args
                    .iter()
                    .map(|a| self.term_value(env, a))
                    .collect::<Result<_, _>>()?;
                let rel = self
                    .resolve(bindings, name)
                    .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
                if rel.arity() != tuple.len() {
                    return Err(EvalError::ArityMismatch {
                        name: name.clone(),
                        declared: rel.arity(),
                        found: tuple.len(),
                    });
                }
                Ok(rel.contains(&tuple) != *negated)
            }
            Formula::Eq {
                negated,
                left,
                right,
            } => {
                let l = self.term_value(env, left)?;
                let r = self.term_value(env, right)?;
                Ok((l == r) != *negated)
            }
            Formula::And(a, b) => {
                Ok(self.eval_point(bindings, env, a)? && self.eval_point(bindings, env, b)?)
            }
            Formula::Or(a, b) => {
                Ok(self.eval_point(bindings, env, a)? || self.eval_point(bindings, env, b)?)
            }
            Formula::Exists(v, body) => {
                for e in 0..self.m.universe() {
                    env.push((v.clone(), e));
                    let hit = self.eval_point(bindings, env, body);
                    env.pop();
                    if hit? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for e in 0..self.m.universe() {
                    env.push((v.clone(), e));
                    let hit = self.eval_point(bindings, env, body);
                    env.pop();
                    if !hit? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Fix {
                vars, body, args, ..
            } => {
                let mut pins = BTreeMap::new();
                for v in body.free_vars() {
                    if vars.contains(&v) {
                        continue;
                    }
                    let e = lookup(env, &v).ok_or(EvalError::UnboundVariable(v.clone()))?;
                    pins.insert(v, e);
                }
                let fp = self.fixpoint_value(bindings, &pins, f)?;
                let tuple: Vec<Element> = args
                    .iter()
                    .map(|a| self.term_value(env, a))
                    .collect::<Result<_, _>>()?;
                Ok(fp.contains(&tuple))
            }
            Formula::Not(_) | Formula::Implies(..) => {
                Err(EvalError::NotNnf("apply to_nnf before evaluating".into()))
            }
            _ => Err(EvalError::DependencyAtomNotSupported),
        }
    }

    fn term_value(&self, env: &[(String, Element)], t: &Term) -> Result<Element, EvalError> {
        match t {
            Term::Var(v) => lookup(env, v).ok_or_else(|| EvalError::UnboundVariable(v.clone())),
            Term::Const(c) => self
                .m
                .constant(c)
                .ok_or_else(|| EvalError::UnknownSymbol(c.clone())),
            Term::App(f, args) => {
                let fun = self
                    .m
                    .fun(f)
                    .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
                let vals: Vec<Element> = args
                    .iter()
                    .map(|a| self.term_value(env, a))
                    .collect::<Result<_, _>>()?;
                fun.apply(&vals)
                    .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))
            }
        }
    }

    // ------------------------------------------------------------------
    // Fixed points.
    // ------------------------------------------------------------------

    /// Computes the extreme fixed point denoted by `node` (a `Fix`
    /// formula), with outer variables pinned by `pins`. Results are cached;
    /// binding identity is by `Arc` pointer, so hits require the same
    /// binding objects, which is exactly the repetition pattern the
    /// evaluation produces.
    fn fixpoint_value(
        &mut self,
        bindings: &mut Bindings,
        pins: &BTreeMap<String, Element>,
        node: &Formula,
    ) -> Result<Arc<Relation>, EvalError> {
        let Formula::Fix {
            op,
            rel,
            vars,
            body,
            ..
        } = node
        else {
            unreachable!("fixpoint_value on a non-fix node");
        };
        validate_fix_shape(body, rel, vars)?;
        let key = FpKey {
            node: node as *const Formula as usize,
            bindings: self.so_binding_snapshot(bindings, node),
            pins: pins.iter().map(|(v, e)| (v.clone(), *e)).collect(),
        };
        if let Some(hit) = self.fp_cache.get(&key) {
            return Ok(hit.clone());
        }
        let n = self.m.universe();
        let k = vars.len();
        let mut p = Arc::new(match op {
            FixOp::Gfp => Relation::full(n, k),
            FixOp::Lfp => Relation::new(k),
        });
        let max_steps = (n as u64).pow(k as u32) + 1;
        let mut converged = false;
        for _ in 0..=max_steps {
            bindings.push((rel.clone(), p.clone()));
            let sat = self.sat_set(bindings, pins, body);
            bindings.pop();
            let next = expand_to_tuple(&sat?, vars, n);
            if next == *p {
                converged = true;
                break;
            }
            p = Arc::new(next);
        }
        if !converged {
            return Err(EvalError::FixpointDiverged);
        }
        self.fp_tuples += p.len().max(1);
        self.fp_cache.insert(key.clone(), p.clone());
        self.fp_order.push_back(key);
        while self.fp_tuples > FP_CACHE_TUPLE_BUDGET {
            match self.fp_order.pop_front() {
                Some(old) => {
                    if let Some(rel) = self.fp_cache.remove(&old) {
                        self.fp_tuples -= rel.len().max(1);
                    }
                }
                None => break,
            }
        }
        Ok(p)
    }

    /// The resolved binding pointer for every second-order name mentioned
    /// in the node (0 when the name falls through to the structure, which
    /// is constant for the engine's lifetime).
    fn so_binding_snapshot(&self, bindings: &Bindings, node: &Formula) -> Vec<(String, usize)> {
        let mut names = BTreeSet::new();
        collect_rel_names(node, &mut names);
        names
            .into_iter()
            .map(|name| {
                let ptr = bindings
                    .iter()
                    .rev()
                    .find(|(n, _)| *n == name)
                    .map(|(_, r)| Arc::as_ptr(r) as usize)
                    .unwrap_or(0);
                (name, ptr)
            })
            .collect()
    }

    // ------------------------------------------------------------------
    // Relational satisfaction sets.
    // ------------------------------------------------------------------

    /// The set of satisfying assignments of `f` over its free variables
    /// not pinned by `pins`, as a column-labelled relation.
    fn sat_set(
        &mut self,
        bindings: &mut Bindings,
        pins: &BTreeMap<String, Element>,
        f: &Formula,
    ) -> Result<SatRel, EvalError> {
        let n = self.m.universe();
        match f {
            Formula::Rel {
                negated,
                name,
                args,
            } => {
                let simple = !*negated
                    && args
                        .iter()
                        .all(|a| matches!(a, Term::Var(v) if !pins.contains_key(v)));
                if simple {
                    return self.sat_rel_positive_vars(bindings, name, args);
                }
                self.sat_by_enumeration(bindings, pins, f)
            }
            Formula::Eq { .. } => self.sat_by_enumeration(bindings, pins, f),
            Formula::And(a, b) => {
                let left = self.sat_set(bindings, pins, a)?;
                let right = self.sat_set(bindings, pins, b)?;
                Ok(join(&left, &right))
            }
            Formula::Or(a, b) => {
                let left = self.sat_set(bindings, pins, a)?;
                let right = self.sat_set(bindings, pins, b)?;
                Ok(union_padded(&left, &right, n))
            }
            Formula::Exists(v, body) => {
                let sat = if pins.contains_key(v) {
                    // The quantifier shadows the pin inside its body.
                    let mut inner = pins.clone();
                    inner.remove(v);
                    self.sat_set(bindings, &inner, body)?
                } else {
                    self.sat_set(bindings, pins, body)?
                };
                Ok(project_out(&sat, v))
            }
            Formula::Forall(v, body) => {
                let sat = if pins.contains_key(v) {
                    let mut inner = pins.clone();
                    inner.remove(v);
                    self.sat_set(bindings, &inner, body)?
                } else {
                    self.sat_set(bindings, pins, body)?
                };
                Ok(keep_full_groups(&sat, v, n))
            }
            Formula::Fix {
                vars, body, args, ..
            } => self.sat_fix(bindings, pins, f, vars, body, args),
            Formula::Not(_) | Formula::Implies(..) => {
                Err(EvalError::NotNnf("apply to_nnf before evaluating".into()))
            }
            _ => Err(EvalError::DependencyAtomNotSupported),
        }
    }

    /// Positive relational literal whose arguments are all unpinned
    /// variables: derive the satisfaction set straight from the relation's
    /// tuples (filtering repeated-variable collisions).
    fn sat_rel_positive_vars(
        &mut self,
        bindings: &Bindings,
        name: &str,
        args: &[Term],
    ) -> Result<SatRel, EvalError> {
        let arg_vars: Vec<&str> = args
            .iter()
            .map(|a| match a {
                Term::Var(v) => v.as_str(),
                _ => unreachable!("checked by caller"),
            })
            .collect();
        let rel = self
            .resolve(bindings, name)
            .ok_or_else(|| EvalError::UnknownSymbol(name.to_string()))?;
        if rel.arity() != args.len() {
            return Err(EvalError::ArityMismatch {
                name: name.to_string(),
                declared: rel.arity(),
                found: args.len(),
            });
        }
        let cols: Vec<String> = arg_vars
            .iter()
            .map(|v| v.to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let positions: Vec<usize> = cols
            .iter()
            .map(|c| arg_vars.iter().position(|v| *v == c).unwrap())
            .collect();
        // First occurrence index per argument position, for repeated vars.
        let firsts: Vec<usize> = arg_vars
            .iter()
            .map(|v| arg_vars.iter().position(|w| w == v).unwrap())
            .collect();
        let mut rows = Vec::with_capacity(rel.len());
        'tuples: for t in rel.iter() {
            for (i, &first) in firsts.iter().enumerate() {
                if t[i] != t[first] {
                    continue 'tuples;
                }
            }
            rows.push(positions.iter().map(|&i| t[i]).collect());
        }
        let mut sat = SatRel { vars: cols, rows };
        sat.normalize();
        Ok(sat)
    }

    /// Fallback for literals: enumerate assignments over the unpinned free
    /// variables and evaluate pointwise.
    fn sat_by_enumeration(
        &mut self,
        bindings: &mut Bindings,
        pins: &BTreeMap<String, Element>,
        f: &Formula,
    ) -> Result<SatRel, EvalError> {
        let cols: Vec<String> = f
            .free_vars()
            .into_iter()
            .filter(|v| !pins.contains_key(v))
            .collect();
        let mut env: Vec<(String, Element)> = pins.iter().map(|(v, e)| (v.clone(), *e)).collect();
        let base = env.len();
        let mut rows = Vec::new();
        for row in crate::enumerate::all_rows(self.m.universe(), cols.len()) {
            env.truncate(base);
            for (v, e) in cols.iter().zip(&row) {
                env.push((v.clone(), *e));
            }
            if self.eval_point(bindings, &mut env, f)? {
                rows.push(row);
            }
        }
        Ok(SatRel { vars: cols, rows })
    }

    /// Fixed-point node inside a relational computation. The usual case —
    /// applied terms are distinct unpinned variables and the body has no
    /// loose outer variables — reuses the fixed point's tuples directly;
    /// anything else enumerates the candidate columns.
    fn sat_fix(
        &mut self,
        bindings: &mut Bindings,
        pins: &BTreeMap<String, Element>,
        node: &Formula,
        vars: &[String],
        body: &Formula,
        args: &[Term],
    ) -> Result<SatRel, EvalError> {
        let loose: Vec<String> = body
            .free_vars()
            .into_iter()
            .filter(|v| !vars.contains(v) && !pins.contains_key(v))
            .collect();
        let mut arg_vars = BTreeSet::new();
        for a in args {
            a.collect_vars(&mut arg_vars);
        }
        let cols: Vec<String> = arg_vars
            .iter()
            .filter(|v| !pins.contains_key(*v))
            .cloned()
            .chain(loose.iter().cloned())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();

        let distinct_plain_args = {
            let mut seen = BTreeSet::new();
            args.iter().all(|a| match a {
                Term::Var(v) => !pins.contains_key(v) && seen.insert(v.clone()),
                _ => false,
            })
        };
        if loose.is_empty() && distinct_plain_args {
            let body_pins: BTreeMap<String, Element> = body
                .free_vars()
                .into_iter()
                .filter(|v| !vars.contains(v))
                .map(|v| {
                    let e = pins[&v];
                    (v, e)
                })
                .collect();
            let fp = self.fixpoint_value(bindings, &body_pins, node)?;
            // Reorder fixed-point tuples from argument order to column order.
            let arg_names: Vec<&str> = args
                .iter()
                .map(|a| match a {
                    Term::Var(v) => v.as_str(),
                    _ => unreachable!(),
                })
                .collect();
            let positions: Vec<usize> = cols
                .iter()
                .map(|c| arg_names.iter().position(|v| v == c).unwrap())
                .collect();
            let mut sat = SatRel {
                vars: cols,
                rows: fp
                    .iter()
                    .map(|t| positions.iter().map(|&i| t[i]).collect())
                    .collect(),
            };
            sat.normalize();
            return Ok(sat);
        }

        // General fallback: enumerate the columns, compute the fixed point
        // per loose-variable pinning (cached), test membership per row.
        let mut rows = Vec::new();
        let mut env: Vec<(String, Element)> = pins.iter().map(|(v, e)| (v.clone(), *e)).collect();
        let base = env.len();
        for row in crate::enumerate::all_rows(self.m.universe(), cols.len()) {
            env.truncate(base);
            for (v, e) in cols.iter().zip(&row) {
                env.push((v.clone(), *e));
            }
            let mut body_pins = BTreeMap::new();
            for v in body.free_vars() {
                if vars.contains(&v) {
                    continue;
                }
                let e = lookup(&env, &v).ok_or(EvalError::UnboundVariable(v.clone()))?;
                body_pins.insert(v, e);
            }
            let fp = self.fixpoint_value(bindings, &body_pins, node)?;
            let tuple: Vec<Element> = args
                .iter()
                .map(|a| self.term_value(&env, a))
                .collect::<Result<_, _>>()?;
            if fp.contains(&tuple) {
                rows.push(row);
            }
        }
        Ok(SatRel { vars: cols, rows })
    }
}

fn lookup(env: &[(String, Element)], v: &str) -> Option<Element> {
    env.iter().rev().find(|(name, _)| name == v).map(|(_, e)| *e)
}

fn collect_rel_names(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Rel { name, .. } => {
            out.insert(name.clone());
        }
        Formula::Not(a) => collect_rel_names(a, out),
        Formula::Implies(a, b) | Formula::And(a, b) | Formula::Or(a, b) => {
            collect_rel_names(a, out);
            collect_rel_names(b, out);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => collect_rel_names(b, out),
        Formula::Fix { rel, body, .. } => {
            let mut inner = BTreeSet::new();
            collect_rel_names(body, &mut inner);
            inner.remove(rel); // bound inside
            out.extend(inner);
        }
        _ => {}
    }
}

/// Lifts a satisfaction set (over sorted columns, possibly missing some
/// bound variables) to a relation over the full bound tuple in declared
/// order; missing variables range over the whole universe.
fn expand_to_tuple(sat: &SatRel, vars: &[String], n: Element) -> Relation {
    debug_assert!(
        sat.vars.iter().all(|c| vars.contains(c)),
        "satisfaction set has columns outside the bound tuple"
    );
    let missing: Vec<usize> = vars
        .iter()
        .enumerate()
        .filter(|(_, v)| !sat.vars.contains(v))
        .map(|(i, _)| i)
        .collect();
    let present: Vec<(usize, usize)> = vars
        .iter()
        .enumerate()
        .filter_map(|(i, v)| sat.vars.iter().position(|c| c == v).map(|j| (i, j)))
        .collect();
    let mut out = Relation::new(vars.len());
    let fillers = crate::enumerate::all_rows(n, missing.len());
    for row in &sat.rows {
        for filler in &fillers {
            let mut t = vec![0; vars.len()];
            for &(i, j) in &present {
                t[i] = row[j];
            }
            for (&i, &e) in missing.iter().zip(filler) {
                t[i] = e;
            }
            out.insert(t);
        }
    }
    out
}

/// Natural join on shared columns.
fn join(a: &SatRel, b: &SatRel) -> SatRel {
    // Index the smaller side.
    let (a, b) = if a.rows.len() <= b.rows.len() {
        (a, b)
    } else {
        (b, a)
    };
    let shared: Vec<String> = a
        .vars
        .iter()
        .filter(|v| b.vars.contains(v))
        .cloned()
        .collect();
    let out_vars: Vec<String> = a
        .vars
        .iter()
        .chain(b.vars.iter())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let a_shared: Vec<usize> = shared
        .iter()
        .map(|v| a.vars.iter().position(|w| w == v).unwrap())
        .collect();
    let b_shared: Vec<usize> = shared
        .iter()
        .map(|v| b.vars.iter().position(|w| w == v).unwrap())
        .collect();
    enum Src {
        A(usize),
        B(usize),
    }
    let sources: Vec<Src> = out_vars
        .iter()
        .map(|v| match a.vars.iter().position(|w| w == v) {
            Some(i) => Src::A(i),
            None => Src::B(b.vars.iter().position(|w| w == v).unwrap()),
        })
        .collect();
    let mut index: HashMap<Vec<Element>, Vec<&Vec<Element>>> = HashMap::new();
    for row in &a.rows {
        let key: Vec<Element> = a_shared.iter().map(|&i| row[i]).collect();
        index.entry(key).or_default().push(row);
    }
    let mut rows = Vec::new();
    for brow in &b.rows {
        let key: Vec<Element> = b_shared.iter().map(|&i| brow[i]).collect();
        if let Some(matches) = index.get(&key) {
            for arow in matches {
                rows.push(
                    sources
                        .iter()
                        .map(|s| match s {
                            Src::A(i) => arow[*i],
                            Src::B(i) => brow[*i],
                        })
                        .collect(),
                );
            }
        }
    }
    let mut sat = SatRel {
        vars: out_vars,
        rows,
    };
    sat.normalize();
    sat
}

/// Union after padding both sides to the same column set (missing columns
/// range over the universe).
fn union_padded(a: &SatRel, b: &SatRel, n: Element) -> SatRel {
    let out_vars: Vec<String> = a
        .vars
        .iter()
        .chain(b.vars.iter())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows = Vec::new();
    for side in [a, b] {
        let missing: Vec<usize> = out_vars
            .iter()
            .enumerate()
            .filter(|(_, v)| !side.vars.contains(v))
            .map(|(i, _)| i)
            .collect();
        let present: Vec<(usize, usize)> = out_vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| side.vars.iter().position(|c| c == v).map(|j| (i, j)))
            .collect();
        let fillers = crate::enumerate::all_rows(n, missing.len());
        for row in &side.rows {
            for filler in &fillers {
                let mut t = vec![0; out_vars.len()];
                for &(i, j) in &present {
                    t[i] = row[j];
                }
                for (&i, &e) in missing.iter().zip(filler) {
                    t[i] = e;
                }
                rows.push(t);
            }
        }
    }
    let mut sat = SatRel {
        vars: out_vars,
        rows,
    };
    sat.normalize();
    sat
}

/// Existential projection: drop the column (if present) and dedupe.
fn project_out(sat: &SatRel, v: &str) -> SatRel {
    let Some(idx) = sat.vars.iter().position(|w| w == v) else {
        return SatRel {
            vars: sat.vars.clone(),
            rows: sat.rows.clone(),
        };
    };
    let vars: Vec<String> = sat
        .vars
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, w)| w.clone())
        .collect();
    let mut rows: Vec<Vec<Element>> = sat
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .filter(|(i, _)| *i != idx)
                .map(|(_, e)| *e)
                .collect()
        })
        .collect();
    rows.sort_unstable();
    rows.dedup();
    SatRel { vars, rows }
}

/// Universal projection: keep the groups (over the other columns) that
/// carry all `n` values of `v`.
fn keep_full_groups(sat: &SatRel, v: &str, n: Element) -> SatRel {
    let Some(idx) = sat.vars.iter().position(|w| w == v) else {
        return SatRel {
            vars: sat.vars.clone(),
            rows: sat.rows.clone(),
        };
    };
    let vars: Vec<String> = sat
        .vars
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != idx)
        .map(|(_, w)| w.clone())
        .collect();
    let mut groups: HashMap<Vec<Element>, BTreeSet<Element>> = HashMap::new();
    for r in &sat.rows {
        let rest: Vec<Element> = r
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != idx)
            .map(|(_, e)| *e)
            .collect();
        groups.entry(rest).or_default().insert(r[idx]);
    }
    let mut rows: Vec<Vec<Element>> = groups
        .into_iter()
        .filter(|(_, vals)| vals.len() == n as usize)
        .map(|(rest, _)| rest)
        .collect();
    rows.sort_unstable();
    SatRel { vars, rows }
}

#[cfg(test)]
mod tests;
