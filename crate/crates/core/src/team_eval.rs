//! Definition-literal evaluators: the lax team semantics by brute-force
//! enumeration (`eval_naive`), classical Tarski satisfaction for the
//! first-order fragment (`eval_tarski`), and the pointwise lift
//! (`eval_flat`).
//!
//! The naive engine exists to be obviously correct, not fast: disjunction
//! enumerates all 3^|X| covers, existential quantification all witness
//! teams of extensions. Hard input guards refuse blowups unless `force`
//! is set.

use std::collections::HashMap;

use crate::error::EvalError;
use crate::structures::{eval_term, Assignment, Element, Structure, Team};
use crate::syntax::{Formula, Term};

/// How `eval_naive` enumerates witnesses at an existential quantifier.
/// `WitnessTeams` is the production route; `ChoiceFunctions` the
/// independent cross-check of the same clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExistsStrategy {
    #[default]
    WitnessTeams,
    ChoiceFunctions,
}

/// Tuning knobs for the naive engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct NaiveOptions {
    /// Override the enumeration guards.
    pub force: bool,
    pub exists: ExistsStrategy,
}

/// Candidate-extension guard at exists-nodes: refuse when |X|·n exceeds
/// this (2^24 subsets), unless forced.
pub const EXISTS_GUARD: usize = 24;
/// Cover guard at or-nodes: refuse when |X| exceeds this (3^15 covers),
/// unless forced.
pub const SPLIT_GUARD: usize = 15;

/// Lax team semantics, exactly per the definitional clauses.
pub fn eval_naive(m: &Structure, x: &Team, f: &Formula) -> Result<bool, EvalError> {
    eval_naive_opts(m, x, f, NaiveOptions::default())
}

pub fn eval_naive_opts(
    m: &Structure,
    x: &Team,
    f: &Formula,
    opts: NaiveOptions,
) -> Result<bool, EvalError> {
    check_team_fragment(f)?;
    if !x.is_empty() {
        for v in f.free_vars() {
            if x.col_index(&v).is_none() {
                return Err(EvalError::UnboundVariable(v));
            }
        }
    }
    let mut ids = HashMap::new();
    assign_ids(f, &mut ids);
    let mut ev = Naive {
        m,
        opts,
        ids,
        memo: HashMap::new(),
    };
    ev.eval(x, f)
}

fn check_team_fragment(f: &Formula) -> Result<(), EvalError> {
    match f {
        Formula::Fix { .. } => Err(EvalError::FixpointNotSupported),
        Formula::Not(inner) => {
            if inner.is_literal() {
                // A stray `Not` over a literal is harmless but still not
                // NNF; reject uniformly so callers normalize first.
                Err(EvalError::NotNnf("apply to_nnf before evaluating".into()))
            } else {
                Err(EvalError::NotNnf(format!(
                    "negation over a non-literal `{inner}`"
                )))
            }
        }
        Formula::Implies(..) => Err(EvalError::NotNnf(
            "implication must be desugared by to_nnf".into(),
        )),
        Formula::And(a, b) | Formula::Or(a, b) => {
            check_team_fragment(a)?;
            check_team_fragment(b)
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => check_team_fragment(b),
        _ => Ok(()),
    }
}

fn assign_ids(f: &Formula, ids: &mut HashMap<usize, u32>) {
    let next = ids.len() as u32;
    ids.insert(f as *const Formula as usize, next);
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            assign_ids(a, ids);
            assign_ids(b, ids);
        }
        Formula::Exists(_, b) | Formula::Forall(_, b) => assign_ids(b, ids),
        _ => {}
    }
}

struct Naive<'a> {
    m: &'a Structure,
    opts: NaiveOptions,
    ids: HashMap<usize, u32>,
    memo: HashMap<(u32, Vec<Vec<Element>>), bool>,
}

impl<'a> Naive<'a> {
    fn eval(&mut self, x: &Team, f: &Formula) -> Result<bool, EvalError> {
        // Empty team property: every clause below degenerates to true.
        if x.is_empty() {
            return Ok(true);
        }
        let id = self.ids[&(f as *const Formula as usize)];
        let key = (id, x.rows().cloned().collect::<Vec<_>>());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let result = self.eval_uncached(x, f)?;
        self.memo.insert(key, result);
        Ok(result)
    }

    fn eval_uncached(&mut self, x: &Team, f: &Formula) -> Result<bool, EvalError> {
        match f {
            Formula::Rel { .. } | Formula::Eq { .. } => {
                for s in x.assignments() {
                    if !eval_tarski(self.m, &s, f)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Incl { left, right } => {
                let lv = self.tuple_values(x, left)?;
                let rv: std::collections::BTreeSet<_> =
                    self.tuple_values(x, right)?.into_iter().collect();
                Ok(lv.into_iter().all(|t| rv.contains(&t)))
            }
            Formula::Dep { left, right } => {
                let lv = self.tuple_values(x, left)?;
                let rv = self.tuple_values(x, right)?;
                let mut seen: HashMap<Vec<Element>, Vec<Element>> = HashMap::new();
                for (l, r) in lv.into_iter().zip(rv) {
                    if let Some(prev) = seen.get(&l) {
                        if *prev != r {
                            return Ok(false);
                        }
                    } else {
                        seen.insert(l, r);
                    }
                }
                Ok(true)
            }
            Formula::Excl { left, right } => {
                let lv: std::collections::BTreeSet<_> =
                    self.tuple_values(x, left)?.into_iter().collect();
                let rv: std::collections::BTreeSet<_> =
                    self.tuple_values(x, right)?.into_iter().collect();
                Ok(lv.is_disjoint(&rv))
            }
            Formula::Indep { left, right } => {
                let lv = self.tuple_values(x, left)?;
                let rv = self.tuple_values(x, right)?;
                let pairs: std::collections::BTreeSet<_> =
                    lv.iter().cloned().zip(rv.iter().cloned()).collect();
                for l in &lv {
                    for r in &rv {
                        if !pairs.contains(&(l.clone(), r.clone())) {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Formula::CondIndep { cond, left, right } => {
                let cv = self.tuple_values(x, cond)?;
                let lv = self.tuple_values(x, left)?;
                let rv = self.tuple_values(x, right)?;
                let mut groups: HashMap<&Vec<Element>, Vec<usize>> = HashMap::new();
                for (i, c) in cv.iter().enumerate() {
                    groups.entry(c).or_default().push(i);
                }
                for members in groups.values() {
                    let triples: std::collections::BTreeSet<_> = members
                        .iter()
                        .map(|&i| (lv[i].clone(), rv[i].clone()))
                        .collect();
                    for &i in members {
                        for &j in members {
                            if !triples.contains(&(lv[i].clone(), rv[j].clone())) {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
            Formula::And(a, b) => Ok(self.eval(x, a)? && self.eval(x, b)?),
            Formula::Or(a, b) => self.eval_or(x, a, b),
            Formula::Exists(v, body) => match self.opts.exists {
                ExistsStrategy::WitnessTeams => self.eval_exists_witness(x, v, body),
                ExistsStrategy::ChoiceFunctions => self.eval_exists_choice(x, v, body),
            },
            Formula::Forall(v, body) => {
                let dup = x.duplicate(v, self.m);
                self.eval(&dup, body)
            }
            Formula::Fix { .. } => Err(EvalError::FixpointNotSupported),
            Formula::Not(_) | Formula::Implies(..) => {
                Err(EvalError::NotNnf("apply to_nnf before evaluating".into()))
            }
        }
    }

    /// TS-∨: enumerate all covers X = Y ∪ Z, each row placed in Y, Z, or
    /// both (lax semantics allows overlap).
    fn eval_or(&mut self, x: &Team, a: &Formula, b: &Formula) -> Result<bool, EvalError> {
        let rows: Vec<Vec<Element>> = x.rows().cloned().collect();
        let k = rows.len();
        if k > SPLIT_GUARD && !self.opts.force {
            return Err(EvalError::SplitGuard {
                size: k,
                limit: SPLIT_GUARD,
            });
        }
        let total = 3usize.pow(k as u32);
        let domain: Vec<String> = x.domain().to_vec();
        for cover in 0..total {
            let mut y = Team::new(domain.clone())?;
            let mut z = Team::new(domain.clone())?;
            let mut c = cover;
            for row in &rows {
                match c % 3 {
                    0 => y.insert_row(row.clone())?,
                    1 => z.insert_row(row.clone())?,
                    _ => {
                        y.insert_row(row.clone())?;
                        z.insert_row(row.clone())?;
                    }
                }
                c /= 3;
            }
            if self.eval(&y, a)? && self.eval(&z, b)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// TS-∃ by witness-team enumeration: subsets of the extension set
    /// `{s[m/v] : s ∈ X, m ∈ dom(M)}` in which every `s ∈ X` keeps at
    /// least one extension. The maximal witness is tried first (for
    /// union-closed formulas it succeeds whenever anything does).
    ///
    /// When `v` is fresh the extensions of distinct rows stay distinct, so
    /// covering subsets correspond exactly to per-row nonempty value sets;
    /// that case walks the (2^n - 1)^|X| odometer directly instead of
    /// filtering all 2^(|X|·n) subsets for coverage.
    fn eval_exists_witness(
        &mut self,
        x: &Team,
        v: &str,
        body: &Formula,
    ) -> Result<bool, EvalError> {
        let n = self.m.universe() as usize;
        let quota = x.len() * n;
        if quota > EXISTS_GUARD && !self.opts.force {
            return Err(EvalError::ExistsGuard {
                size: quota,
                limit: EXISTS_GUARD,
            });
        }
        if x.col_index(v).is_none() {
            return self.eval_exists_fresh(x, v, body);
        }
        let (new_domain, pos) = extend_domain(x.domain(), v);
        // Deduplicated extensions, each with the bitmask of source rows it
        // covers (distinct rows can collapse when v is overwritten).
        let mut ext: std::collections::BTreeMap<Vec<Element>, u64> =
            std::collections::BTreeMap::new();
        for (i, row) in x.rows().enumerate() {
            for e in 0..self.m.universe() {
                let mut r = row.clone();
                if pos == r.len() {
                    r.push(e);
                } else {
                    r[pos] = e;
                }
                *ext.entry(r).or_insert(0) |= 1 << i;
            }
        }
        let ext: Vec<(Vec<Element>, u64)> = ext.into_iter().collect();
        if ext.len() > 63 || x.len() > 63 {
            // Bitmask enumeration tops out here even when forced.
            return Err(EvalError::ExistsGuard {
                size: quota,
                limit: 63,
            });
        }
        let full_cover: u64 = (1 << x.len()) - 1;
        let build = |mask: u64| -> Result<Team, EvalError> {
            let mut y = Team::new(new_domain.clone())?;
            for (i, (row, _)) in ext.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    y.insert_row(row.clone())?;
                }
            }
            Ok(y)
        };
        let covered = |mask: u64| -> bool {
            let mut acc = 0u64;
            for (i, (_, rows)) in ext.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc |= rows;
                }
            }
            acc & full_cover == full_cover
        };
        let all_mask: u64 = (1 << ext.len()) - 1;
        // Maximal witness first.
        if covered(all_mask) {
            let y = build(all_mask)?;
            if self.eval(&y, body)? {
                return Ok(true);
            }
        }
        for mask in 0..all_mask {
            if !covered(mask) {
                continue;
            }
            let y = build(mask)?;
            if self.eval(&y, body)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Fresh-variable witness enumeration: per-row nonempty value subsets,
    /// maximal witness first, then ascending odometer.
    fn eval_exists_fresh(
        &mut self,
        x: &Team,
        v: &str,
        body: &Formula,
    ) -> Result<bool, EvalError> {
        let n = self.m.universe() as usize;
        let rows: Vec<Vec<Element>> = x.rows().cloned().collect();
        let mut new_domain = x.domain().to_vec();
        new_domain.push(v.to_string());
        let per_row = (1usize << n) - 1;
        let build = |odo: &[usize]| -> Result<Team, EvalError> {
            let mut y = Team::new(new_domain.clone())?;
            for (row, &subset) in rows.iter().zip(odo) {
                for e in 0..n {
                    if subset >> e & 1 == 1 {
                        let mut r = row.clone();
                        r.push(e as Element);
                        y.insert_row(r)?;
                    }
                }
            }
            Ok(y)
        };
        // Maximal witness first.
        let full = vec![per_row; rows.len()];
        if self.eval(&build(&full)?, body)? {
            return Ok(true);
        }
        if rows.is_empty() {
            return Ok(false);
        }
        let mut odo = vec![1usize; rows.len()];
        loop {
            if odo != full {
                let y = build(&odo)?;
                if self.eval(&y, body)? {
                    return Ok(true);
                }
            }
            let mut i = 0;
            loop {
                if i == odo.len() {
                    return Ok(false);
                }
                odo[i] += 1;
                if odo[i] <= per_row {
                    break;
                }
                odo[i] = 1;
                i += 1;
            }
        }
    }

    /// TS-∃ by direct choice-function enumeration: one nonempty value set
    /// per row, `(2^n - 1)^|X|` combinations.
    fn eval_exists_choice(
        &mut self,
        x: &Team,
        v: &str,
        body: &Formula,
    ) -> Result<bool, EvalError> {
        let n = self.m.universe() as usize;
        let quota = x.len() * n;
        if quota > EXISTS_GUARD && !self.opts.force {
            return Err(EvalError::ExistsGuard {
                size: quota,
                limit: EXISTS_GUARD,
            });
        }
        let (new_domain, pos) = extend_domain(x.domain(), v);
        let rows: Vec<Vec<Element>> = x.rows().cloned().collect();
        let per_row = (1usize << n) - 1;
        let mut odo = vec![1usize; rows.len()]; // per-row nonempty subset masks
        loop {
            let mut y = Team::new(new_domain.clone())?;
            for (row, &subset) in rows.iter().zip(&odo) {
                for e in 0..n {
                    if subset >> e & 1 == 1 {
                        let mut r = row.clone();
                        if pos == r.len() {
                            r.push(e as Element);
                        } else {
                            r[pos] = e as Element;
                        }
                        y.insert_row(r)?;
                    }
                }
            }
            if self.eval(&y, body)? {
                return Ok(true);
            }
            // Advance the odometer.
            let mut i = 0;
            loop {
                if i == odo.len() {
                    return Ok(false);
                }
                odo[i] += 1;
                if odo[i] <= per_row {
                    break;
                }
                odo[i] = 1;
                i += 1;
            }
        }
    }

    fn tuple_values(&self, x: &Team, ts: &[Term]) -> Result<Vec<Vec<Element>>, EvalError> {
        x.assignments()
            .map(|s| {
                ts.iter()
                    .map(|t| eval_term(self.m, &s, t))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect()
    }
}

fn extend_domain(domain: &[String], v: &str) -> (Vec<String>, usize) {
    match domain.iter().position(|d| d == v) {
        Some(i) => (domain.to_vec(), i),
        None => {
            let mut d = domain.to_vec();
            d.push(v.to_string());
            (d.clone(), d.len() - 1)
        }
    }
}

/// Classical Tarski satisfaction for first-order formulas. Second-order
/// relation variables are looked up in the structure's parameter mapping.
/// `Not` and `Implies` are evaluated classically; dependency atoms and
/// fixed points are rejected.
pub fn eval_tarski(m: &Structure, s: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    let mut env: Vec<(String, Element)> = s
        .vars()
        .map(|v| (v.to_string(), s.get(v).unwrap()))
        .collect();
    tarski(m, &mut env, f)
}

fn lookup(env: &[(String, Element)], v: &str) -> Option<Element> {
    env.iter().rev().find(|(name, _)| name == v).map(|(_, e)| *e)
}

fn term_value(
    m: &Structure,
    env: &[(String, Element)],
    t: &Term,
) -> Result<Element, EvalError> {
    match t {
        Term::Var(v) => lookup(env, v).ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Const(c) => m
            .constant(c)
            .ok_or_else(|| EvalError::UnknownSymbol(c.clone())),
        Term::App(f, args) => {
            let fun = m.fun(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
            let vals: Vec<Element> = args
                .iter()
                .map(|a| term_value(m, env, a))
                .collect::<Result<_, _>>()?;
            fun.apply(&vals)
                .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))
        }
    }
}

fn tarski(
    m: &Structure,
    env: &mut Vec<(String, Element)>,
    f: &Formula,
) -> Result<bool, EvalError> {
    match f {
        Formula::Rel {
            negated,
            name,
            args,
        } => {
            let rel = m
                .rel(name)
                .or_else(|| m.param(name))
                .ok_or_else(|| EvalError::UnknownSymbol(name.clone()))?;
            if rel.arity() != args.len() {
                return Err(EvalError::ArityMismatch {
                    name: name.clone(),
                    declared: rel.arity(),
                    found: args.len(),
                });
            }
            let tuple: Vec<Element> = args
                .iter()
                .map(|a| term_value(m, env, a))
                .collect::<Result<_, _>>()?;
            Ok(rel.contains(&tuple) != *negated)
        }
        Formula::Eq {
            negated,
            left,
            right,
        } => {
            let l = term_value(m, env, left)?;
            let r = term_value(m, env, right)?;
            Ok((l == r) != *negated)
        }
        Formula::Not(a) => Ok(!tarski(m, env, a)?),
        Formula::Implies(a, b) => {
            if !tarski(m, env, a)? {
                Ok(true)
            } else {
                tarski(m, env, b)
            }
        }
        Formula::And(a, b) => Ok(tarski(m, env, a)? && tarski(m, env, b)?),
        Formula::Or(a, b) => Ok(tarski(m, env, a)? || tarski(m, env, b)?),
        Formula::Exists(v, body) => {
            for e in 0..m.universe() {
                env.push((v.clone(), e));
                let hit = tarski(m, env, body)?;
                env.pop();
                if hit {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Formula::Forall(v, body) => {
            for e in 0..m.universe() {
                env.push((v.clone(), e));
                let hit = tarski(m, env, body)?;
                env.pop();
                if !hit {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Fix { .. } => Err(EvalError::FixpointNotSupported),
        _ => Err(EvalError::DependencyAtomNotSupported),
    }
}

/// Pointwise Tarski satisfaction over a team: the flat reading of a
/// first-order formula.
pub fn eval_flat(m: &Structure, x: &Team, f: &Formula) -> Result<bool, EvalError> {
    for s in x.assignments() {
        if !eval_tarski(m, &s, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}
