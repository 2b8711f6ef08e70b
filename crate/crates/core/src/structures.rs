//! Finite structures, teams, assignments, and the primitive team/relation
//! algebra every semantic clause builds on.
//!
//! Elements are dense integers `0..n`. Relations are sorted tuple sets;
//! teams are sorted row sets over an ordered variable domain, so all
//! iteration orders are deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::error::EvalError;
use crate::syntax::{Signature, Term};

pub type Element = u32;

/// Errors while constructing structures or reading model/team files.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe must have at least one element")]
    EmptyUniverse,
    #[error("element {element} is outside the universe 0..{universe}")]
    OutOfRange { element: Element, universe: Element },
    #[error("symbol `{0}` is already interpreted")]
    Duplicate(String),
    #[error("function `{name}` is not total: missing value at ({missing})")]
    NotTotal { name: String, missing: String },
    #[error("arity of `{0}` must be at least 1")]
    ZeroArity(String),
    #[error("relation tuples for `{name}` must all have arity {arity}")]
    RaggedRelation { name: String, arity: usize },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

/// A set of equal-arity element tuples: the value of `X(t̄)`, of a
/// second-order parameter, or of a fixed point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Relation {
    arity: usize,
    tuples: BTreeSet<Vec<Element>>,
}

impl Relation {
    pub fn new(arity: usize) -> Self {
        Relation {
            arity,
            tuples: BTreeSet::new(),
        }
    }

    pub fn from_tuples<I>(arity: usize, tuples: I) -> Self
    where
        I: IntoIterator<Item = Vec<Element>>,
    {
        let mut r = Relation::new(arity);
        for t in tuples {
            r.insert(t);
        }
        r
    }

    /// The full relation `universe^arity`.
    pub fn full(universe: Element, arity: usize) -> Self {
        let mut tuples = BTreeSet::new();
        let mut current = vec![0; arity];
        loop {
            tuples.insert(current.clone());
            let mut i = arity;
            loop {
                if i == 0 {
                    return Relation { arity, tuples };
                }
                i -= 1;
                current[i] += 1;
                if current[i] < universe {
                    break;
                }
                current[i] = 0;
            }
        }
    }

    /// Decodes a bitmask over the lexicographically ordered tuples of
    /// `universe^arity`; bit 0 is the all-zero tuple. Handy for exhaustive
    /// enumeration of all relations on small universes.
    pub fn from_bitmask(universe: Element, arity: usize, mask: u64) -> Self {
        let mut r = Relation::new(arity);
        let count = (universe as u64).pow(arity as u32);
        debug_assert!(count <= 64, "bitmask enumeration needs universe^arity <= 64");
        for idx in 0..count {
            if mask >> idx & 1 == 1 {
                let mut t = vec![0; arity];
                let mut rest = idx;
                for i in (0..arity).rev() {
                    t[i] = (rest % universe as u64) as Element;
                    rest /= universe as u64;
                }
                r.insert(t);
            }
        }
        r
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Inserts a tuple. Panics on arity mismatch; the uniform-length
    /// invariant is not negotiable.
    pub fn insert(&mut self, t: Vec<Element>) {
        assert_eq!(t.len(), self.arity, "relation tuple arity mismatch");
        self.tuples.insert(t);
    }

    pub fn contains(&self, t: &[Element]) -> bool {
        self.tuples.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Element>> {
        self.tuples.iter()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.tuples.is_subset(&other.tuples)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity);
        Relation {
            arity: self.arity,
            tuples: self.tuples.union(&other.tuples).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        assert_eq!(self.arity, other.arity);
        Relation {
            arity: self.arity,
            tuples: self.tuples.intersection(&other.tuples).cloned().collect(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "(")?;
            for (j, e) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Total function on tuples over the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Function {
    arity: usize,
    table: BTreeMap<Vec<Element>, Element>,
}

impl Function {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, args: &[Element]) -> Option<Element> {
        self.table.get(args).copied()
    }
}

/// A finite model: universe `{0..n-1}` with interpretations for relation,
/// function and constant symbols, plus second-order relation parameters
/// (the expansions used when a formula mentions a free relation variable).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    universe: Element,
    rels: BTreeMap<String, (usize, Relation)>,
    funs: BTreeMap<String, Function>,
    consts: BTreeMap<String, Element>,
    params: BTreeMap<String, Relation>,
}

impl Structure {
    pub fn new(universe: Element) -> Result<Self, StructureError> {
        if universe == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        Ok(Structure {
            universe,
            rels: BTreeMap::new(),
            funs: BTreeMap::new(),
            consts: BTreeMap::new(),
            params: BTreeMap::new(),
        })
    }

    pub fn universe(&self) -> Element {
        self.universe
    }

    fn check_range(&self, e: Element) -> Result<(), StructureError> {
        if e >= self.universe {
            Err(StructureError::OutOfRange {
                element: e,
                universe: self.universe,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_rel(
        &mut self,
        name: impl Into<String>,
        rel: Relation,
    ) -> Result<(), StructureError> {
        let name = name.into();
        if rel.arity() == 0 {
            return Err(StructureError::ZeroArity(name));
        }
        if self.rels.contains_key(&name) || self.funs.contains_key(&name) || self.consts.contains_key(&name) {
            return Err(StructureError::Duplicate(name));
        }
        for t in rel.iter() {
            for &e in t {
                self.check_range(e)?;
            }
        }
        self.rels.insert(name, (rel.arity(), rel));
        Ok(())
    }

    pub fn add_fun(
        &mut self,
        name: impl Into<String>,
        arity: usize,
        table: BTreeMap<Vec<Element>, Element>,
    ) -> Result<(), StructureError> {
        let name = name.into();
        if arity == 0 {
            return Err(StructureError::ZeroArity(name));
        }
        if self.rels.contains_key(&name) || self.funs.contains_key(&name) || self.consts.contains_key(&name) {
            return Err(StructureError::Duplicate(name));
        }
        for (args, val) in &table {
            if args.len() != arity {
                return Err(StructureError::RaggedRelation { name, arity });
            }
            for &e in args {
                self.check_range(e)?;
            }
            self.check_range(*val)?;
        }
        // Totality: every tuple of universe^arity must be mapped.
        for t in Relation::full(self.universe, arity).iter() {
            if !table.contains_key(t) {
                return Err(StructureError::NotTotal {
                    name,
                    missing: t
                        .iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                });
            }
        }
        self.funs.insert(name, Function { arity, table });
        Ok(())
    }

    pub fn add_const(
        &mut self,
        name: impl Into<String>,
        value: Element,
    ) -> Result<(), StructureError> {
        let name = name.into();
        if self.rels.contains_key(&name) || self.funs.contains_key(&name) || self.consts.contains_key(&name) {
            return Err(StructureError::Duplicate(name));
        }
        self.check_range(value)?;
        self.consts.insert(name, value);
        Ok(())
    }

    /// Sets (or replaces) a second-order relation parameter.
    pub fn set_param(
        &mut self,
        name: impl Into<String>,
        rel: Relation,
    ) -> Result<(), StructureError> {
        for t in rel.iter() {
            for &e in t {
                self.check_range(e)?;
            }
        }
        self.params.insert(name.into(), rel);
        Ok(())
    }

    /// Clone of the structure with one more parameter bound.
    pub fn with_param(&self, name: impl Into<String>, rel: Relation) -> Result<Self, StructureError> {
        let mut m = self.clone();
        m.set_param(name, rel)?;
        Ok(m)
    }

    pub fn rel(&self, name: &str) -> Option<&Relation> {
        self.rels.get(name).map(|(_, r)| r)
    }

    pub fn fun(&self, name: &str) -> Option<&Function> {
        self.funs.get(name)
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.consts.get(name).copied()
    }

    pub fn param(&self, name: &str) -> Option<&Relation> {
        self.params.get(name)
    }

    pub fn params(&self) -> impl Iterator<Item = (&str, &Relation)> {
        self.params.iter().map(|(n, r)| (n.as_str(), r))
    }

    /// Signature induced by the interpreted symbols; parameters become
    /// second-order relation variables.
    pub fn signature(&self) -> Signature {
        let mut sig = Signature::new();
        for (name, (arity, _)) in &self.rels {
            sig.add_rel(name.clone(), *arity).expect("unique by construction");
        }
        for (name, f) in &self.funs {
            sig.add_fun(name.clone(), f.arity).expect("unique by construction");
        }
        for name in self.consts.keys() {
            sig.add_const(name.clone()).expect("unique by construction");
        }
        for (name, rel) in &self.params {
            // A parameter may shadow nothing; name clashes with model
            // symbols were rejected when the parameter was set.
            sig.add_so_rel(name.clone(), rel.arity().max(1)).ok();
        }
        sig
    }
}

/// A finite mapping from variables to elements.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Assignment {
    map: BTreeMap<String, Element>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, Element)>,
        S: Into<String>,
    {
        Assignment {
            map: pairs.into_iter().map(|(v, e)| (v.into(), e)).collect(),
        }
    }

    pub fn get(&self, var: &str) -> Option<Element> {
        self.map.get(var).copied()
    }

    /// `s[m/v]`: the assignment updated (or extended) at `v`.
    pub fn updated(&self, var: impl Into<String>, value: Element) -> Self {
        let mut map = self.map.clone();
        map.insert(var.into(), value);
        Assignment { map }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.map.is_empty() {
            return write!(f, "{{}}");
        }
        for (i, (v, e)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}={e}")?;
        }
        Ok(())
    }
}

/// A team: a set of assignments sharing one ordered variable domain. Rows
/// are element vectors aligned with the domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Team {
    domain: Vec<String>,
    rows: BTreeSet<Vec<Element>>,
}

impl Team {
    pub fn new<S: Into<String>>(domain: Vec<S>) -> Result<Self, EvalError> {
        let domain: Vec<String> = domain.into_iter().map(Into::into).collect();
        let mut seen = BTreeSet::new();
        for v in &domain {
            if !seen.insert(v.clone()) {
                return Err(EvalError::TeamDomain(format!("repeated variable `{v}`")));
            }
        }
        Ok(Team {
            domain,
            rows: BTreeSet::new(),
        })
    }

    /// The team `{∅}` containing just the empty assignment.
    pub fn singleton_empty() -> Self {
        let mut t = Team {
            domain: Vec::new(),
            rows: BTreeSet::new(),
        };
        t.rows.insert(Vec::new());
        t
    }

    /// The empty team over the empty domain.
    pub fn empty() -> Self {
        Team {
            domain: Vec::new(),
            rows: BTreeSet::new(),
        }
    }

    pub fn from_rows<S: Into<String>>(
        domain: Vec<S>,
        rows: impl IntoIterator<Item = Vec<Element>>,
    ) -> Result<Self, EvalError> {
        let mut team = Team::new(domain)?;
        for r in rows {
            team.insert_row(r)?;
        }
        Ok(team)
    }

    pub fn insert_row(&mut self, row: Vec<Element>) -> Result<(), EvalError> {
        if row.len() != self.domain.len() {
            return Err(EvalError::TeamDomain(format!(
                "row of width {} in a team over {} variable(s)",
                row.len(),
                self.domain.len()
            )));
        }
        self.rows.insert(row);
        Ok(())
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn rows(&self) -> impl Iterator<Item = &Vec<Element>> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn col_index(&self, var: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == var)
    }

    pub fn assignment_of(&self, row: &[Element]) -> Assignment {
        Assignment::from_pairs(
            self.domain
                .iter()
                .zip(row.iter())
                .map(|(v, e)| (v.clone(), *e)),
        )
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.rows.iter().map(|r| self.assignment_of(r))
    }

    pub fn contains_assignment(&self, s: &Assignment) -> bool {
        if s.len() != self.domain.len() {
            return false;
        }
        match self.row_of(s) {
            Some(row) => self.rows.contains(&row),
            None => false,
        }
    }

    fn row_of(&self, s: &Assignment) -> Option<Vec<Element>> {
        self.domain.iter().map(|v| s.get(v)).collect()
    }

    /// Union of two teams over the identical domain.
    pub fn union(&self, other: &Team) -> Result<Team, EvalError> {
        if self.domain != other.domain {
            return Err(EvalError::TeamDomain(
                "union of teams with different domains".into(),
            ));
        }
        Ok(Team {
            domain: self.domain.clone(),
            rows: self.rows.union(&other.rows).cloned().collect(),
        })
    }

    /// Reorders/projects the team onto the variable tuple `vars` (which
    /// must be covered by the domain). Projection may merge rows.
    pub fn conform(&self, vars: &[String]) -> Result<Team, EvalError> {
        let idx: Vec<usize> = vars
            .iter()
            .map(|v| {
                self.col_index(v)
                    .ok_or_else(|| EvalError::UnboundVariable(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut team = Team::new(vars.to_vec())?;
        for row in &self.rows {
            team.insert_row(idx.iter().map(|&i| row[i]).collect())?;
        }
        Ok(team)
    }

    /// `X[H/v̄] = {s[m̄/v̄] : s ∈ X, m̄ ∈ H(s)}` — supplementing with a
    /// choice function over a variable tuple (usually a single variable).
    pub fn supplement(&self, h: &ChoiceFunction, vars: &[String]) -> Result<Team, EvalError> {
        if h.domain != self.domain {
            return Err(EvalError::ChoiceFunction(
                "choice function domain differs from team domain".into(),
            ));
        }
        if h.choices.len() != self.rows.len() || !self.rows.iter().all(|r| h.choices.contains_key(r))
        {
            return Err(EvalError::ChoiceFunction(
                "choice function must be defined on exactly the team".into(),
            ));
        }
        let mut new_domain = self.domain.clone();
        let mut positions = Vec::with_capacity(vars.len());
        for v in vars {
            match new_domain.iter().position(|d| d == v) {
                Some(i) => positions.push(i),
                None => {
                    new_domain.push(v.clone());
                    positions.push(new_domain.len() - 1);
                }
            }
        }
        let mut team = Team::new(new_domain)?;
        for row in &self.rows {
            let values = &h.choices[row];
            if values.is_empty() {
                return Err(EvalError::ChoiceFunction(format!(
                    "empty choice set at row {row:?}"
                )));
            }
            for tuple in values {
                if tuple.len() != vars.len() {
                    return Err(EvalError::ChoiceFunction(format!(
                        "choice tuple of width {} for {} variable(s)",
                        tuple.len(),
                        vars.len()
                    )));
                }
                let mut new_row = row.clone();
                new_row.resize(team.domain.len(), 0);
                for (p, &val) in positions.iter().zip(tuple.iter()) {
                    new_row[*p] = val;
                }
                team.insert_row(new_row)?;
            }
        }
        Ok(team)
    }

    /// `X[M/v] = {s[m/v] : s ∈ X, m ∈ dom(M)}`.
    pub fn duplicate(&self, var: &str, m: &Structure) -> Team {
        let h = ChoiceFunction::all_of_universe(self, m.universe());
        self.supplement(&h, &[var.to_string()])
            .expect("all-universe choice function is valid by construction")
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.domain.join(" "))?;
        for row in &self.rows {
            if row.is_empty() {
                writeln!(f, "()")?;
            } else {
                writeln!(
                    f,
                    "{}",
                    row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
                )?;
            }
        }
        Ok(())
    }
}

/// `H: X → P(A^k) ∖ {∅}` — a nonempty set of value tuples for every
/// assignment of a team.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceFunction {
    domain: Vec<String>,
    choices: BTreeMap<Vec<Element>, BTreeSet<Vec<Element>>>,
}

impl ChoiceFunction {
    /// Builds a choice function by applying `f` to every assignment of the
    /// team. Width-1 tuples supplement a single variable.
    pub fn from_fn(
        team: &Team,
        mut f: impl FnMut(&Assignment) -> BTreeSet<Vec<Element>>,
    ) -> Self {
        let mut choices = BTreeMap::new();
        for row in team.rows() {
            let s = team.assignment_of(row);
            choices.insert(row.clone(), f(&s));
        }
        ChoiceFunction {
            domain: team.domain().to_vec(),
            choices,
        }
    }

    /// The constant choice function assigning the same value set everywhere.
    pub fn constant(team: &Team, values: BTreeSet<Vec<Element>>) -> Self {
        Self::from_fn(team, |_| values.clone())
    }

    /// The maximal single-variable choice function `H(s) = dom(M)`.
    pub fn all_of_universe(team: &Team, universe: Element) -> Self {
        let all: BTreeSet<Vec<Element>> = (0..universe).map(|e| vec![e]).collect();
        Self::constant(team, all)
    }

    pub fn get(&self, row: &[Element]) -> Option<&BTreeSet<Vec<Element>>> {
        self.choices.get(row)
    }
}

/// Value of a term under an assignment, per the usual induction.
pub fn eval_term(m: &Structure, s: &Assignment, t: &Term) -> Result<Element, EvalError> {
    match t {
        Term::Var(v) => s.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Const(c) => m
            .constant(c)
            .ok_or_else(|| EvalError::UnknownSymbol(c.clone())),
        Term::App(f, args) => {
            let fun = m.fun(f).ok_or_else(|| EvalError::UnknownSymbol(f.clone()))?;
            if fun.arity() != args.len() {
                return Err(EvalError::ArityMismatch {
                    name: f.clone(),
                    declared: fun.arity(),
                    found: args.len(),
                });
            }
            let vals: Vec<Element> = args
                .iter()
                .map(|a| eval_term(m, s, a))
                .collect::<Result<_, _>>()?;
            fun.apply(&vals)
                .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))
        }
    }
}

/// `X(t̄) = { t̄⟨s⟩ : s ∈ X }`.
pub fn team_relation(m: &Structure, x: &Team, ts: &[Term]) -> Result<Relation, EvalError> {
    let mut rel = Relation::new(ts.len());
    for s in x.assignments() {
        let tuple: Vec<Element> = ts
            .iter()
            .map(|t| eval_term(m, &s, t))
            .collect::<Result<_, _>>()?;
        rel.insert(tuple);
    }
    Ok(rel)
}

/// Parses the line-oriented model format:
///
/// ```text
/// universe N
/// rel NAME/K = { (a,b) (c,d) }
/// fun NAME/K = { (a):b, (c):d }
/// const NAME = a
/// param NAME/K = { (a) (b) }       # second-order relation parameter
/// ```
///
/// `#` starts a comment; blank lines are ignored. Relation tuples may be
/// separated by spaces or commas. Out-of-range elements are rejected.
pub fn parse_model(text: &str) -> Result<Structure, StructureError> {
    let mut structure: Option<Structure> = None;
    let err = |line: usize, message: String| StructureError::File { line, message };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, rest) = match line.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim()),
            None => (line, ""),
        };
        match head {
            "universe" => {
                if structure.is_some() {
                    return Err(err(line_no, "duplicate `universe` line".into()));
                }
                let n: Element = rest
                    .parse()
                    .map_err(|_| err(line_no, format!("bad universe size `{rest}`")))?;
                structure = Some(Structure::new(n).map_err(|e| err(line_no, e.to_string()))?);
            }
            "rel" | "param" => {
                let m = structure
                    .as_mut()
                    .ok_or_else(|| err(line_no, "`universe N` must come first".into()))?;
                let (name, arity, body) = parse_decl_header(rest)
                    .map_err(|msg| err(line_no, msg))?;
                let tuples = parse_tuple_set(body, arity).map_err(|msg| err(line_no, msg))?;
                let rel = Relation::from_tuples(arity, tuples);
                if head == "rel" {
                    m.add_rel(name, rel).map_err(|e| err(line_no, e.to_string()))?;
                } else {
                    if m.rel(&name).is_some() || m.fun(&name).is_some() || m.constant(&name).is_some() {
                        return Err(err(
                            line_no,
                            format!("parameter `{name}` clashes with a model symbol"),
                        ));
                    }
                    m.set_param(name, rel).map_err(|e| err(line_no, e.to_string()))?;
                }
            }
            "fun" => {
                let m = structure
                    .as_mut()
                    .ok_or_else(|| err(line_no, "`universe N` must come first".into()))?;
                let (name, arity, body) = parse_decl_header(rest)
                    .map_err(|msg| err(line_no, msg))?;
                let mut table = BTreeMap::new();
                for entry in split_entries(body) {
                    let (args_part, val_part) = entry
                        .split_once(':')
                        .ok_or_else(|| err(line_no, format!("bad function entry `{entry}`")))?;
                    let args = parse_tuple(args_part.trim(), arity)
                        .map_err(|msg| err(line_no, msg))?;
                    let val: Element = val_part
                        .trim()
                        .parse()
                        .map_err(|_| err(line_no, format!("bad element `{val_part}`")))?;
                    table.insert(args, val);
                }
                m.add_fun(name, arity, table)
                    .map_err(|e| err(line_no, e.to_string()))?;
            }
            "const" => {
                let m = structure
                    .as_mut()
                    .ok_or_else(|| err(line_no, "`universe N` must come first".into()))?;
                let (name, val) = rest
                    .split_once('=')
                    .ok_or_else(|| err(line_no, "expected `const NAME = a`".into()))?;
                let value: Element = val
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("bad element `{}`", val.trim())))?;
                m.add_const(name.trim(), value)
                    .map_err(|e| err(line_no, e.to_string()))?;
            }
            other => {
                return Err(err(line_no, format!("unknown directive `{other}`")));
            }
        }
    }
    structure.ok_or(StructureError::File {
        line: 0,
        message: "model file contains no `universe N` line".into(),
    })
}

fn parse_decl_header(rest: &str) -> Result<(String, usize, &str), String> {
    let (sym, body) = rest
        .split_once('=')
        .ok_or_else(|| "expected `NAME/K = { ... }`".to_string())?;
    let sym = sym.trim();
    let (name, arity) = sym
        .split_once('/')
        .ok_or_else(|| format!("expected `NAME/K`, got `{sym}`"))?;
    let arity: usize = arity
        .trim()
        .parse()
        .map_err(|_| format!("bad arity `{arity}`"))?;
    let body = body.trim();
    let body = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| "expected `{ ... }`".to_string())?;
    Ok((name.trim().to_string(), arity, body))
}

fn split_entries(body: &str) -> impl Iterator<Item = &str> {
    body.split(',')
        .flat_map(|chunk| chunk.split_whitespace())
        .filter(|s| !s.is_empty())
}

fn parse_tuple_set(body: &str, arity: usize) -> Result<Vec<Vec<Element>>, String> {
    let mut tuples = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest
            .find('(')
            .ok_or_else(|| format!("expected `(` in `{rest}`"))?;
        let close = rest[open..]
            .find(')')
            .ok_or_else(|| format!("unclosed tuple in `{rest}`"))?
            + open;
        let inner = &rest[open + 1..close];
        tuples.push(parse_tuple_inner(inner, arity)?);
        rest = rest[close + 1..].trim_start_matches([',', ' ', '\t']).trim();
    }
    Ok(tuples)
}

fn parse_tuple(text: &str, arity: usize) -> Result<Vec<Element>, String> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("expected `(a,..)`, got `{text}`"))?;
    parse_tuple_inner(inner, arity)
}

fn parse_tuple_inner(inner: &str, arity: usize) -> Result<Vec<Element>, String> {
    let parts: Vec<&str> = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if parts.len() != arity {
        return Err(format!(
            "tuple ({inner}) has {} element(s), expected {arity}",
            parts.len()
        ));
    }
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| format!("bad element `{p}`")))
        .collect()
}

/// Parses the team format: a `vars x y ...` header, then one tuple per
/// line, elements whitespace-separated. `()` denotes the empty assignment
/// (for teams over the empty domain). `#` comments and blank lines are
/// ignored.
pub fn parse_team(text: &str) -> Result<Team, StructureError> {
    let err = |line: usize, message: String| StructureError::File { line, message };
    let mut team: Option<Team> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match &mut team {
            None => {
                let mut parts = line.split_whitespace();
                if parts.next() != Some("vars") {
                    return Err(err(line_no, "team file must start with `vars ...`".into()));
                }
                let domain: Vec<String> = parts.map(str::to_string).collect();
                team = Some(
                    Team::new(domain).map_err(|e| err(line_no, e.to_string()))?,
                );
            }
            Some(t) => {
                let row: Vec<Element> = if line == "()" {
                    Vec::new()
                } else {
                    line.split_whitespace()
                        .map(|p| p.parse().map_err(|_| err(line_no, format!("bad element `{p}`"))))
                        .collect::<Result<_, _>>()?
                };
                t.insert_row(row).map_err(|e| err(line_no, e.to_string()))?;
            }
        }
    }
    team.ok_or(StructureError::File {
        line: 0,
        message: "team file contains no `vars` line".into(),
    })
}

/// Range-checks a team against a structure (used by the CLI; teams
/// themselves are structure-independent).
pub fn check_team_range(team: &Team, m: &Structure) -> Result<(), StructureError> {
    for row in team.rows() {
        for &e in row {
            if e >= m.universe() {
                return Err(StructureError::OutOfRange {
                    element: e,
                    universe: m.universe(),
                });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn succ_model() -> Structure {
        parse_model(
            "universe 3\n\
             rel E/2 = { (0,1) (1,2) }\n\
             fun f/1 = { (0):1, (1):2, (2):0 }\n\
             const c = 2\n",
        )
        .unwrap()
    }

    #[test]
    fn eval_term_examples() {
        let m = succ_model();
        let s = Assignment::from_pairs([("x", 2u32)]);
        assert_eq!(eval_term(&m, &s, &Term::Const("c".into())).unwrap(), 2);
        let s1 = Assignment::from_pairs([("x", 1u32)]);
        assert_eq!(eval_term(&m, &s1, &Term::var("x")).unwrap(), 1);
        // f is successor mod 3; at x = n-1 it wraps to 0.
        let t = Term::App("f".into(), vec![Term::var("x")]);
        assert_eq!(eval_term(&m, &s, &t).unwrap(), 0);
        assert_eq!(
            eval_term(&m, &Assignment::empty(), &Term::var("x")),
            Err(EvalError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn team_relation_examples() {
        let m = succ_model();
        let empty = Team::new(vec!["x"]).unwrap();
        let r = team_relation(&m, &empty, &[Term::var("x"), Term::var("x")]).unwrap();
        assert_eq!(r.arity(), 2);
        assert!(r.is_empty());

        let x = Team::from_rows(vec!["x"], [vec![0], vec![1]]).unwrap();
        let diag = team_relation(&m, &x, &[Term::var("x"), Term::var("x")]).unwrap();
        assert_eq!(diag, Relation::from_tuples(2, [vec![0, 0], vec![1, 1]]));

        let xy = Team::from_rows(vec!["x", "y"], [vec![0, 1], vec![2, 2]]).unwrap();
        let proj = team_relation(&m, &xy, &[Term::var("y")]).unwrap();
        assert_eq!(proj, Relation::from_tuples(1, [vec![1], vec![2]]));
    }

    #[test]
    fn supplement_examples() {
        let m = succ_model();
        let x = Team::from_rows(vec!["x"], [vec![0], vec![1]]).unwrap();
        let h = ChoiceFunction::constant(&x, [vec![0]].into_iter().collect());
        let sup = x.supplement(&h, &["v".to_string()]).unwrap();
        assert_eq!(sup.len(), x.len());
        assert!(sup.rows().all(|r| r[1] == 0));

        let start = Team::singleton_empty();
        let h = ChoiceFunction::constant(&start, [vec![0], vec![1]].into_iter().collect());
        let sup = start.supplement(&h, &["v".to_string()]).unwrap();
        assert_eq!(sup.len(), 2);

        // All-universe choice equals duplication, exactly.
        let h = ChoiceFunction::all_of_universe(&x, m.universe());
        assert_eq!(
            x.supplement(&h, &["v".to_string()]).unwrap(),
            x.duplicate("v", &m)
        );
    }

    #[test]
    fn supplement_rejects_empty_choice_set() {
        let x = Team::from_rows(vec!["x"], [vec![0]]).unwrap();
        let h = ChoiceFunction::constant(&x, BTreeSet::new());
        assert!(matches!(
            x.supplement(&h, &["v".to_string()]),
            Err(EvalError::ChoiceFunction(_))
        ));
    }

    #[test]
    fn duplicate_examples() {
        let m = succ_model();
        let start = Team::singleton_empty();
        assert_eq!(start.duplicate("v", &m).len(), 3);

        let none = Team::new(vec!["x"]).unwrap();
        assert!(none.duplicate("v", &m).is_empty());

        // Overwriting: re-quantifying x over universe 2.
        let m2 = parse_model("universe 2").unwrap();
        let x = Team::from_rows(vec!["x"], [vec![0]]).unwrap();
        let dup = x.duplicate("x", &m2);
        assert_eq!(
            dup,
            Team::from_rows(vec!["x"], [vec![0], vec![1]]).unwrap()
        );
    }

    #[test]
    fn conform_reorders_and_projects() {
        let xy = Team::from_rows(vec!["x", "y"], [vec![0, 1], vec![2, 2]]).unwrap();
        let yx = xy.conform(&["y".to_string(), "x".to_string()]).unwrap();
        assert_eq!(
            yx,
            Team::from_rows(vec!["y", "x"], [vec![1, 0], vec![2, 2]]).unwrap()
        );
        assert!(xy.conform(&["z".to_string()]).is_err());
    }

    #[test]
    fn model_file_rejects_out_of_range() {
        let err = parse_model("universe 2\nrel E/2 = { (0,5) }").unwrap_err();
        assert!(err.to_string().contains("outside the universe"), "{err}");
    }

    #[test]
    fn model_file_rejects_partial_function() {
        let err = parse_model("universe 2\nfun f/1 = { (0):1 }").unwrap_err();
        assert!(err.to_string().contains("not total"), "{err}");
    }

    #[test]
    fn team_file_roundtrip() {
        let t = parse_team("vars x y\n0 1\n1 0\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(parse_team(&t.to_string()).unwrap(), t);

        let empty_dom = parse_team("vars\n()\n").unwrap();
        assert_eq!(empty_dom, Team::singleton_empty());
    }

    #[test]
    fn relation_bitmask_enumeration() {
        let all = Relation::from_bitmask(2, 2, 0b1111);
        assert_eq!(all, Relation::full(2, 2));
        assert_eq!(Relation::from_bitmask(2, 2, 0).len(), 0);
        // Bit 0 is the all-zero tuple.
        let r = Relation::from_bitmask(2, 2, 1);
        assert!(r.contains(&[0, 0]));
        assert_eq!(r.len(), 1);
    }

    proptest! {
        #[test]
        fn supplement_grows_fresh_variable(rows in proptest::collection::btree_set(
            proptest::collection::vec(0u32..3, 2), 0..6)
        ) {
            let x = Team::from_rows(vec!["x", "y"], rows).unwrap();
            let h = ChoiceFunction::from_fn(&x, |s| {
                let k = (s.get("x").unwrap() % 2 + 1) as usize;
                (0..k as u32).map(|e| vec![e]).collect()
            });
            let sup = x.supplement(&h, &["v".to_string()]).unwrap();
            prop_assert!(sup.len() >= x.len());
        }

        #[test]
        fn team_relation_distributes_over_union(
            a in proptest::collection::btree_set(proptest::collection::vec(0u32..3, 2), 0..5),
            b in proptest::collection::btree_set(proptest::collection::vec(0u32..3, 2), 0..5),
        ) {
            let m = Structure::new(3).unwrap();
            let ta = Team::from_rows(vec!["x", "y"], a).unwrap();
            let tb = Team::from_rows(vec!["x", "y"], b).unwrap();
            let ts = [Term::var("y"), Term::var("x")];
            let lhs = team_relation(&m, &ta.union(&tb).unwrap(), &ts).unwrap();
            let rhs = team_relation(&m, &ta, &ts).unwrap()
                .union(&team_relation(&m, &tb, &ts).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
