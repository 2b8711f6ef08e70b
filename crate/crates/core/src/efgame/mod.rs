//! The Spoiler/Duplicator game over pairs of teams whose Duplicator wins
//! characterize rank-bounded transfer of inclusion-logic formulas:
//! position and move model, an exhaustive backward-induction solver, the
//! canonical Duplicator strategy for empty-signature models, a bounded
//! formula enumerator (the oracle for the game/formula correspondence),
//! and a text REPL for human play.

mod enumerate;
mod repl;

pub use enumerate::{enumerate_formulas, EnumBudget};
pub use repl::{repl_play, Role};

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::error::EvalError;
use crate::structures::{ChoiceFunction, Element, Structure, Team};
use crate::syntax::{Formula, Term};
use crate::team_eval::{eval_naive_opts, NaiveOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("the two teams must share a domain")]
    DomainMismatch,
    #[error("the two structures must share a signature")]
    SignatureMismatch,
    #[error("solver guard exceeded: {0} (use force to override)")]
    Guard(String),
    #[error("canonical strategy needs an empty signature")]
    NonEmptySignature,
    #[error("canonical strategy needs |A| <= |B|")]
    UniverseOrder,
    #[error("position violates the injection-closure invariant: {0}")]
    InvariantViolated(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("bad move: {0}")]
    BadMove(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    Spoiler,
    Duplicator,
}

impl std::fmt::Display for Winner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Winner::Spoiler => write!(f, "Spoiler"),
            Winner::Duplicator => write!(f, "Duplicator"),
        }
    }
}

/// A game position: left structure with team `x`, right structure with
/// team `y`, and the number of rounds remaining.
#[derive(Debug, Clone)]
pub struct GamePosition {
    pub left: Arc<Structure>,
    pub right: Arc<Structure>,
    pub x: Team,
    pub y: Team,
    pub rounds: u32,
}

impl GamePosition {
    pub fn new(
        left: Arc<Structure>,
        right: Arc<Structure>,
        x: Team,
        y: Team,
        rounds: u32,
    ) -> Result<Self, GameError> {
        if x.domain() != y.domain() {
            return Err(GameError::DomainMismatch);
        }
        if left.signature() != right.signature() {
            return Err(GameError::SignatureMismatch);
        }
        Ok(GamePosition {
            left,
            right,
            x,
            y,
            rounds,
        })
    }
}

/// Spoiler's move kinds. In a split, Duplicator answers with a cover of
/// her team and Spoiler then selects which pair continues the game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpoilerMove {
    Split { x1: Team, x2: Team },
    Supplement { var: String, h: ChoiceFunction },
    Duplicate { var: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DuplicatorResponse {
    Split { y1: Team, y2: Team },
    Supplement { k: ChoiceFunction },
    /// Duplication admits no choice.
    Forced,
}

/// Bounds on the final-position winning-condition atom family: literals
/// over depth-0 terms (variables and constants) and inclusion atoms
/// between duplicate-free variable tuples of length at most
/// `min(max_incl_len, |domain|)`. For purely relational signatures and a
/// fixed variable pool this family is exhaustive.
#[derive(Debug, Clone, Copy)]
pub struct AtomBudget {
    pub max_incl_len: usize,
    pub include_constants: bool,
}

impl Default for AtomBudget {
    fn default() -> Self {
        AtomBudget {
            max_incl_len: 3,
            include_constants: true,
        }
    }
}

/// The finite atom family for a final-position check over the given
/// domain, deterministic order.
pub fn atom_family(m: &Structure, domain: &[String], budget: &AtomBudget) -> Vec<Formula> {
    let sig = m.signature();
    let mut pool: Vec<Term> = domain.iter().map(|v| Term::Var(v.clone())).collect();
    if budget.include_constants {
        pool.extend(sig.consts().map(|c| Term::Const(c.to_string())));
    }
    let mut atoms = Vec::new();
    // Relational literals over depth-0 terms.
    for (rel, arity) in sig.rels() {
        for args in tuples_over(&pool, arity) {
            for negated in [false, true] {
                atoms.push(Formula::Rel {
                    negated,
                    name: rel.to_string(),
                    args: args.clone(),
                });
            }
        }
    }
    // Equality literals; `=` and `!=` are symmetric, keep one orientation.
    for (i, t1) in pool.iter().enumerate() {
        for t2 in pool.iter().skip(i) {
            for negated in [false, true] {
                atoms.push(Formula::Eq {
                    negated,
                    left: t1.clone(),
                    right: t2.clone(),
                });
            }
        }
    }
    // Inclusion atoms between duplicate-free variable tuples.
    let max_len = budget.max_incl_len.min(domain.len());
    for len in 1..=max_len {
        let tuples = injective_tuples(domain, len);
        for t1 in &tuples {
            for t2 in &tuples {
                atoms.push(Formula::Incl {
                    left: t1.iter().map(|v| Term::Var(v.clone())).collect(),
                    right: t2.iter().map(|v| Term::Var(v.clone())).collect(),
                });
            }
        }
    }
    atoms
}

fn tuples_over(pool: &[Term], len: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for prefix in &out {
            for t in pool {
                let mut p = prefix.clone();
                p.push(t.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn injective_tuples(vars: &[String], len: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for prefix in &out {
            for v in vars {
                if !prefix.contains(v) {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

/// Final-position check: a witnessing atom true on the left team and false
/// on the right, if one exists in the budgeted family.
pub fn spoiler_wins_final(
    p: &GamePosition,
    budget: &AtomBudget,
) -> Result<Option<Formula>, GameError> {
    distinguishing_atom(&p.left, &p.x, &p.right, &p.y, budget)
}

fn distinguishing_atom(
    left: &Structure,
    x: &Team,
    right: &Structure,
    y: &Team,
    budget: &AtomBudget,
) -> Result<Option<Formula>, GameError> {
    let domain = x.domain().to_vec();
    let force = NaiveOptions {
        force: true,
        ..Default::default()
    };
    for atom in atom_family(left, &domain, budget) {
        if eval_naive_opts(left, x, &atom, force)? && !eval_naive_opts(right, y, &atom, force)? {
            return Ok(Some(atom));
        }
    }
    Ok(None)
}

/// Feasibility guards and knobs for the exhaustive solver.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub max_team: usize,
    pub max_universe: Element,
    pub max_rounds: u32,
    pub force: bool,
    /// Variable pool for supplement/duplicate moves; defaults to the
    /// starting domain plus three fresh variables.
    pub pool: Option<Vec<String>>,
    pub atoms: AtomBudget,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            max_team: 4,
            max_universe: 3,
            max_rounds: 2,
            force: false,
            pool: None,
            atoms: AtomBudget::default(),
        }
    }
}

pub fn default_pool(domain: &[String]) -> Vec<String> {
    let mut pool = domain.to_vec();
    for i in 0.. {
        if pool.len() >= domain.len() + 3 {
            break;
        }
        let cand = format!("_p{i}");
        if !pool.contains(&cand) {
            pool.push(cand);
        }
    }
    pool
}

/// Exhaustive backward-induction solver. Holds the two structures, the
/// move pool, and a memo table; one solver instance can answer many
/// positions over the same structures, sharing the table.
pub struct Solver {
    left: Arc<Structure>,
    right: Arc<Structure>,
    pool: Vec<String>,
    atoms: AtomBudget,
    memo: HashMap<(u32, Vec<String>, Vec<Vec<Element>>, Vec<Vec<Element>>), bool>,
    final_memo: HashMap<(Vec<String>, Vec<Vec<Element>>, Vec<Vec<Element>>), bool>,
}

impl Solver {
    /// Builds a solver for positions over these structures. Guards check
    /// the *initial* position; deeper positions grow within the move
    /// structure itself.
    pub fn new(p: &GamePosition, cfg: &SolveConfig) -> Result<Self, GameError> {
        if !cfg.force {
            if p.x.len() > cfg.max_team || p.y.len() > cfg.max_team {
                return Err(GameError::Guard(format!(
                    "team size {} / {} exceeds {}",
                    p.x.len(),
                    p.y.len(),
                    cfg.max_team
                )));
            }
            if p.left.universe() > cfg.max_universe || p.right.universe() > cfg.max_universe {
                return Err(GameError::Guard(format!(
                    "universe {} / {} exceeds {}",
                    p.left.universe(),
                    p.right.universe(),
                    cfg.max_universe
                )));
            }
            if p.rounds > cfg.max_rounds {
                return Err(GameError::Guard(format!(
                    "{} rounds exceeds {}",
                    p.rounds, cfg.max_rounds
                )));
            }
        }
        let pool = cfg
            .pool
            .clone()
            .unwrap_or_else(|| default_pool(p.x.domain()));
        Ok(Solver {
            left: p.left.clone(),
            right: p.right.clone(),
            pool,
            atoms: cfg.atoms,
            memo: HashMap::new(),
            final_memo: HashMap::new(),
        })
    }

    pub fn pool(&self) -> &[String] {
        &self.pool
    }

    pub fn winner(&mut self, x: &Team, y: &Team, rounds: u32) -> Result<Winner, GameError> {
        Ok(if self.spoiler_wins(x, y, rounds)? {
            Winner::Spoiler
        } else {
            Winner::Duplicator
        })
    }

    pub fn final_witness(&self, x: &Team, y: &Team) -> Result<Option<Formula>, GameError> {
        distinguishing_atom(&self.left, x, &self.right, y, &self.atoms)
    }

    fn spoiler_wins_final_memo(&mut self, x: &Team, y: &Team) -> Result<bool, GameError> {
        let key = (
            x.domain().to_vec(),
            x.rows().cloned().collect::<Vec<_>>(),
            y.rows().cloned().collect::<Vec<_>>(),
        );
        if let Some(&v) = self.final_memo.get(&key) {
            return Ok(v);
        }
        let v = self.final_witness(x, y)?.is_some();
        self.final_memo.insert(key, v);
        Ok(v)
    }

    fn spoiler_wins(&mut self, x: &Team, y: &Team, rounds: u32) -> Result<bool, GameError> {
        if rounds == 0 {
            return self.spoiler_wins_final_memo(x, y);
        }
        let key = (
            rounds,
            x.domain().to_vec(),
            x.rows().cloned().collect::<Vec<_>>(),
            y.rows().cloned().collect::<Vec<_>>(),
        );
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        // Occupy the slot to defuse accidental cycles; positions strictly
        // descend in `rounds`, so recursion cannot actually revisit.
        let result = self.spoiler_wins_uncached(x, y, rounds)?;
        self.memo.insert(key, result);
        Ok(result)
    }

    fn spoiler_wins_uncached(&mut self, x: &Team, y: &Team, rounds: u32) -> Result<bool, GameError> {
        // Splitting moves.
        for (x1, x2) in covers(x) {
            let mut all_responses_fail = true;
            'resp: for (y1, y2) in covers(y) {
                let first = self.spoiler_wins(&x1, &y1, rounds - 1)?;
                if first {
                    continue 'resp;
                }
                let second = self.spoiler_wins(&x2, &y2, rounds - 1)?;
                if !second {
                    all_responses_fail = false;
                    break 'resp;
                }
            }
            if all_responses_fail {
                return Ok(true);
            }
        }
        // Supplementing moves.
        let pool = self.pool.clone();
        for v in &pool {
            for h in choice_functions(x, self.left.universe()) {
                let xh = x.supplement(&h, std::slice::from_ref(v))?;
                let mut all_k_fail = true;
                for k in choice_functions(y, self.right.universe()) {
                    let yk = y.supplement(&k, std::slice::from_ref(v))?;
                    if !self.spoiler_wins(&xh, &yk, rounds - 1)? {
                        all_k_fail = false;
                        break;
                    }
                }
                if all_k_fail {
                    return Ok(true);
                }
            }
        }
        // Duplication moves.
        for v in &pool {
            let xd = x.duplicate(v, &self.left);
            let yd = y.duplicate(v, &self.right);
            if self.spoiler_wins(&xd, &yd, rounds - 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// First winning Spoiler move in canonical order, if Spoiler wins;
    /// otherwise the first legal move.
    pub fn best_spoiler_move(
        &mut self,
        x: &Team,
        y: &Team,
        rounds: u32,
    ) -> Result<SpoilerMove, GameError> {
        debug_assert!(rounds > 0);
        for (x1, x2) in covers(x) {
            let mut all_fail = true;
            for (y1, y2) in covers(y) {
                if !self.spoiler_wins(&x1, &y1, rounds - 1)?
                    && !self.spoiler_wins(&x2, &y2, rounds - 1)?
                {
                    all_fail = false;
                    break;
                }
            }
            if all_fail {
                return Ok(SpoilerMove::Split { x1, x2 });
            }
        }
        let pool = self.pool.clone();
        for v in &pool {
            for h in choice_functions(x, self.left.universe()) {
                let xh = x.supplement(&h, std::slice::from_ref(v))?;
                let mut all_k_fail = true;
                for k in choice_functions(y, self.right.universe()) {
                    let yk = y.supplement(&k, std::slice::from_ref(v))?;
                    if !self.spoiler_wins(&xh, &yk, rounds - 1)? {
                        all_k_fail = false;
                        break;
                    }
                }
                if all_k_fail {
                    return Ok(SpoilerMove::Supplement {
                        var: v.clone(),
                        h,
                    });
                }
            }
        }
        for v in &pool {
            let xd = x.duplicate(v, &self.left);
            let yd = y.duplicate(v, &self.right);
            if self.spoiler_wins(&xd, &yd, rounds - 1)? {
                return Ok(SpoilerMove::Duplicate { var: v.clone() });
            }
        }
        // No winning move: play the trivial split (X, X).
        Ok(SpoilerMove::Split {
            x1: x.clone(),
            x2: x.clone(),
        })
    }

    /// Duplicator's best response: the first response keeping her winning
    /// if one exists, else the first legal response.
    pub fn respond(
        &mut self,
        x: &Team,
        y: &Team,
        rounds: u32,
        mv: &SpoilerMove,
    ) -> Result<DuplicatorResponse, GameError> {
        match mv {
            SpoilerMove::Split { x1, x2 } => {
                let mut fallback = None;
                for (y1, y2) in covers(y) {
                    if fallback.is_none() {
                        fallback = Some((y1.clone(), y2.clone()));
                    }
                    if !self.spoiler_wins(x1, &y1, rounds - 1)?
                        && !self.spoiler_wins(x2, &y2, rounds - 1)?
                    {
                        return Ok(DuplicatorResponse::Split { y1, y2 });
                    }
                }
                let (y1, y2) = fallback.expect("covers is never empty");
                Ok(DuplicatorResponse::Split { y1, y2 })
            }
            SpoilerMove::Supplement { var, h } => {
                let xh = x.supplement(h, std::slice::from_ref(var))?;
                let mut fallback = None;
                for k in choice_functions(y, self.right.universe()) {
                    if fallback.is_none() {
                        fallback = Some(k.clone());
                    }
                    let yk = y.supplement(&k, std::slice::from_ref(var))?;
                    if !self.spoiler_wins(&xh, &yk, rounds - 1)? {
                        return Ok(DuplicatorResponse::Supplement { k });
                    }
                }
                Ok(DuplicatorResponse::Supplement {
                    k: fallback.expect("choice_functions is never empty"),
                })
            }
            SpoilerMove::Duplicate { .. } => Ok(DuplicatorResponse::Forced),
        }
    }

    /// Spoiler's side pick after a split: the winning side if any, else 1.
    pub fn pick_side(
        &mut self,
        x1: &Team,
        x2: &Team,
        y1: &Team,
        y2: &Team,
        rounds: u32,
    ) -> Result<u8, GameError> {
        if self.spoiler_wins(x1, y1, rounds - 1)? {
            Ok(1)
        } else if self.spoiler_wins(x2, y2, rounds - 1)? {
            Ok(2)
        } else {
            Ok(1)
        }
    }
}

/// All covers `X = X' ∪ X''` (overlap allowed): each row goes left, right,
/// or both.
pub fn covers(team: &Team) -> Vec<(Team, Team)> {
    let rows: Vec<Vec<Element>> = team.rows().cloned().collect();
    let domain = team.domain().to_vec();
    let total = 3usize.pow(rows.len() as u32);
    let mut out = Vec::with_capacity(total);
    for mask in 0..total {
        let mut a = Team::new(domain.clone()).expect("valid domain");
        let mut b = Team::new(domain.clone()).expect("valid domain");
        let mut m = mask;
        for row in &rows {
            match m % 3 {
                0 => a.insert_row(row.clone()).expect("valid row"),
                1 => b.insert_row(row.clone()).expect("valid row"),
                _ => {
                    a.insert_row(row.clone()).expect("valid row");
                    b.insert_row(row.clone()).expect("valid row");
                }
            }
            m /= 3;
        }
        out.push((a, b));
    }
    out
}

/// All single-variable choice functions for a team over a universe of size
/// `n`: one nonempty value subset per row.
pub fn choice_functions(team: &Team, n: Element) -> Vec<ChoiceFunction> {
    let rows: Vec<Vec<Element>> = team.rows().cloned().collect();
    let per_row = (1usize << n) - 1;
    let mut out = Vec::new();
    let mut odo = vec![1usize; rows.len()];
    loop {
        let assignment: HashMap<&Vec<Element>, usize> =
            rows.iter().zip(odo.iter().copied()).collect();
        out.push(ChoiceFunction::from_fn(team, |s| {
            let row: Vec<Element> = team
                .domain()
                .iter()
                .map(|v| s.get(v).expect("assignment covers the domain"))
                .collect();
            let subset = assignment[&row];
            (0..n)
                .filter(|e| subset >> e & 1 == 1)
                .map(|e| vec![e])
                .collect()
        }));
        let mut i = 0;
        loop {
            if i == odo.len() {
                return out;
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

// ----------------------------------------------------------------------
// The canonical Duplicator strategy over the empty signature.
// ----------------------------------------------------------------------

/// All injections `{0..n_a-1} -> {0..n_b-1}`, each as a value vector.
pub fn injections(n_a: Element, n_b: Element) -> Vec<Vec<Element>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n_a {
        let mut next = Vec::new();
        for prefix in &out {
            for b in 0..n_b {
                if !prefix.contains(&b) {
                    let mut p = prefix.clone();
                    p.push(b);
                    next.push(p);
                }
            }
        }
        out = next;
    }
    out
}

fn apply_injection(pi: &[Element], row: &[Element]) -> Vec<Element> {
    row.iter().map(|&e| pi[e as usize]).collect()
}

/// `⋃ {π[X] : π injective}` — the canonical strategy's invariant value.
pub fn injection_closure(x: &Team, n_a: Element, n_b: Element) -> Team {
    let mut out = Team::new(x.domain().to_vec()).expect("valid domain");
    for pi in injections(n_a, n_b) {
        for row in x.rows() {
            out.insert_row(apply_injection(&pi, row)).expect("valid row");
        }
    }
    out
}

/// Checks the strategy invariant `Y = ⋃ {π[X]}`.
pub fn holds_injection_invariant(x: &Team, y: &Team, n_a: Element, n_b: Element) -> bool {
    injection_closure(x, n_a, n_b) == *y
}

/// The canonical Duplicator response over the empty signature, starting
/// from a position satisfying `Y = ⋃ {π[X]}`; the returned response
/// preserves that invariant (asserted by the caller via
/// [`holds_injection_invariant`]).
pub fn canonical_duplicator(
    p: &GamePosition,
    mv: &SpoilerMove,
) -> Result<DuplicatorResponse, GameError> {
    let sig = p.left.signature();
    if sig.rels().next().is_some() || sig.consts().next().is_some() {
        return Err(GameError::NonEmptySignature);
    }
    let n_a = p.left.universe();
    let n_b = p.right.universe();
    if n_a > n_b {
        return Err(GameError::UniverseOrder);
    }
    if !holds_injection_invariant(&p.x, &p.y, n_a, n_b) {
        return Err(GameError::InvariantViolated(
            "entry position is not the injection closure".into(),
        ));
    }
    let pis = injections(n_a, n_b);
    match mv {
        SpoilerMove::Split { x1, x2 } => {
            // Y_j = all images of X_j rows under injections (within Y).
            let mut y1 = Team::new(p.y.domain().to_vec()).expect("valid domain");
            let mut y2 = Team::new(p.y.domain().to_vec()).expect("valid domain");
            for pi in &pis {
                for row in x1.rows() {
                    y1.insert_row(apply_injection(pi, row)).expect("valid row");
                }
                for row in x2.rows() {
                    y2.insert_row(apply_injection(pi, row)).expect("valid row");
                }
            }
            Ok(DuplicatorResponse::Split { y1, y2 })
        }
        SpoilerMove::Supplement { h, .. } => {
            // K(s') = ⋃ {π(a) : π(s) = s', a ∈ H(s)}.
            let x = p.x.clone();
            let k = ChoiceFunction::from_fn(&p.y, |s_prime| {
                let prime_row: Vec<Element> = p
                    .y
                    .domain()
                    .iter()
                    .map(|v| s_prime.get(v).expect("assignment covers the domain"))
                    .collect();
                let mut vals = BTreeSet::new();
                for pi in &pis {
                    for row in x.rows() {
                        if apply_injection(pi, row) == prime_row {
                            if let Some(choice) = h.get(row) {
                                for tuple in choice {
                                    for &a in tuple {
                                        vals.insert(vec![pi[a as usize]]);
                                    }
                                }
                            }
                        }
                    }
                }
                vals
            });
            Ok(DuplicatorResponse::Supplement { k })
        }
        SpoilerMove::Duplicate { .. } => Ok(DuplicatorResponse::Forced),
    }
}

/// Applies a Spoiler move plus a Duplicator response (plus side pick for
/// splits) to produce the successor position.
pub fn apply_moves(
    p: &GamePosition,
    mv: &SpoilerMove,
    resp: &DuplicatorResponse,
    side_pick: u8,
) -> Result<GamePosition, GameError> {
    if p.rounds == 0 {
        return Err(GameError::BadMove("no rounds remaining".into()));
    }
    let (x, y) = match (mv, resp) {
        (SpoilerMove::Split { x1, x2 }, DuplicatorResponse::Split { y1, y2 }) => {
            if x1.union(x2)? != p.x {
                return Err(GameError::BadMove("left teams do not cover X".into()));
            }
            if y1.union(y2)? != p.y {
                return Err(GameError::BadMove("right teams do not cover Y".into()));
            }
            match side_pick {
                1 => (x1.clone(), y1.clone()),
                2 => (x2.clone(), y2.clone()),
                other => return Err(GameError::BadMove(format!("side pick {other}"))),
            }
        }
        (SpoilerMove::Supplement { var, h }, DuplicatorResponse::Supplement { k }) => (
            p.x.supplement(h, std::slice::from_ref(var))?,
            p.y.supplement(k, std::slice::from_ref(var))?,
        ),
        (SpoilerMove::Duplicate { var }, DuplicatorResponse::Forced) => (
            p.x.duplicate(var, &p.left),
            p.y.duplicate(var, &p.right),
        ),
        _ => return Err(GameError::BadMove("response does not fit the move".into())),
    };
    Ok(GamePosition {
        left: p.left.clone(),
        right: p.right.clone(),
        x,
        y,
        rounds: p.rounds - 1,
    })
}

/// The empty-signature preset: `A = {1..n}`, `B = {1..n+1}`, initial teams
/// `({∅}, {∅})`, `n` rounds.
pub fn empty_signature_preset(n: Element) -> GamePosition {
    let a = Structure::new(n).expect("n >= 1");
    let b = Structure::new(n + 1).expect("n+1 >= 1");
    GamePosition::new(
        Arc::new(a),
        Arc::new(b),
        Team::singleton_empty(),
        Team::singleton_empty(),
        n,
    )
    .expect("preset is well-formed")
}

/// First enumerated formula true on the left team and false on the right.
pub fn distinguishing_formula<'f>(
    left: &Structure,
    x: &Team,
    right: &Structure,
    y: &Team,
    formulas: &'f [Formula],
) -> Result<Option<&'f Formula>, GameError> {
    let force = NaiveOptions {
        force: true,
        ..Default::default()
    };
    for f in formulas {
        if eval_naive_opts(left, x, f, force)? && !eval_naive_opts(right, y, f, force)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

// ----------------------------------------------------------------------
// Index-addressable move spaces: the cover space has size 3^|X| and the
// single-variable choice-function space (2^n - 1)^|X|; both are addressed
// by mixed-radix digits so large families can be sampled without
// materializing them.
// ----------------------------------------------------------------------

pub fn cover_count(team: &Team) -> Option<u64> {
    3u64.checked_pow(u32::try_from(team.len()).ok()?)
}

/// The `idx`-th cover in base-3 row order.
pub fn cover_by_index(team: &Team, idx: u64) -> (Team, Team) {
    let mut a = Team::new(team.domain().to_vec()).expect("valid domain");
    let mut b = Team::new(team.domain().to_vec()).expect("valid domain");
    let mut m = idx;
    for row in team.rows() {
        match m % 3 {
            0 => a.insert_row(row.clone()).expect("valid row"),
            1 => b.insert_row(row.clone()).expect("valid row"),
            _ => {
                a.insert_row(row.clone()).expect("valid row");
                b.insert_row(row.clone()).expect("valid row");
            }
        }
        m /= 3;
    }
    (a, b)
}

pub fn choice_count(team: &Team, n: Element) -> Option<u64> {
    let per_row = (1u64 << n) - 1;
    let mut acc: u64 = 1;
    for _ in 0..team.len() {
        acc = acc.checked_mul(per_row)?;
    }
    Some(acc)
}

/// The `idx`-th single-variable choice function in base-(2^n - 1) row
/// order; digit d of row i picks the nonempty subset with mask d+1.
pub fn choice_function_by_index(team: &Team, n: Element, idx: u64) -> ChoiceFunction {
    let per_row = (1u64 << n) - 1;
    let rows: Vec<Vec<Element>> = team.rows().cloned().collect();
    let mut masks: HashMap<Vec<Element>, u64> = HashMap::new();
    let mut m = idx;
    for row in &rows {
        masks.insert(row.clone(), m % per_row + 1);
        m /= per_row;
    }
    ChoiceFunction::from_fn(team, |s| {
        let row: Vec<Element> = team
            .domain()
            .iter()
            .map(|v| s.get(v).expect("assignment covers the domain"))
            .collect();
        let subset = masks[&row];
        (0..n)
            .filter(|e| subset >> e & 1 == 1)
            .map(|e| vec![e])
            .collect()
    })
}
