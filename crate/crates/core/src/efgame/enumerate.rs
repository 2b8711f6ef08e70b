//! Bounded enumeration of inclusion-logic formulas by rank, the oracle for
//! one direction of the game/formula correspondence.
//!
//! The family is built level by level: level 0 holds the budgeted atoms
//! and their conjunctions (conjunction does not raise rank); level k+1
//! adds disjunctions of unordered level-k pairs and single quantifications
//! of level-k members. Conjunctions above level 0 are omitted — at the
//! team level a conjunction distinguishes two positions only if one of its
//! conjuncts already does, so they add search cost without adding
//! distinguishing power at the ranks checked here. Idempotent and
//! commutative duplicates are canonicalized away.

use super::{atom_family, AtomBudget, GameError};
use crate::structures::Structure;
use crate::syntax::Formula;

/// Budgets for the enumerator; `max_formulas` is a hard output cap.
#[derive(Debug, Clone)]
pub struct EnumBudget {
    pub max_rank: u32,
    /// Largest conjunction size at level 0 (1 = atoms only).
    pub max_conj: usize,
    pub max_formulas: usize,
    pub atoms: AtomBudget,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_rank: 1,
            max_conj: 2,
            max_formulas: 200_000,
            atoms: AtomBudget::default(),
        }
    }
}

/// All budgeted formulas of rank at most `budget.max_rank` whose free
/// variables lie in `free_vars`; quantifiers and atoms range over
/// `free_vars` plus `extra_vars`.
pub fn enumerate_formulas(
    m: &Structure,
    free_vars: &[String],
    extra_vars: &[String],
    budget: &EnumBudget,
) -> Result<Vec<Formula>, GameError> {
    let mut vars: Vec<String> = free_vars.to_vec();
    for v in extra_vars {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    let atoms = atom_family(m, &vars, &budget.atoms);
    let mut level: Vec<Formula> = Vec::new();

    // Level 0: atoms and conjunction-sets of up to max_conj distinct atoms.
    level.extend(atoms.iter().cloned());
    let mut current_combos: Vec<Vec<usize>> = (0..atoms.len()).map(|i| vec![i]).collect();
    for _size in 2..=budget.max_conj.max(1) {
        let mut next_combos = Vec::new();
        for combo in &current_combos {
            let last = *combo.last().expect("combos are nonempty");
            for j in last + 1..atoms.len() {
                let mut c = combo.clone();
                c.push(j);
                next_combos.push(c);
            }
        }
        for combo in &next_combos {
            level.push(Formula::conj(
                combo.iter().map(|&i| atoms[i].clone()).collect(),
            ));
        }
        check_budget(level.len(), budget)?;
        current_combos = next_combos;
    }

    // Higher levels: disjunctions of unordered pairs and quantifications.
    for _rank in 1..=budget.max_rank {
        let base = level.clone();
        for (i, a) in base.iter().enumerate() {
            for b in base.iter().skip(i + 1) {
                level.push(Formula::or(a.clone(), b.clone()));
            }
            check_budget(level.len(), budget)?;
        }
        for v in &vars {
            for f in &base {
                level.push(Formula::exists(v.clone(), f.clone()));
                level.push(Formula::forall(v.clone(), f.clone()));
            }
            check_budget(level.len(), budget)?;
        }
    }

    // Keep formulas evaluable on teams over `free_vars`, drop duplicates.
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for f in level {
        if !f
            .free_vars()
            .iter()
            .all(|v| free_vars.contains(v))
        {
            continue;
        }
        if seen.insert(f.to_string()) {
            out.push(f);
        }
    }
    Ok(out)
}

fn check_budget(len: usize, budget: &EnumBudget) -> Result<(), GameError> {
    if len > budget.max_formulas {
        Err(GameError::Budget(format!(
            "formula enumeration exceeded {} formulas",
            budget.max_formulas
        )))
    } else {
        Ok(())
    }
}
