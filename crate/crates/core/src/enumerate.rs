//! Exhaustive enumeration of small relations and teams, the backbone of
//! the oracle-style checks: properties are verified over *all* models and
//! teams below a size bound rather than sampled.

use crate::structures::{Element, Relation, Team};

/// All `k`-wide rows over `{0..n-1}`, lexicographic.
pub fn all_rows(n: Element, width: usize) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    let count = (n as u64).pow(width as u32);
    for idx in 0..count {
        let mut row = vec![0; width];
        let mut rest = idx;
        for i in (0..width).rev() {
            row[i] = (rest % n as u64) as Element;
            rest /= n as u64;
        }
        out.push(row);
    }
    out
}

/// All relations of the given arity over `{0..n-1}`. Requires
/// `n^arity <= 20` (2^20 relations at most).
pub fn all_relations(n: Element, arity: usize) -> Vec<Relation> {
    let cells = (n as u64).pow(arity as u32);
    assert!(cells <= 20, "all_relations: 2^{cells} relations is too many");
    (0..(1u64 << cells))
        .map(|mask| Relation::from_bitmask(n, arity, mask))
        .collect()
}

/// All teams over the given domain with rows drawn from `{0..n-1}`.
/// Requires `n^|domain| <= 20`.
pub fn all_teams(domain: &[&str], n: Element) -> Vec<Team> {
    let rows = all_rows(n, domain.len());
    assert!(rows.len() <= 20, "all_teams: too many candidate rows");
    let mut out = Vec::new();
    for mask in 0u64..(1 << rows.len()) {
        let picked = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, r)| r.clone());
        out.push(Team::from_rows(domain.to_vec(), picked).expect("valid rows"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_rows(3, 2).len(), 9);
        assert_eq!(all_relations(2, 2).len(), 16);
        assert_eq!(all_relations(3, 2).len(), 512);
        assert_eq!(all_teams(&["x", "y"], 2).len(), 16);
        // Teams over the empty domain: the empty team and {∅}.
        assert_eq!(all_teams(&[], 2).len(), 2);
    }
}
