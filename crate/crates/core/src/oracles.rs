//! Independent graph-theoretic reference implementations. These never touch
//! the formula evaluators; they exist to validate them.

use std::collections::BTreeSet;

use crate::structures::{Element, Relation};

/// True iff the directed graph `E` on `{0..n-1}` contains a cycle
/// (self-loops count). Iterative three-color depth-first search.
pub fn has_cycle(e: &Relation, n: Element) -> bool {
    assert_eq!(e.arity(), 2, "has_cycle expects a binary relation");
    let n = n as usize;
    let mut succs = vec![Vec::new(); n];
    for t in e.iter() {
        succs[t[0] as usize].push(t[1] as usize);
    }
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; n];
    for start in 0..n {
        if color[start] != Color::White {
            continue;
        }
        // Stack of (node, next-successor-index).
        let mut stack = vec![(start, 0usize)];
        color[start] = Color::Gray;
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < succs[u].len() {
                let v = succs[u][*i];
                *i += 1;
                match color[v] {
                    Color::Gray => return true,
                    Color::White => {
                        color[v] = Color::Gray;
                        stack.push((v, 0));
                    }
                    Color::Black => {}
                }
            } else {
                color[u] = Color::Black;
                stack.pop();
            }
        }
    }
    false
}

/// Solves the alternating game of the accessibility problem: player I
/// starts by picking some `a0` with `P(a0)`; thereafter II moves along `E`
/// on odd rounds and I on even rounds; whoever cannot move loses, and I
/// wins every infinite play.
///
/// II's objective is to strand I, a reachability objective, so the set of
/// II-winning positions is the least fixed point of the player-to-move-wins
/// operator with explicit turn parity.
pub fn agap_player1_wins(p: &Relation, e: &Relation, n: Element) -> bool {
    assert_eq!(p.arity(), 1, "agap expects a unary start relation");
    assert_eq!(e.arity(), 2, "agap expects a binary move relation");
    let n = n as usize;
    let mut succs = vec![Vec::new(); n];
    for t in e.iter() {
        succs[t[0] as usize].push(t[1] as usize);
    }
    // two_wins[a][turn]: II has a winning strategy at vertex a with
    // `turn` to move (0 = player I, 1 = player II).
    let mut two_wins = vec![[false; 2]; n];
    loop {
        let mut changed = false;
        for a in 0..n {
            // I to move: II wins if I is stuck, or every I-move keeps II winning.
            let one_stuck = succs[a].is_empty();
            let v = one_stuck || succs[a].iter().all(|&b| two_wins[b][1]);
            if v && !two_wins[a][0] {
                two_wins[a][0] = true;
                changed = true;
            }
            // II to move: II wins if some II-move reaches a II-winning spot.
            let v = succs[a].iter().any(|&b| two_wins[b][0]);
            if v && !two_wins[a][1] {
                two_wins[a][1] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    // Player I picks a start in P; round 1 is II's move from there.
    p.iter().any(|t| !two_wins[t[0] as usize][1])
}

/// Transitive closure of `E` (paths of length >= 1).
pub fn reachability(e: &Relation, n: Element) -> Relation {
    assert_eq!(e.arity(), 2, "reachability expects a binary relation");
    let mut closure: BTreeSet<(Element, Element)> =
        e.iter().map(|t| (t[0], t[1])).collect();
    loop {
        let mut next = closure.clone();
        for &(a, b) in &closure {
            for &(c, d) in &closure {
                if b == c {
                    next.insert((a, d));
                }
            }
        }
        if next.len() == closure.len() {
            break;
        }
        closure = next;
    }
    let _ = n;
    Relation::from_tuples(2, closure.into_iter().map(|(a, b)| vec![a, b]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn has_cycle_examples() {
        assert!(has_cycle(&Relation::from_tuples(2, [vec![0, 1], vec![1, 0]]), 2));
        assert!(!has_cycle(&Relation::from_tuples(2, [vec![0, 1], vec![1, 2]]), 3));
        assert!(has_cycle(&Relation::from_tuples(2, [vec![2, 2]]), 3));
        assert!(!has_cycle(&Relation::new(2), 3));
    }

    #[test]
    fn agap_examples() {
        // No starting vertex: player I cannot begin.
        assert!(!agap_player1_wins(
            &Relation::new(1),
            &Relation::from_tuples(2, [vec![0, 0]]),
            1
        ));
        // Self-loop: the play is infinite, which I wins.
        assert!(agap_player1_wins(
            &Relation::from_tuples(1, [vec![0]]),
            &Relation::from_tuples(2, [vec![0, 0]]),
            1
        ));
        // No edges: II is the first player unable to move (round 1).
        assert!(agap_player1_wins(
            &Relation::from_tuples(1, [vec![0]]),
            &Relation::new(2),
            1
        ));
        // Single edge 0 -> 1: II moves to 1, I is stuck there.
        assert!(!agap_player1_wins(
            &Relation::from_tuples(1, [vec![0]]),
            &Relation::from_tuples(2, [vec![0, 1]]),
            2
        ));
    }

    #[test]
    fn reachability_examples() {
        let path = Relation::from_tuples(2, [vec![0, 1], vec![1, 2]]);
        assert_eq!(
            reachability(&path, 3),
            Relation::from_tuples(2, [vec![0, 1], vec![0, 2], vec![1, 2]])
        );
        assert_eq!(reachability(&Relation::new(2), 3), Relation::new(2));
        let complete = Relation::full(2, 2);
        assert_eq!(reachability(&complete, 2), complete);
    }
}
