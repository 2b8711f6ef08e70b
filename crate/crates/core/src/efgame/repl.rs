//! Interactive text loop for playing the game against the solver, also
//! used headlessly to replay a transcript of moves.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};

use super::{
    apply_moves, canonical_duplicator, DuplicatorResponse, GameError, GamePosition, SolveConfig,
    Solver, SpoilerMove, Winner,
};
use crate::structures::{ChoiceFunction, Element, Team};

/// Which side the human plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Spoiler,
    Duplicator,
}

/// Finished session: the accepted input lines (replayable), the winner,
/// and the witnessing atom if Spoiler won the final check.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub inputs: Vec<String>,
    pub winner: Winner,
    pub witness: Option<String>,
}

/// Plays one game. The machine side consults the exhaustive solver (and,
/// on empty-signature positions where the injection invariant holds, the
/// canonical response); ill-formed human input is re-prompted.
pub fn repl_play(
    start: &GamePosition,
    human: Role,
    cfg: &SolveConfig,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
) -> Result<Transcript, GameError> {
    let mut solver = Solver::new(start, cfg)?;
    let mut inputs = Vec::new();
    let mut pos = start.clone();
    writeln!(output, "game over {} round(s); you play {}", pos.rounds, match human {
        Role::Spoiler => "Spoiler",
        Role::Duplicator => "Duplicator",
    })
    .ok();

    while pos.rounds > 0 {
        print_position(output, &pos);
        let mv = if human == Role::Spoiler {
            prompt_spoiler_move(&pos, input, output, &mut inputs)?
        } else {
            let mv = solver.best_spoiler_move(&pos.x, &pos.y, pos.rounds)?;
            writeln!(output, "spoiler plays: {}", show_spoiler_move(&pos, &mv)).ok();
            mv
        };
        let resp = match (&mv, human) {
            (SpoilerMove::Duplicate { .. }, _) => DuplicatorResponse::Forced,
            (_, Role::Duplicator) => prompt_duplicator_response(&pos, &mv, input, output, &mut inputs)?,
            (_, Role::Spoiler) => {
                let resp = canonical_duplicator(&pos, &mv)
                    .or_else(|_| solver.respond(&pos.x, &pos.y, pos.rounds, &mv))?;
                writeln!(output, "duplicator replies: {}", show_response(&pos, &resp)).ok();
                resp
            }
        };
        let side = match (&mv, &resp) {
            (SpoilerMove::Split { x1, x2 }, DuplicatorResponse::Split { y1, y2 }) => {
                if human == Role::Spoiler {
                    prompt_pick(input, output, &mut inputs)?
                } else {
                    let side = solver.pick_side(x1, x2, y1, y2, pos.rounds)?;
                    writeln!(output, "spoiler picks side {side}").ok();
                    side
                }
            }
            _ => 1,
        };
        pos = apply_moves(&pos, &mv, &resp, side)?;
    }

    print_position(output, &pos);
    let witness = solver.final_witness(&pos.x, &pos.y)?;
    let winner = match &witness {
        Some(atom) => {
            writeln!(output, "winner: Spoiler (witness: {atom})").ok();
            Winner::Spoiler
        }
        None => {
            writeln!(output, "winner: Duplicator (no distinguishing atom)").ok();
            Winner::Duplicator
        }
    };
    Ok(Transcript {
        inputs,
        winner,
        witness: witness.map(|a| a.to_string()),
    })
}

fn print_position(out: &mut dyn Write, p: &GamePosition) {
    writeln!(out, "-- position ({} round(s) left) --", p.rounds).ok();
    let domain = p.x.domain().join(" ");
    writeln!(
        out,
        "domain: {}",
        if domain.is_empty() { "(empty)" } else { &domain }
    )
    .ok();
    for (tag, m, team) in [("left", &p.left, &p.x), ("right", &p.right, &p.y)] {
        writeln!(out, "{tag} (universe {}):", m.universe()).ok();
        if team.is_empty() {
            writeln!(out, "  (empty team)").ok();
        }
        for (i, row) in team.rows().enumerate() {
            let cells = if row.is_empty() {
                "{}".to_string()
            } else {
                p.x.domain()
                    .iter()
                    .zip(row)
                    .map(|(v, e)| format!("{v}={e}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(out, "  {i}: {cells}").ok();
        }
    }
}

fn read_line(
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    prompt: &str,
) -> Result<Option<String>, GameError> {
    write!(output, "{prompt}").ok();
    output.flush().ok();
    let mut line = String::new();
    match input.read_line(&mut line) {
        Ok(0) => Ok(None),
        Ok(_) => Ok(Some(line.trim().to_string())),
        Err(e) => Err(GameError::BadMove(format!("input error: {e}"))),
    }
}

fn prompt_spoiler_move(
    p: &GamePosition,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    inputs: &mut Vec<String>,
) -> Result<SpoilerMove, GameError> {
    loop {
        let Some(line) = read_line(input, output, "spoiler> ")? else {
            return Err(GameError::BadMove("end of input".into()));
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_spoiler_move(p, &line) {
            Ok(mv) => {
                inputs.push(line);
                return Ok(mv);
            }
            Err(e) => {
                writeln!(output, "  ? {e}").ok();
            }
        }
    }
}

fn prompt_duplicator_response(
    p: &GamePosition,
    mv: &SpoilerMove,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    inputs: &mut Vec<String>,
) -> Result<DuplicatorResponse, GameError> {
    if matches!(mv, SpoilerMove::Split { .. }) {
        writeln!(output, "spoiler splits: {}", show_spoiler_move(p, mv)).ok();
    } else {
        writeln!(output, "spoiler supplements: {}", show_spoiler_move(p, mv)).ok();
    }
    loop {
        let Some(line) = read_line(input, output, "duplicator> ")? else {
            return Err(GameError::BadMove("end of input".into()));
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_duplicator_response(p, mv, &line) {
            Ok(resp) => {
                inputs.push(line);
                return Ok(resp);
            }
            Err(e) => {
                writeln!(output, "  ? {e}").ok();
            }
        }
    }
}

fn prompt_pick(
    input: &mut dyn BufRead,
    output: &mut dyn Write,
    inputs: &mut Vec<String>,
) -> Result<u8, GameError> {
    loop {
        let Some(line) = read_line(input, output, "pick> ")? else {
            return Err(GameError::BadMove("end of input".into()));
        };
        match line.trim() {
            "pick 1" | "1" => {
                inputs.push(line);
                return Ok(1);
            }
            "pick 2" | "2" => {
                inputs.push(line);
                return Ok(2);
            }
            other => {
                writeln!(output, "  ? expected `pick 1` or `pick 2`, got `{other}`").ok();
            }
        }
    }
}

// ----------------------------------------------------------------------
// Move syntax.
// ----------------------------------------------------------------------

fn rows_sorted(team: &Team) -> Vec<Vec<Element>> {
    team.rows().cloned().collect()
}

fn team_from_ids(team: &Team, ids: &[usize]) -> Result<Team, GameError> {
    let rows = rows_sorted(team);
    let mut out = Team::new(team.domain().to_vec()).expect("valid domain");
    for &i in ids {
        let row = rows
            .get(i)
            .ok_or_else(|| GameError::BadMove(format!("no assignment with id {i}")))?;
        out.insert_row(row.clone()).expect("valid row");
    }
    Ok(out)
}

fn parse_id_set(text: &str) -> Result<Vec<usize>, GameError> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| GameError::BadMove(format!("expected `{{ids}}`, got `{text}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| GameError::BadMove(format!("bad id `{p}`")))
        })
        .collect()
}

/// `split L: {ids} {ids}` | `supp v {id:{elems},...}` | `dup v`
fn parse_spoiler_move(p: &GamePosition, line: &str) -> Result<SpoilerMove, GameError> {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix("split") {
        let rest = rest.trim_start().strip_prefix("L:").unwrap_or(rest).trim();
        let (first, second) = split_two_groups(rest)?;
        let x1 = team_from_ids(&p.x, &parse_id_set(first)?)?;
        let x2 = team_from_ids(&p.x, &parse_id_set(second)?)?;
        return Ok(SpoilerMove::Split { x1, x2 });
    }
    if let Some(rest) = line.strip_prefix("supp") {
        let rest = rest.trim();
        let (var, map) = rest
            .split_once(char::is_whitespace)
            .ok_or_else(|| GameError::BadMove("expected `supp v {id:{elems},...}`".into()))?;
        let choices = parse_choice_map(&p.x, map.trim(), p.left.universe())?;
        return Ok(SpoilerMove::Supplement {
            var: var.to_string(),
            h: choices,
        });
    }
    if let Some(rest) = line.strip_prefix("dup") {
        let var = rest.trim();
        if var.is_empty() {
            return Err(GameError::BadMove("expected `dup v`".into()));
        }
        return Ok(SpoilerMove::Duplicate {
            var: var.to_string(),
        });
    }
    Err(GameError::BadMove(format!(
        "expected `split ...`, `supp ...` or `dup v`, got `{line}`"
    )))
}

/// `resp: {ids} {ids}` for splits, `resp {id:{elems},...}` for supplements.
fn parse_duplicator_response(
    p: &GamePosition,
    mv: &SpoilerMove,
    line: &str,
) -> Result<DuplicatorResponse, GameError> {
    let line = line.trim();
    let rest = line
        .strip_prefix("resp")
        .ok_or_else(|| GameError::BadMove(format!("expected `resp ...`, got `{line}`")))?;
    let rest = rest.trim_start().strip_prefix(':').unwrap_or(rest).trim();
    match mv {
        SpoilerMove::Split { .. } => {
            let (first, second) = split_two_groups(rest)?;
            let y1 = team_from_ids(&p.y, &parse_id_set(first)?)?;
            let y2 = team_from_ids(&p.y, &parse_id_set(second)?)?;
            Ok(DuplicatorResponse::Split { y1, y2 })
        }
        SpoilerMove::Supplement { .. } => {
            let k = parse_choice_map(&p.y, rest, p.right.universe())?;
            Ok(DuplicatorResponse::Supplement { k })
        }
        SpoilerMove::Duplicate { .. } => Ok(DuplicatorResponse::Forced),
    }
}

fn split_two_groups(text: &str) -> Result<(&str, &str), GameError> {
    let text = text.trim();
    let close = text
        .find('}')
        .ok_or_else(|| GameError::BadMove(format!("expected two `{{..}}` groups in `{text}`")))?;
    let first = &text[..=close];
    let second = text[close + 1..].trim();
    if second.is_empty() {
        return Err(GameError::BadMove(
            "expected a second `{..}` group".into(),
        ));
    }
    Ok((first, second))
}

/// `{0:{0,1},2:{1}}` — per-assignment nonempty element sets. Rows missing
/// from the map are rejected.
fn parse_choice_map(
    team: &Team,
    text: &str,
    universe: Element,
) -> Result<ChoiceFunction, GameError> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| GameError::BadMove(format!("expected `{{id:{{elems}},...}}`, got `{text}`")))?;
    let mut entries: Vec<(usize, BTreeSet<Element>)> = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = inner.as_bytes();
    let mut chunks = Vec::new();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'{' => depth += 1,
            b'}' => depth = depth.saturating_sub(1),
            b',' if depth == 0 => {
                chunks.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    chunks.push(&inner[start..]);
    for chunk in chunks {
        let chunk = chunk.trim();
        if chunk.is_empty() {
            continue;
        }
        let (id, set) = chunk
            .split_once(':')
            .ok_or_else(|| GameError::BadMove(format!("expected `id:{{elems}}`, got `{chunk}`")))?;
        let id: usize = id
            .trim()
            .parse()
            .map_err(|_| GameError::BadMove(format!("bad id `{id}`")))?;
        let set_inner = set
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| GameError::BadMove(format!("expected `{{elems}}`, got `{set}`")))?;
        let mut elems = BTreeSet::new();
        for e in set_inner.split(',') {
            let e = e.trim();
            if e.is_empty() {
                continue;
            }
            let val: Element = e
                .parse()
                .map_err(|_| GameError::BadMove(format!("bad element `{e}`")))?;
            if val >= universe {
                return Err(GameError::BadMove(format!(
                    "element {val} outside universe 0..{universe}"
                )));
            }
            elems.insert(val);
        }
        if elems.is_empty() {
            return Err(GameError::BadMove(format!(
                "choice set for id {id} must be nonempty"
            )));
        }
        entries.push((id, elems));
    }
    let rows = rows_sorted(team);
    if entries.len() != rows.len() {
        return Err(GameError::BadMove(format!(
            "choice map covers {} assignment(s), team has {}",
            entries.len(),
            rows.len()
        )));
    }
    let mut by_row: std::collections::HashMap<Vec<Element>, BTreeSet<Element>> =
        std::collections::HashMap::new();
    for (id, elems) in entries {
        let row = rows
            .get(id)
            .ok_or_else(|| GameError::BadMove(format!("no assignment with id {id}")))?;
        by_row.insert(row.clone(), elems);
    }
    Ok(ChoiceFunction::from_fn(team, |s| {
        let row: Vec<Element> = team
            .domain()
            .iter()
            .map(|v| s.get(v).expect("assignment covers the domain"))
            .collect();
        by_row[&row].iter().map(|&e| vec![e]).collect()
    }))
}

// ----------------------------------------------------------------------
// Printing machine moves in the same syntax the parser accepts.
// ----------------------------------------------------------------------

fn ids_of(team: &Team, sub: &Team) -> String {
    let rows = rows_sorted(team);
    let ids: Vec<String> = sub
        .rows()
        .filter_map(|r| rows.iter().position(|q| q == r))
        .map(|i| i.to_string())
        .collect();
    format!("{{{}}}", ids.join(","))
}

fn show_choice(team: &Team, h: &ChoiceFunction) -> String {
    let rows = rows_sorted(team);
    let parts: Vec<String> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let vals = h
                .get(row)
                .map(|set| {
                    set.iter()
                        .flat_map(|t| t.iter())
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .unwrap_or_default();
            format!("{i}:{{{vals}}}")
        })
        .collect();
    format!("{{{}}}", parts.join(","))
}

fn show_spoiler_move(p: &GamePosition, mv: &SpoilerMove) -> String {
    match mv {
        SpoilerMove::Split { x1, x2 } => {
            format!("split L: {} {}", ids_of(&p.x, x1), ids_of(&p.x, x2))
        }
        SpoilerMove::Supplement { var, h } => {
            format!("supp {var} {}", show_choice(&p.x, h))
        }
        SpoilerMove::Duplicate { var } => format!("dup {var}"),
    }
}

fn show_response(p: &GamePosition, resp: &DuplicatorResponse) -> String {
    match resp {
        DuplicatorResponse::Split { y1, y2 } => {
            format!("resp: {} {}", ids_of(&p.y, y1), ids_of(&p.y, y2))
        }
        DuplicatorResponse::Supplement { k } => format!("resp {}", show_choice(&p.y, k)),
        DuplicatorResponse::Forced => "(forced)".to_string(),
    }
}
