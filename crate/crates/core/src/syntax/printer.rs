//! Canonical pretty-printer. `parse_formula(format!("{f}"), sig) == f`
//! structurally for every well-formed formula: binary connectives are
//! always parenthesized and `Not` nodes always print as `!(...)`, which
//! keeps them distinct from negated literals.

use std::fmt;

use super::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
        }
    }
}

/// Quantified bodies parse greedily, so a quantifier in operand position
/// needs its own parentheses.
fn write_operand(f: &mut fmt::Formatter<'_>, x: &Formula) -> fmt::Result {
    match x {
        Formula::Exists(..) | Formula::Forall(..) => write!(f, "({x})"),
        _ => write!(f, "{x}"),
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, ts: &[Term]) -> fmt::Result {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{t}")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Rel {
                negated,
                name,
                args,
            } => {
                if *negated {
                    write!(f, "!")?;
                }
                write!(f, "{name}(")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
            Formula::Eq {
                negated,
                left,
                right,
            } => {
                write!(f, "{left} {} {right}", if *negated { "!=" } else { "=" })
            }
            Formula::Incl { left, right } => {
                write!(f, "(")?;
                write_terms(f, left)?;
                write!(f, ") <= (")?;
                write_terms(f, right)?;
                write!(f, ")")
            }
            Formula::Dep { left, right } => {
                write!(f, "dep(")?;
                write_terms(f, left)?;
                write!(f, "; ")?;
                write_terms(f, right)?;
                write!(f, ")")
            }
            Formula::Excl { left, right } => {
                write!(f, "excl(")?;
                write_terms(f, left)?;
                write!(f, "; ")?;
                write_terms(f, right)?;
                write!(f, ")")
            }
            Formula::Indep { left, right } => {
                write!(f, "indep(")?;
                write_terms(f, left)?;
                write!(f, "; ")?;
                write_terms(f, right)?;
                write!(f, ")")
            }
            Formula::CondIndep { cond, left, right } => {
                write!(f, "cindep(")?;
                write_terms(f, cond)?;
                write!(f, "; ")?;
                write_terms(f, left)?;
                write!(f, "; ")?;
                write_terms(f, right)?;
                write!(f, ")")
            }
            Formula::Not(a) => write!(f, "!({a})"),
            Formula::Implies(a, b) => {
                write!(f, "(")?;
                write_operand(f, a)?;
                write!(f, " -> ")?;
                write_operand(f, b)?;
                write!(f, ")")
            }
            Formula::And(a, b) => {
                write!(f, "(")?;
                write_operand(f, a)?;
                write!(f, " & ")?;
                write_operand(f, b)?;
                write!(f, ")")
            }
            Formula::Or(a, b) => {
                write!(f, "(")?;
                write_operand(f, a)?;
                write!(f, " | ")?;
                write_operand(f, b)?;
                write!(f, ")")
            }
            Formula::Exists(v, b) => write!(f, "exists {v}. {b}"),
            Formula::Forall(v, b) => write!(f, "forall {v}. {b}"),
            Formula::Fix {
                op,
                rel,
                vars,
                body,
                args,
            } => {
                write!(f, "{op} {rel}(")?;
                for (i, v) in vars.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "). {body} @ (")?;
                write_terms(f, args)?;
                write!(f, ")")
            }
        }
    }
}
