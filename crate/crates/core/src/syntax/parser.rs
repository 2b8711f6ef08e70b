//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := ("exists"|"forall") VAR "." formula | impl
//! impl    := disj [ "->" formula ]
//! disj    := conj { "|" conj }
//! conj    := unit { "&" unit }
//! unit    := "!" unit | literal | incl | genatom | fix | "(" formula ")"
//! literal := ["!"] REL "(" terms ")" | term ("="|"!=") term
//! incl    := "(" terms ")" "<=" "(" terms ")"
//! genatom := ("dep"|"excl"|"indep") "(" terms ";" terms ")"
//!          | "cindep" "(" terms ";" terms ";" terms ")"
//! fix     := ("gfp"|"lfp") REL "(" vars ")" "." formula "@" "(" terms ")"
//! term    := VAR | CONST | FUN "(" terms ")"
//! ```
//!
//! `->` and negation over non-literals are conveniences beyond the core
//! grammar; `to_nnf` removes them. Symbol classification (relation,
//! function, constant, variable) comes from the signature; identifiers not
//! declared anywhere are variables. Fixed-point operators bind their
//! relation symbol, so `gfp R(x). ...` needs no declaration for `R`.

use std::fmt;

use thiserror::Error;

use super::{FixOp, Formula, Signature, Term};

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (line {}, column {})", self.message, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    At,
    Amp,
    Pipe,
    Bang,
    Arrow,
    Eq,
    Neq,
    SubsetEq,
    End,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    text: String,
    offset: usize,
}

fn lex(input: &str) -> Result<Vec<Tok>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '(' => {
                i += 1;
                TokKind::LParen
            }
            ')' => {
                i += 1;
                TokKind::RParen
            }
            ',' => {
                i += 1;
                TokKind::Comma
            }
            ';' => {
                i += 1;
                TokKind::Semi
            }
            '.' => {
                i += 1;
                TokKind::Dot
            }
            '@' => {
                i += 1;
                TokKind::At
            }
            '&' => {
                i += 1;
                TokKind::Amp
            }
            '|' => {
                i += 1;
                TokKind::Pipe
            }
            '=' => {
                i += 1;
                TokKind::Eq
            }
            '!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    TokKind::Neq
                } else {
                    i += 1;
                    TokKind::Bang
                }
            }
            '<' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    i += 2;
                    TokKind::SubsetEq
                } else {
                    return Err(err_at(input, start, "expected `<=`".into()));
                }
            }
            '-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    i += 2;
                    TokKind::Arrow
                } else {
                    return Err(err_at(input, start, "expected `->`".into()));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() {
                    let d = bytes[i] as char;
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                TokKind::Ident
            }
            other => {
                return Err(err_at(
                    input,
                    start,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        toks.push(Tok {
            kind,
            text: input[start..i].to_string(),
            offset: start,
        });
    }
    toks.push(Tok {
        kind: TokKind::End,
        text: String::new(),
        offset: input.len(),
    });
    Ok(toks)
}

fn err_at(input: &str, offset: usize, message: String) -> ParseError {
    let mut line = 1;
    let mut column = 1;
    for (i, c) in input.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    ParseError {
        message,
        offset,
        line,
        column,
    }
}

const KEYWORDS: &[&str] = &[
    "exists", "forall", "gfp", "lfp", "dep", "excl", "indep", "cindep",
];

struct Parser<'a> {
    input: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    sig: &'a Signature,
    /// Relation symbols bound by enclosing fixed-point operators, with
    /// arities. Innermost last.
    fix_bound: Vec<(String, usize)>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if t.kind != TokKind::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        err_at(self.input, self.peek().offset, message.into())
    }

    fn error_tok(&self, tok: &Tok, message: impl Into<String>) -> ParseError {
        err_at(self.input, tok.offset, message.into())
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Tok, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(self.error(format!(
                "expected {what}, found `{}`",
                display_tok(self.peek())
            )))
        }
    }

    fn is_keyword(&self, tok: &Tok) -> bool {
        tok.kind == TokKind::Ident && KEYWORDS.contains(&tok.text.as_str())
    }

    /// Arity of `name` as a relation-like symbol, if it is one. Innermost
    /// fixed-point binding wins, then second-order variables, then model
    /// relations.
    fn rel_arity(&self, name: &str) -> Option<usize> {
        if let Some((_, a)) = self.fix_bound.iter().rev().find(|(n, _)| n == name) {
            return Some(*a);
        }
        self.sig
            .so_arity(name)
            .or_else(|| self.sig.rel_arity(name))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        if t.kind == TokKind::Ident && (t.text == "exists" || t.text == "forall") {
            self.bump();
            let var = self.bound_var()?;
            self.expect(TokKind::Dot, "`.` after quantified variable")?;
            let body = self.formula()?;
            return Ok(if t.text == "exists" {
                Formula::exists(var, body)
            } else {
                Formula::forall(var, body)
            });
        }
        let lhs = self.disj()?;
        if self.peek().kind == TokKind::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn bound_var(&mut self) -> Result<String, ParseError> {
        let t = self.expect(TokKind::Ident, "a variable")?;
        if self.is_keyword(&t) {
            return Err(self.error_tok(&t, format!("`{}` is a keyword, not a variable", t.text)));
        }
        if self.sig.rel_arity(&t.text).is_some()
            || self.sig.fun_arity(&t.text).is_some()
            || self.sig.is_const(&t.text)
            || self.sig.so_arity(&t.text).is_some()
        {
            return Err(self.error_tok(
                &t,
                format!("cannot bind `{}`: it is a declared symbol", t.text),
            ));
        }
        Ok(t.text)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.peek().kind == TokKind::Pipe {
            self.bump();
            let rhs = self.conj()?;
            f = Formula::or(f, rhs);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unit()?;
        while self.peek().kind == TokKind::Amp {
            self.bump();
            let rhs = self.unit()?;
            f = Formula::and(f, rhs);
        }
        Ok(f)
    }

    fn unit(&mut self) -> Result<Formula, ParseError> {
        let t = self.peek().clone();
        match t.kind {
            TokKind::Bang => {
                self.bump();
                // `!R(t̄)` with a relation-like symbol is a negated literal;
                // any other operand becomes a `Not` node for `to_nnf`.
                let inner = self.peek().clone();
                if inner.kind == TokKind::Ident
                    && !self.is_keyword(&inner)
                    && self.rel_arity(&inner.text).is_some()
                    && self.peek2().kind == TokKind::LParen
                {
                    let lit = self.rel_literal()?;
                    if let Formula::Rel { name, args, .. } = lit {
                        return Ok(Formula::Rel {
                            negated: true,
                            name,
                            args,
                        });
                    }
                    unreachable!("rel_literal returns Formula::Rel");
                }
                let inner = self.unit()?;
                Ok(Formula::Not(Box::new(inner)))
            }
            TokKind::LParen => {
                // Either an inclusion atom `(t̄1) <= (t̄2)` or a
                // parenthesized formula; try the tuple shape first and
                // backtrack if no `<=` follows.
                let save = self.pos;
                if let Ok(left) = self.tuple() {
                    if self.peek().kind == TokKind::SubsetEq {
                        let op_tok = self.bump();
                        let right = self.tuple()?;
                        if left.len() != right.len() {
                            return Err(self.error_tok(
                                &op_tok,
                                format!(
                                    "inclusion atom needs tuples of equal length, got {} and {}",
                                    left.len(),
                                    right.len()
                                ),
                            ));
                        }
                        return Ok(Formula::Incl { left, right });
                    }
                }
                self.pos = save;
                self.expect(TokKind::LParen, "`(`")?;
                let f = self.formula()?;
                self.expect(TokKind::RParen, "`)`")?;
                Ok(f)
            }
            TokKind::Ident => {
                match t.text.as_str() {
                    "gfp" | "lfp" => self.fixpoint(),
                    "dep" | "excl" | "indep" | "cindep" => self.genatom(),
                    "exists" | "forall" => Err(self.error(
                        "quantifier in operand position; parenthesize the quantified formula",
                    )),
                    name => {
                        if self.rel_arity(name).is_some() && self.peek2().kind == TokKind::LParen {
                            self.rel_literal()
                        } else if self.peek2().kind == TokKind::LParen
                            && self.sig.fun_arity(name).is_none()
                        {
                            Err(self.error_tok(&t, format!("unknown symbol `{name}`")))
                        } else {
                            // Equality literal starting with a term.
                            let left = self.term()?;
                            let op = self.bump();
                            let negated = match op.kind {
                                TokKind::Eq => false,
                                TokKind::Neq => true,
                                _ => {
                                    return Err(self.error_tok(
                                        &op,
                                        format!(
                                            "expected `=` or `!=` after term, found `{}`",
                                            display_tok(&op)
                                        ),
                                    ))
                                }
                            };
                            let right = self.term()?;
                            Ok(Formula::Eq {
                                negated,
                                left,
                                right,
                            })
                        }
                    }
                }
            }
            _ => Err(self.error(format!(
                "expected a formula, found `{}`",
                display_tok(&t)
            ))),
        }
    }

    fn rel_literal(&mut self) -> Result<Formula, ParseError> {
        let name_tok = self.expect(TokKind::Ident, "a relation symbol")?;
        let name = name_tok.text.clone();
        let arity = self
            .rel_arity(&name)
            .ok_or_else(|| self.error_tok(&name_tok, format!("unknown relation symbol `{name}`")))?;
        self.expect(TokKind::LParen, "`(`")?;
        let args = self.terms()?;
        self.expect(TokKind::RParen, "`)`")?;
        if args.len() != arity {
            return Err(self.error_tok(
                &name_tok,
                format!(
                    "symbol `{name}` used with {} argument(s), declared arity {arity}",
                    args.len()
                ),
            ));
        }
        Ok(Formula::Rel {
            negated: false,
            name,
            args,
        })
    }

    fn genatom(&mut self) -> Result<Formula, ParseError> {
        let kw = self.bump();
        self.expect(TokKind::LParen, "`(`")?;
        let first = self.terms()?;
        self.expect(TokKind::Semi, "`;`")?;
        let second = self.terms()?;
        let f = match kw.text.as_str() {
            "cindep" => {
                self.expect(TokKind::Semi, "`;`")?;
                let third = self.terms()?;
                Formula::CondIndep {
                    cond: first,
                    left: second,
                    right: third,
                }
            }
            "dep" => Formula::Dep {
                left: first,
                right: second,
            },
            "excl" => {
                if first.len() != second.len() {
                    return Err(self.error_tok(
                        &kw,
                        format!(
                            "exclusion atom needs tuples of equal length, got {} and {}",
                            first.len(),
                            second.len()
                        ),
                    ));
                }
                Formula::Excl {
                    left: first,
                    right: second,
                }
            }
            "indep" => Formula::Indep {
                left: first,
                right: second,
            },
            _ => unreachable!("genatom called on {:?}", kw.text),
        };
        self.expect(TokKind::RParen, "`)`")?;
        Ok(f)
    }

    fn fixpoint(&mut self) -> Result<Formula, ParseError> {
        let kw = self.bump();
        let op = if kw.text == "gfp" { FixOp::Gfp } else { FixOp::Lfp };
        let rel_tok = self.expect(TokKind::Ident, "a relation symbol to bind")?;
        let rel = rel_tok.text.clone();
        if self.is_keyword(&rel_tok) {
            return Err(self.error_tok(&rel_tok, format!("`{rel}` is a keyword")));
        }
        if self.sig.rel_arity(&rel).is_some()
            || self.sig.fun_arity(&rel).is_some()
            || self.sig.is_const(&rel)
        {
            return Err(self.error_tok(
                &rel_tok,
                format!("cannot bind `{rel}`: it is a declared model symbol"),
            ));
        }
        self.expect(TokKind::LParen, "`(`")?;
        let mut vars = Vec::new();
        loop {
            let v = self.bound_var()?;
            if vars.contains(&v) {
                return Err(self.error(format!("repeated bound variable `{v}`")));
            }
            vars.push(v);
            if self.peek().kind == TokKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(TokKind::RParen, "`)`")?;
        self.expect(TokKind::Dot, "`.`")?;
        self.fix_bound.push((rel.clone(), vars.len()));
        let body = self.formula();
        self.fix_bound.pop();
        let body = body?;
        self.expect(TokKind::At, "`@` after the fixed-point body")?;
        self.expect(TokKind::LParen, "`(`")?;
        let args = self.terms()?;
        self.expect(TokKind::RParen, "`)`")?;
        if args.len() != vars.len() {
            return Err(self.error_tok(
                &rel_tok,
                format!(
                    "fixed point over `{rel}` binds {} variable(s) but is applied to {} term(s)",
                    vars.len(),
                    args.len()
                ),
            ));
        }
        Ok(Formula::Fix {
            op,
            rel,
            vars,
            body: Box::new(body),
            args,
        })
    }

    fn tuple(&mut self) -> Result<Vec<Term>, ParseError> {
        self.expect(TokKind::LParen, "`(`")?;
        let ts = self.terms()?;
        self.expect(TokKind::RParen, "`)`")?;
        Ok(ts)
    }

    fn terms(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut ts = vec![self.term()?];
        while self.peek().kind == TokKind::Comma {
            self.bump();
            ts.push(self.term()?);
        }
        Ok(ts)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.expect(TokKind::Ident, "a term")?;
        if self.is_keyword(&t) {
            return Err(self.error_tok(&t, format!("`{}` is a keyword, not a term", t.text)));
        }
        let name = t.text.clone();
        if let Some(arity) = self.sig.fun_arity(&name) {
            self.expect(TokKind::LParen, "`(`")?;
            let args = self.terms()?;
            self.expect(TokKind::RParen, "`)`")?;
            if args.len() != arity {
                return Err(self.error_tok(
                    &t,
                    format!(
                        "symbol `{name}` used with {} argument(s), declared arity {arity}",
                        args.len()
                    ),
                ));
            }
            return Ok(Term::App(name, args));
        }
        if self.sig.is_const(&name) {
            return Ok(Term::Const(name));
        }
        if self.rel_arity(&name).is_some() {
            return Err(self.error_tok(
                &t,
                format!("relation symbol `{name}` cannot appear in term position"),
            ));
        }
        if self.peek().kind == TokKind::LParen {
            return Err(self.error_tok(&t, format!("unknown symbol `{name}`")));
        }
        Ok(Term::Var(name))
    }
}

/// Parses a formula against the given signature. Identifiers that are not
/// declared symbols are variables.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        input: text,
        toks,
        pos: 0,
        sig,
        fix_bound: Vec::new(),
    };
    let f = p.formula()?;
    if p.peek().kind != TokKind::End {
        return Err(p.error(format!(
            "trailing input starting at `{}`",
            display_tok(p.peek())
        )));
    }
    Ok(f)
}

/// Parses a single term against the signature.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        input: text,
        toks,
        pos: 0,
        sig,
        fix_bound: Vec::new(),
    };
    let t = p.term()?;
    if p.peek().kind != TokKind::End {
        return Err(p.error("trailing input after term"));
    }
    Ok(t)
}

fn display_tok(t: &Tok) -> String {
    match t.kind {
        TokKind::End => "<end of input>".into(),
        TokKind::Ident => t.text.clone(),
        TokKind::LParen => "(".into(),
        TokKind::RParen => ")".into(),
        TokKind::Comma => ",".into(),
        TokKind::Semi => ";".into(),
        TokKind::Dot => ".".into(),
        TokKind::At => "@".into(),
        TokKind::Amp => "&".into(),
        TokKind::Pipe => "|".into(),
        TokKind::Bang => "!".into(),
        TokKind::Arrow => "->".into(),
        TokKind::Eq => "=".into(),
        TokKind::Neq => "!=".into(),
        TokKind::SubsetEq => "<=".into(),
    }
}
