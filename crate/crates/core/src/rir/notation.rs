//! A textual rendering of RIR terms for debugging and audit output, and a
//! parser that reads it back.
//!
//! Every binary node is parenthesized, so the text is unambiguous without
//! precedence rules:
//!
//! ```text
//! P ::= 0 | 1 | PreState | PostState | name | "quoted name" | #k | [a b ...]
//!     | (P | P) | (P P) | (P ∩ P) | ~P | P* | (P ▷ R)
//! R ::= 0 | 1 | I(P) | (P × P) | (R | R) | (R R) | (R ∘ R) | R*
//! S ::= (P = P) | (P ⊆ P) | (S ∧ S) | (S ∨ S) | ¬S
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use super::{PathSet, Rel, Spec};
use crate::automata::{Symbol, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("offset {offset}: {message}")]
pub struct NotationError {
    pub offset: usize,
    pub message: String,
}

/// Prints RIR terms with symbol names taken from a table.
pub struct Notation<'a> {
    table: &'a SymbolTable,
}

const KEYWORDS: &[&str] = &["0", "1", "PreState", "PostState", "I"];

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '/' | ':' | '@')
}

impl<'a> Notation<'a> {
    pub fn new(table: &'a SymbolTable) -> Self {
        Notation { table }
    }

    fn symbol(&self, out: &mut String, s: Symbol) {
        let name = self.table.name(s);
        let plain = name.starts_with('#')
            || (!name.is_empty() && name.chars().all(is_name_char) && !KEYWORDS.contains(&name));
        if plain {
            out.push_str(name);
        } else {
            let _ = write!(out, "{name:?}");
        }
    }

    pub fn pathset(&self, p: &PathSet) -> String {
        let mut out = String::new();
        self.write_pathset(&mut out, p);
        out
    }

    pub fn rel(&self, r: &Rel) -> String {
        let mut out = String::new();
        self.write_rel(&mut out, r);
        out
    }

    pub fn spec(&self, s: &Spec) -> String {
        let mut out = String::new();
        self.write_spec(&mut out, s);
        out
    }

    fn write_pathset(&self, out: &mut String, p: &PathSet) {
        match p {
            PathSet::Sym(s) => self.symbol(out, *s),
            PathSet::Class(ss) => {
                out.push('[');
                for (i, s) in ss.iter().enumerate() {
                    if i > 0 {
                        out.push(' ');
                    }
                    self.symbol(out, *s);
                }
                out.push(']');
            }
            PathSet::Zero => out.push('0'),
            PathSet::One => out.push('1'),
            PathSet::PreState => out.push_str("PreState"),
            PathSet::PostState => out.push_str("PostState"),
            PathSet::Union(a, b) => self.binary(out, &**a, " | ", &**b, Self::write_pathset, Self::write_pathset),
            PathSet::Concat(a, b) => self.binary(out, &**a, " ", &**b, Self::write_pathset, Self::write_pathset),
            PathSet::Intersect(a, b) => self.binary(out, &**a, " ∩ ", &**b, Self::write_pathset, Self::write_pathset),
            PathSet::Image(a, r) => self.binary(out, &**a, " ▷ ", &**r, Self::write_pathset, Self::write_rel),
            PathSet::Complement(a) => {
                out.push('~');
                self.write_pathset(out, a);
            }
            PathSet::Star(a) => {
                if matches!(**a, PathSet::Complement(_)) {
                    out.push('(');
                    self.write_pathset(out, a);
                    out.push(')');
                } else {
                    self.write_pathset(out, a);
                }
                out.push('*');
            }
        }
    }

    fn write_rel(&self, out: &mut String, r: &Rel) {
        match r {
            Rel::Cross(a, b) => self.binary(out, &**a, " × ", &**b, Self::write_pathset, Self::write_pathset),
            Rel::Identity(p) => {
                out.push_str("I(");
                self.write_pathset(out, p);
                out.push(')');
            }
            Rel::Zero => out.push('0'),
            Rel::One => out.push('1'),
            Rel::Union(a, b) => self.binary(out, &**a, " | ", &**b, Self::write_rel, Self::write_rel),
            Rel::Concat(a, b) => self.binary(out, &**a, " ", &**b, Self::write_rel, Self::write_rel),
            Rel::Compose(a, b) => self.binary(out, &**a, " ∘ ", &**b, Self::write_rel, Self::write_rel),
            Rel::Star(a) => {
                self.write_rel(out, a);
                out.push('*');
            }
        }
    }

    fn write_spec(&self, out: &mut String, s: &Spec) {
        match s {
            Spec::Equal(a, b) => self.binary(out, a, " = ", b, Self::write_pathset, Self::write_pathset),
            Spec::Subset(a, b) => self.binary(out, a, " ⊆ ", b, Self::write_pathset, Self::write_pathset),
            Spec::And(a, b) => self.binary(out, &**a, " ∧ ", &**b, Self::write_spec, Self::write_spec),
            Spec::Or(a, b) => self.binary(out, &**a, " ∨ ", &**b, Self::write_spec, Self::write_spec),
            Spec::Not(a) => {
                out.push('¬');
                self.write_spec(out, a);
            }
        }
    }

    fn binary<A, B>(
        &self,
        out: &mut String,
        a: &A,
        op: &str,
        b: &B,
        fa: fn(&Self, &mut String, &A),
        fb: fn(&Self, &mut String, &B),
    ) {
        out.push('(');
        fa(self, out, a);
        out.push_str(op);
        fb(self, out, b);
        out.push(')');
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Open,
    Close,
    OpenBracket,
    CloseBracket,
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, NotationError> {
    let mut toks = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            toks.push((at, Tok::Open));
        } else if c == ')' {
            chars.next();
            toks.push((at, Tok::Close));
        } else if c == '[' {
            chars.next();
            toks.push((at, Tok::OpenBracket));
        } else if c == ']' {
            chars.next();
            toks.push((at, Tok::CloseBracket));
        } else if "|∩▷×∘=⊆∧∨~¬*".contains(c) {
            chars.next();
            toks.push((at, Tok::Op(c)));
        } else if c == '"' {
            chars.next();
            let mut name = String::new();
            loop {
                match chars.next() {
                    Some((_, '"')) => break,
                    Some((_, '\\')) => match chars.next() {
                        Some((_, e)) => name.push(e),
                        None => break,
                    },
                    Some((_, ch)) => name.push(ch),
                    None => {
                        return Err(NotationError {
                            offset: at,
                            message: "unterminated quoted name".into(),
                        })
                    }
                }
            }
            // Quoted names never collide with keywords.
            toks.push((at, Tok::Name(format!("\"{name}"))));
        } else if c == '#' || is_name_char(c) {
            let mut name = String::new();
            name.push(c);
            chars.next();
            while let Some(&(_, ch)) = chars.peek() {
                if is_name_char(ch) {
                    name.push(ch);
                    chars.next();
                } else {
                    break;
                }
            }
            toks.push((at, Tok::Name(name)));
        } else {
            return Err(NotationError {
                offset: at,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    table: &'a SymbolTable,
    /// Positions where a relation is known not to parse. Keeps the
    /// relation-then-path-set retry linear.
    rel_failures: HashSet<usize>,
}

type PResult<T> = Result<T, NotationError>;

impl<'a> Parser<'a> {
    fn new(text: &str, table: &'a SymbolTable) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            end: text.len(),
            table,
            rel_failures: HashSet::new(),
        })
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(NotationError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.error("trailing input")
        }
    }

    /// Runs `f`, restoring the position if it fails.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = self.pos;
        let result = f(self);
        if result.is_err() {
            self.pos = saved;
        }
        result
    }

    fn symbol(&mut self, name: &str) -> PResult<Symbol> {
        let name = name.strip_prefix('"').unwrap_or(name);
        match self.table.get(name) {
            Some(s) => Ok(s),
            None => self.error(format!("unknown symbol {name:?}")),
        }
    }

    fn stars<T>(&mut self, mut value: T, wrap: fn(T) -> T) -> T {
        while self.eat(&Tok::Op('*')) {
            value = wrap(value);
        }
        value
    }

    fn pathset(&mut self) -> PResult<PathSet> {
        if self.eat(&Tok::Op('~')) {
            return Ok(self.pathset()?.complement());
        }
        let atom = self.pathset_atom()?;
        Ok(self.stars(atom, PathSet::star))
    }

    fn pathset_atom(&mut self) -> PResult<PathSet> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "0" => PathSet::Zero,
                    "1" => PathSet::One,
                    "PreState" => PathSet::PreState,
                    "PostState" => PathSet::PostState,
                    _ => PathSet::Sym(self.symbol(&name)?),
                })
            }
            Some(Tok::OpenBracket) => {
                self.pos += 1;
                let mut symbols = Vec::new();
                while let Some(Tok::Name(name)) = self.peek().cloned() {
                    self.pos += 1;
                    symbols.push(self.symbol(&name)?);
                }
                self.expect(&Tok::CloseBracket, "']'")?;
                if symbols.len() < 2 {
                    return self.error("a class needs at least two symbols");
                }
                Ok(PathSet::Class(symbols))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let left = self.pathset()?;
                let result = match self.peek() {
                    Some(Tok::Close) => left,
                    Some(Tok::Op('|')) => {
                        self.pos += 1;
                        left.union(self.pathset()?)
                    }
                    Some(Tok::Op('∩')) => {
                        self.pos += 1;
                        left.intersect(self.pathset()?)
                    }
                    Some(Tok::Op('▷')) => {
                        self.pos += 1;
                        left.image(self.rel()?)
                    }
                    _ => left.concat(self.pathset()?),
                };
                self.expect(&Tok::Close, "')'")?;
                Ok(result)
            }
            _ => self.error("expected a path set"),
        }
    }

    fn rel(&mut self) -> PResult<Rel> {
        let start = self.pos;
        if self.rel_failures.contains(&start) {
            return self.error("expected a relation");
        }
        match self.rel_atom() {
            Ok(atom) => Ok(self.stars(atom, Rel::star)),
            Err(e) => {
                self.rel_failures.insert(start);
                Err(e)
            }
        }
    }

    fn rel_atom(&mut self) -> PResult<Rel> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) if name == "0" => {
                self.pos += 1;
                Ok(Rel::Zero)
            }
            Some(Tok::Name(name)) if name == "1" => {
                self.pos += 1;
                Ok(Rel::One)
            }
            Some(Tok::Name(name)) if name == "I" => {
                self.pos += 1;
                self.expect(&Tok::Open, "'('")?;
                let p = self.pathset()?;
                self.expect(&Tok::Close, "')'")?;
                Ok(Rel::identity(p))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let result = self.attempt(|p| {
                    let left = p.rel()?;
                    let r = match p.peek() {
                        Some(Tok::Close) => left,
                        Some(Tok::Op('|')) => {
                            p.pos += 1;
                            left.union(p.rel()?)
                        }
                        Some(Tok::Op('∘')) => {
                            p.pos += 1;
                            left.compose(p.rel()?)
                        }
                        _ => left.concat(p.rel()?),
                    };
                    p.expect(&Tok::Close, "')'")?;
                    Ok(r)
                });
                match result {
                    Ok(r) => Ok(r),
                    Err(_) => {
                        let left = self.pathset()?;
                        self.expect(&Tok::Op('×'), "'×'")?;
                        let right = self.pathset()?;
                        self.expect(&Tok::Close, "')'")?;
                        Ok(Rel::cross(left, right))
                    }
                }
            }
            _ => self.error("expected a relation"),
        }
    }

    fn spec(&mut self) -> PResult<Spec> {
        if self.eat(&Tok::Op('¬')) {
            return Ok(self.spec()?.not());
        }
        self.expect(&Tok::Open, "'('")?;
        let result = self.attempt(|p| {
            let left = p.spec()?;
            let s = match p.peek() {
                Some(Tok::Close) => left,
                Some(Tok::Op('∧')) => {
                    p.pos += 1;
                    left.and(p.spec()?)
                }
                Some(Tok::Op('∨')) => {
                    p.pos += 1;
                    left.or(p.spec()?)
                }
                _ => return p.error("expected '∧' or '∨'"),
            };
            p.expect(&Tok::Close, "')'")?;
            Ok(s)
        });
        if let Ok(s) = result {
            return Ok(s);
        }
        let left = self.pathset()?;
        let s = if self.eat(&Tok::Op('=')) {
            Spec::Equal(left, self.pathset()?)
        } else if self.eat(&Tok::Op('⊆')) {
            Spec::Subset(left, self.pathset()?)
        } else {
            return self.error("expected '=' or '⊆'");
        };
        self.expect(&Tok::Close, "')'")?;
        Ok(s)
    }
}

pub fn parse_pathset(text: &str, table: &SymbolTable) -> Result<PathSet, NotationError> {
    let mut p = Parser::new(text, table)?;
    let result = p.pathset()?;
    p.finish()?;
    Ok(result)
}

pub fn parse_rel(text: &str, table: &SymbolTable) -> Result<Rel, NotationError> {
    let mut p = Parser::new(text, table)?;
    let result = p.rel()?;
    p.finish()?;
    Ok(result)
}

pub fn parse_spec(text: &str, table: &SymbolTable) -> Result<Spec, NotationError> {
    let mut p = Parser::new(text, table)?;
    let result = p.spec()?;
    p.finish()?;
    Ok(result)
}
