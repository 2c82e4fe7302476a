use std::collections::{BTreeSet, HashMap, HashSet};

use super::ast::{GuardedSpec, ModifierAst, NamedSpec, Program, RegexAst, SpecAst};
use super::db::LocationDb;
use super::lexer::{tokenize, Token, TokenKind};
use super::predicate::{parse_prefix, PrefixField, PrefixPredicate, PrefixTest};
use super::FrontendError;
use crate::automata::{SymbolTable, DROP_NAME};
use crate::snapshot::Granularity;

type PResult<T> = Result<T, FrontendError>;

/// Identifiers that end a regex or a spec concatenation.
const STOP_WORDS: &[&str] = &["else", "regex", "spec", "pspec"];

#[derive(Debug, Clone)]
enum Filter {
    Cmp { attr: String, equal: bool, value: String },
    And(Box<Filter>, Box<Filter>),
    Or(Box<Filter>, Box<Filter>),
}

impl Filter {
    fn matches(&self, record: &super::LocationRecord) -> bool {
        match self {
            Filter::Cmp { attr, equal, value } => (record.attr(attr) == Some(value.as_str())) == *equal,
            Filter::And(a, b) => a.matches(record) && b.matches(record),
            Filter::Or(a, b) => a.matches(record) || b.matches(record),
        }
    }
}

fn where_entities<'d>(filter: &Filter, db: &'d LocationDb, granularity: Granularity) -> BTreeSet<&'d str> {
    db.records()
        .iter()
        .filter(|r| filter.matches(r))
        .map(|r| r.project(granularity))
        .collect()
}

struct Parser<'a> {
    source: &'a str,
    toks: Vec<Token>,
    pos: usize,
    db: &'a LocationDb,
    granularity: Granularity,
    table: &'a SymbolTable,
    regexes: HashMap<String, RegexAst>,
    specs: HashMap<String, SpecAst>,
    defined: HashSet<String>,
    referenced: HashSet<String>,
}

fn later(a: FrontendError, b: FrontendError) -> FrontendError {
    if b.position() > a.position() {
        b
    } else {
        a
    }
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenKind> {
        self.toks.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, ahead: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + ahead).map(|t| &t.kind)
    }

    fn here(&self) -> (usize, usize) {
        match self.toks.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => {
                let line = self.source.lines().count().max(1);
                let column = self.source.lines().last().map_or(0, |l| l.chars().count()) + 1;
                (line, column)
            }
        }
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(FrontendError::syntax(line, column, message))
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        match self.peek() {
            Some(kind) => self.error(format!("expected {expected}, found {}", kind.describe())),
            None => self.error(format!("expected {expected}, found end of input")),
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> PResult<()> {
        if self.eat(kind) {
            Ok(())
        } else {
            self.unexpected(expected)
        }
    }

    fn is_ident(&self, word: &str) -> bool {
        matches!(self.peek(), Some(TokenKind::Ident(s)) if s == word)
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if self.is_ident(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, expected: &str) -> PResult<(String, Token)> {
        match self.toks.get(self.pos).cloned() {
            Some(tok @ Token { kind: TokenKind::Ident(_), .. }) => {
                self.pos += 1;
                let TokenKind::Ident(name) = &tok.kind else { unreachable!() };
                Ok((name.clone(), tok))
            }
            _ => self.unexpected(expected),
        }
    }

    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let saved = self.pos;
        let result = f(self);
        if result.is_err() {
            self.pos = saved;
        }
        result
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(TokenKind::Ident(s)) => !STOP_WORDS.contains(&s.as_str()),
            Some(TokenKind::Str(_) | TokenKind::Dot | TokenKind::LParen | TokenKind::LBrace) => true,
            _ => false,
        }
    }

    // ---- programs ----

    fn program(mut self) -> PResult<Program> {
        let mut guarded = Vec::new();
        let mut regexes = Vec::new();
        let mut specs = Vec::new();
        while self.peek().is_some() {
            if self.eat(&TokenKind::Semi) {
                continue;
            }
            let (keyword, _) = self.ident("'regex', 'spec' or 'pspec'")?;
            let (name, tok) = self.ident("a definition name")?;
            if STOP_WORDS.contains(&name.as_str()) || !self.defined.insert(name.clone()) {
                return Err(FrontendError::Duplicate {
                    line: tok.line,
                    column: tok.column,
                    name,
                });
            }
            self.expect(&TokenKind::Define, "':='")?;
            match keyword.as_str() {
                "regex" => {
                    let r = self.regex()?;
                    self.regexes.insert(name.clone(), r.clone());
                    regexes.push((name, r));
                }
                "spec" => {
                    let s = self.spec_expr()?;
                    self.specs.insert(name.clone(), s.clone());
                    specs.push(NamedSpec { name, spec: s });
                }
                "pspec" => {
                    let predicate = self.predicate()?;
                    self.expect(&TokenKind::Arrow, "'->'")?;
                    let spec = self.spec_expr()?;
                    guarded.push(GuardedSpec { name, predicate, spec });
                }
                _ => {
                    return Err(FrontendError::syntax(
                        tok.line,
                        tok.column.saturating_sub(keyword.chars().count() + 1).max(1),
                        format!("unknown definition keyword {keyword:?}"),
                    ))
                }
            }
        }
        // A spec used by a guard or by another spec is never the default.
        let default = specs.iter().rev().find(|s| !self.referenced.contains(&s.name)).cloned();
        Ok(Program {
            guarded,
            default: default.map(|d| NamedSpec {
                spec: d.spec.clone().named(d.name.clone()),
                name: d.name,
            }),
            regexes,
            specs,
            table: self.table.clone(),
        })
    }

    // ---- specs ----

    fn spec_expr(&mut self) -> PResult<SpecAst> {
        let mut left = self.spec_concat()?;
        while self.eat_ident("else") {
            let right = self.spec_concat()?;
            left = left.or_else(right);
        }
        Ok(left)
    }

    fn spec_concat(&mut self) -> PResult<SpecAst> {
        let mut left = self.spec_atom()?;
        while self.starts_atom() {
            let right = self.spec_atom()?;
            left = left.concat(right);
        }
        Ok(left)
    }

    fn spec_atom(&mut self) -> PResult<SpecAst> {
        if self.eat(&TokenKind::LBrace) {
            let mut body: Option<SpecAst> = None;
            loop {
                while self.eat(&TokenKind::Semi) {}
                if self.eat(&TokenKind::RBrace) {
                    break;
                }
                let stmt = self.spec_expr()?;
                body = Some(match body {
                    None => stmt,
                    Some(prev) => prev.concat(stmt),
                });
                if !self.eat(&TokenKind::Semi) {
                    self.expect(&TokenKind::RBrace, "';' or '}'")?;
                    break;
                }
            }
            return match body {
                Some(s) => Ok(s),
                None => self.error("empty spec block"),
            };
        }
        if !self.starts_atom() {
            return self.unexpected("a spec");
        }
        let atomic = self.attempt(|p| {
            let zone = p.regex()?;
            p.expect(&TokenKind::Colon, "':'")?;
            let modifier = p.modifier()?;
            Ok(SpecAst::atomic(zone, modifier))
        });
        let first_error = match atomic {
            Ok(s) => return Ok(s),
            Err(e) => e,
        };
        let other = self.attempt(|p| {
            if p.eat(&TokenKind::LParen) {
                let s = p.spec_expr()?;
                p.expect(&TokenKind::RParen, "')'")?;
                return Ok(s);
            }
            let (name, tok) = p.ident("a spec")?;
            match p.specs.get(&name) {
                Some(s) => {
                    p.referenced.insert(name.clone());
                    Ok(s.clone().named(name))
                }
                None => Err(FrontendError::Undefined {
                    line: tok.line,
                    column: tok.column,
                    name,
                }),
            }
        });
        other.map_err(|e| later(first_error, e))
    }

    fn modifier(&mut self) -> PResult<ModifierAst> {
        let (word, _) = self.ident("a modifier")?;
        let modifier = match word.as_str() {
            "preserve" => ModifierAst::Preserve,
            "drop" => ModifierAst::Drop,
            "add" | "remove" | "any" => {
                self.expect(&TokenKind::LParen, "'('")?;
                let r = if word == "any" { self.source_named_regex()? } else { self.regex()? };
                self.expect(&TokenKind::RParen, "')'")?;
                match word.as_str() {
                    "add" => ModifierAst::Add(r),
                    "remove" => ModifierAst::Remove(r),
                    _ => ModifierAst::Any(r),
                }
            }
            "replace" => {
                self.expect(&TokenKind::LParen, "'('")?;
                let a = self.regex()?;
                self.expect(&TokenKind::Comma, "','")?;
                let b = self.regex()?;
                self.expect(&TokenKind::RParen, "')'")?;
                ModifierAst::Replace(a, b)
            }
            _ => {
                self.pos -= 1;
                return self.unexpected("preserve, add, remove, replace, drop or any");
            }
        };
        Ok(modifier)
    }

    /// A regex wrapped in a `Named` node carrying its source text.
    fn source_named_regex(&mut self) -> PResult<RegexAst> {
        let first = self.pos;
        let r = self.regex()?;
        let text = self.source[self.toks[first].start..self.toks[self.pos - 1].end].trim().to_string();
        Ok(match r {
            RegexAst::Named(ref name, _) if *name == text => r,
            r => r.named(text),
        })
    }

    // ---- regexes ----

    fn regex(&mut self) -> PResult<RegexAst> {
        let mut left = self.regex_seq()?;
        while self.eat(&TokenKind::Bar) {
            let right = self.regex_seq()?;
            left = left.union(right);
        }
        Ok(left)
    }

    fn starts_regex_atom(&self) -> bool {
        self.starts_atom() && self.peek() != Some(&TokenKind::LBrace)
    }

    fn regex_seq(&mut self) -> PResult<RegexAst> {
        let mut left = self.regex_postfix()?;
        while self.starts_regex_atom() {
            let right = self.regex_postfix()?;
            left = left.concat(right);
        }
        Ok(left)
    }

    fn regex_postfix(&mut self) -> PResult<RegexAst> {
        let mut r = self.regex_atom()?;
        while self.eat(&TokenKind::Star) {
            r = r.star();
        }
        Ok(r)
    }

    fn regex_atom(&mut self) -> PResult<RegexAst> {
        let Some(tok) = self.toks.get(self.pos).cloned() else {
            return self.unexpected("a regex");
        };
        match &tok.kind {
            TokenKind::Dot => {
                self.pos += 1;
                Ok(RegexAst::Dot)
            }
            TokenKind::LParen => {
                self.pos += 1;
                let r = self.regex()?;
                self.expect(&TokenKind::RParen, "')'")?;
                Ok(r)
            }
            TokenKind::Str(name) => {
                self.pos += 1;
                self.entity_token(name).ok_or_else(|| FrontendError::Undefined {
                    line: tok.line,
                    column: tok.column,
                    name: name.clone(),
                })
            }
            TokenKind::Ident(name) if name == "where" && self.peek_at(1) == Some(&TokenKind::LParen) => {
                self.pos += 2;
                let start = self.pos;
                let filter = self.filter()?;
                let text = self.source[self.toks[start].start..self.toks[self.pos - 1].end].to_string();
                self.expect(&TokenKind::RParen, "')'")?;
                let entities = where_entities(&filter, self.db, self.granularity);
                if entities.is_empty() {
                    return Err(FrontendError::EmptyWhere {
                        line: tok.line,
                        column: tok.column,
                        filter: text,
                    });
                }
                let symbols = entities
                    .into_iter()
                    .map(|e| self.table.get(e).expect("entity interned"))
                    .collect();
                Ok(RegexAst::loc(symbols))
            }
            TokenKind::Ident(name) if !STOP_WORDS.contains(&name.as_str()) => {
                self.pos += 1;
                self.resolve_ident(name).ok_or_else(|| FrontendError::Undefined {
                    line: tok.line,
                    column: tok.column,
                    name: name.clone(),
                })
            }
            _ => self.unexpected("a regex"),
        }
    }

    /// The locations whose name, device or group is `token`, at the active
    /// granularity.
    fn entity_token(&self, token: &str) -> Option<RegexAst> {
        if token == DROP_NAME {
            return Some(RegexAst::loc(vec![self.table.drop_symbol()]));
        }
        let entities: BTreeSet<&str> = self
            .db
            .records()
            .iter()
            .filter(|r| r.name == token || r.device == token || r.group == token)
            .map(|r| r.project(self.granularity))
            .collect();
        if entities.is_empty() {
            return None;
        }
        let symbols: Vec<_> = entities
            .iter()
            .map(|e| self.table.get(e).expect("entity interned"))
            .collect();
        let loc = RegexAst::loc(symbols);
        if entities.len() == 1 && entities.contains(token) {
            Some(loc)
        } else {
            Some(loc.named(token))
        }
    }

    fn resolve_ident(&self, name: &str) -> Option<RegexAst> {
        if let Some(r) = self.regexes.get(name) {
            return Some(r.clone().named(name));
        }
        if let Some(r) = self.entity_token(name) {
            return Some(r);
        }
        self.segment(name)
    }

    /// Reads an identifier like `a1a2a3d1` as a concatenation of regex
    /// names, when exactly one such reading exists.
    fn segment(&self, word: &str) -> Option<RegexAst> {
        let n = word.len();
        // ways[i]: number of segmentations of word[i..], capped at 2.
        let mut ways = vec![0u8; n + 1];
        let mut choice: Vec<Option<usize>> = vec![None; n + 1];
        ways[n] = 1;
        for i in (0..n).rev() {
            if !word.is_char_boundary(i) {
                continue;
            }
            for j in (i + 1)..=n {
                if word.is_char_boundary(j) && ways[j] > 0 && self.regexes.contains_key(&word[i..j]) {
                    ways[i] = (ways[i] + ways[j]).min(2);
                    choice[i] = Some(j);
                }
            }
        }
        if ways[0] != 1 {
            return None;
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < n {
            let j = choice[i].expect("unique segmentation");
            parts.push(self.regexes[&word[i..j]].clone().named(&word[i..j]));
            i = j;
        }
        if parts.len() < 2 {
            return None;
        }
        parts.into_iter().reduce(RegexAst::concat)
    }

    fn filter(&mut self) -> PResult<Filter> {
        let mut left = self.filter_and()?;
        while self.eat(&TokenKind::OrOr) || self.eat_ident("or") {
            let right = self.filter_and()?;
            left = Filter::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn filter_and(&mut self) -> PResult<Filter> {
        let mut left = self.filter_atom()?;
        while self.eat(&TokenKind::AndAnd) || self.eat_ident("and") {
            let right = self.filter_atom()?;
            left = Filter::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn filter_atom(&mut self) -> PResult<Filter> {
        if self.eat(&TokenKind::LParen) {
            let f = self.filter()?;
            self.expect(&TokenKind::RParen, "')'")?;
            return Ok(f);
        }
        let (attr, tok) = self.ident("an attribute name")?;
        if !self.db.has_attribute(&attr) {
            return Err(FrontendError::UnknownAttribute {
                line: tok.line,
                column: tok.column,
                attribute: attr,
            });
        }
        let equal = if self.eat(&TokenKind::EqEq) {
            true
        } else if self.eat(&TokenKind::NotEq) {
            false
        } else {
            return self.unexpected("'==' or '!='");
        };
        let value = match self.peek().cloned() {
            Some(TokenKind::Str(s) | TokenKind::Ident(s) | TokenKind::Address(s)) => {
                self.pos += 1;
                s
            }
            _ => return self.unexpected("a value"),
        };
        Ok(Filter::Cmp { attr, equal, value })
    }

    // ---- prefix predicates ----

    fn predicate(&mut self) -> PResult<PrefixPredicate> {
        let mut left = self.predicate_and()?;
        while self.eat(&TokenKind::OrOr) || self.eat_ident("or") {
            let right = self.predicate_and()?;
            left = PrefixPredicate::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn predicate_and(&mut self) -> PResult<PrefixPredicate> {
        let mut left = self.predicate_unary()?;
        while self.eat(&TokenKind::AndAnd) || self.eat_ident("and") {
            let right = self.predicate_unary()?;
            left = PrefixPredicate::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn predicate_unary(&mut self) -> PResult<PrefixPredicate> {
        if self.eat(&TokenKind::Bang) || self.eat_ident("not") {
            return Ok(PrefixPredicate::Not(Box::new(self.predicate_unary()?)));
        }
        if self.eat(&TokenKind::LParen) {
            let p = self.predicate()?;
            self.expect(&TokenKind::RParen, "')'")?;
            return Ok(p);
        }
        if self.eat_ident("true") {
            return Ok(PrefixPredicate::True);
        }
        let (word, _) = self.ident("dstPrefix, srcPrefix, true, not or '('")?;
        let field = match word.as_str() {
            "dstPrefix" => PrefixField::Dst,
            "srcPrefix" => PrefixField::Src,
            _ => {
                self.pos -= 1;
                return self.unexpected("dstPrefix, srcPrefix, true, not or '('");
            }
        };
        let test = if self.eat(&TokenKind::EqEq) {
            PrefixTest::Eq(self.prefix()?)
        } else if self.eat(&TokenKind::NotEq) {
            PrefixTest::Ne(self.prefix()?)
        } else if self.eat_ident("in") {
            self.expect(&TokenKind::LBrace, "'{'")?;
            let mut set = vec![self.prefix()?];
            while self.eat(&TokenKind::Comma) {
                set.push(self.prefix()?);
            }
            self.expect(&TokenKind::RBrace, "'}'")?;
            PrefixTest::In(set)
        } else {
            return self.unexpected("'==', '!=' or 'in'");
        };
        Ok(PrefixPredicate::Atom(field, test))
    }

    fn prefix(&mut self) -> PResult<ipnet::IpNet> {
        let Some(tok) = self.toks.get(self.pos).cloned() else {
            return self.unexpected("a prefix");
        };
        let text = match &tok.kind {
            TokenKind::Address(s) | TokenKind::Str(s) => s.clone(),
            _ => return self.unexpected("a prefix"),
        };
        self.pos += 1;
        parse_prefix(&text).map_err(|message| FrontendError::Prefix {
            line: tok.line,
            column: tok.column,
            message,
        })
    }
}

/// Parses a program, inlining definitions and resolving location names and
/// `where()` queries against `db` at `granularity`.
pub fn parse_program(source: &str, db: &LocationDb, granularity: Granularity) -> Result<Program, FrontendError> {
    let table = db.symbol_table(granularity);
    let parser = Parser {
        source,
        toks: tokenize(source)?,
        pos: 0,
        db,
        granularity,
        table: &table,
        regexes: HashMap::new(),
        specs: HashMap::new(),
        defined: HashSet::new(),
        referenced: HashSet::new(),
    };
    parser.program()
}

/// The entities at `granularity` of every location satisfying `filter`,
/// written as in the body of `where(...)`.
pub fn resolve_where(filter: &str, db: &LocationDb, granularity: Granularity) -> Result<BTreeSet<String>, FrontendError> {
    let table = db.symbol_table(granularity);
    let mut parser = Parser {
        source: filter,
        toks: tokenize(filter)?,
        pos: 0,
        db,
        granularity,
        table: &table,
        regexes: HashMap::new(),
        specs: HashMap::new(),
        defined: HashSet::new(),
        referenced: HashSet::new(),
    };
    let f = parser.filter()?;
    if parser.peek().is_some() {
        return parser.unexpected("end of filter");
    }
    let entities = where_entities(&f, db, granularity);
    if entities.is_empty() {
        return Err(FrontendError::EmptyWhere {
            line: 1,
            column: 1,
            filter: filter.to_string(),
        });
    }
    Ok(entities.into_iter().map(str::to_string).collect())
}
