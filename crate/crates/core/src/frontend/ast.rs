use crate::automata::{Symbol, SymbolTable};

use super::predicate::PrefixPredicate;

/// A regular set of paths over locations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RegexAst {
    /// Any one of a sorted, non-empty set of symbols.
    Loc(Vec<Symbol>),
    /// Any single location; never `drop`.
    Dot,
    Union(Box<RegexAst>, Box<RegexAst>),
    Concat(Box<RegexAst>, Box<RegexAst>),
    Star(Box<RegexAst>),
    /// A transparent wrapper recording how the user wrote the subterm: a
    /// definition name, or the source text of an `any` argument.
    Named(String, Box<RegexAst>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModifierAst {
    Preserve,
    Add(RegexAst),
    Remove(RegexAst),
    Replace(RegexAst, RegexAst),
    Drop,
    Any(RegexAst),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpecAst {
    Atomic(RegexAst, ModifierAst),
    Concat(Box<SpecAst>, Box<SpecAst>),
    Else(Box<SpecAst>, Box<SpecAst>),
    /// A transparent wrapper naming an inlined definition.
    Named(String, Box<SpecAst>),
}

impl RegexAst {
    pub fn loc(mut symbols: Vec<Symbol>) -> RegexAst {
        symbols.sort_unstable();
        symbols.dedup();
        assert!(!symbols.is_empty(), "location sets are non-empty");
        RegexAst::Loc(symbols)
    }

    pub fn union(self, other: RegexAst) -> RegexAst {
        RegexAst::Union(Box::new(self), Box::new(other))
    }

    pub fn concat(self, other: RegexAst) -> RegexAst {
        RegexAst::Concat(Box::new(self), Box::new(other))
    }

    pub fn star(self) -> RegexAst {
        RegexAst::Star(Box::new(self))
    }

    pub fn named(self, name: impl Into<String>) -> RegexAst {
        RegexAst::Named(name.into(), Box::new(self))
    }

    /// The same tree with every `Named` wrapper removed.
    pub fn strip_names(&self) -> RegexAst {
        match self {
            RegexAst::Loc(_) | RegexAst::Dot => self.clone(),
            RegexAst::Union(a, b) => a.strip_names().union(b.strip_names()),
            RegexAst::Concat(a, b) => a.strip_names().concat(b.strip_names()),
            RegexAst::Star(a) => a.strip_names().star(),
            RegexAst::Named(_, a) => a.strip_names(),
        }
    }

    /// A compact human-readable rendering that keeps names.
    pub fn display(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        self.display_into(table, &mut out, 0);
        out
    }

    // Precedence levels: 0 union, 1 concat, 2 star operand.
    fn display_into(&self, table: &SymbolTable, out: &mut String, level: u8) {
        match self {
            RegexAst::Named(name, _) => out.push_str(name),
            RegexAst::Dot => out.push('.'),
            RegexAst::Loc(ss) if ss.len() == 1 => out.push_str(table.name(ss[0])),
            RegexAst::Loc(ss) => {
                out.push('(');
                for (i, s) in ss.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    out.push_str(table.name(*s));
                }
                out.push(')');
            }
            RegexAst::Union(a, b) => {
                if level > 0 {
                    out.push('(');
                }
                a.display_into(table, out, 0);
                out.push('|');
                b.display_into(table, out, 0);
                if level > 0 {
                    out.push(')');
                }
            }
            RegexAst::Concat(a, b) => {
                if level > 1 {
                    out.push('(');
                }
                a.display_into(table, out, 1);
                out.push(' ');
                b.display_into(table, out, 1);
                if level > 1 {
                    out.push(')');
                }
            }
            RegexAst::Star(a) => {
                a.display_into(table, out, 2);
                out.push('*');
            }
        }
    }
}

impl ModifierAst {
    pub fn strip_names(&self) -> ModifierAst {
        match self {
            ModifierAst::Preserve => ModifierAst::Preserve,
            ModifierAst::Drop => ModifierAst::Drop,
            ModifierAst::Add(r) => ModifierAst::Add(r.strip_names()),
            ModifierAst::Remove(r) => ModifierAst::Remove(r.strip_names()),
            ModifierAst::Replace(a, b) => ModifierAst::Replace(a.strip_names(), b.strip_names()),
            ModifierAst::Any(r) => ModifierAst::Any(r.strip_names()),
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            ModifierAst::Preserve => "preserve",
            ModifierAst::Add(_) => "add",
            ModifierAst::Remove(_) => "remove",
            ModifierAst::Replace(..) => "replace",
            ModifierAst::Drop => "drop",
            ModifierAst::Any(_) => "any",
        }
    }
}

impl SpecAst {
    pub fn atomic(zone: RegexAst, modifier: ModifierAst) -> SpecAst {
        SpecAst::Atomic(zone, modifier)
    }

    pub fn concat(self, other: SpecAst) -> SpecAst {
        SpecAst::Concat(Box::new(self), Box::new(other))
    }

    pub fn or_else(self, other: SpecAst) -> SpecAst {
        SpecAst::Else(Box::new(self), Box::new(other))
    }

    pub fn named(self, name: impl Into<String>) -> SpecAst {
        SpecAst::Named(name.into(), Box::new(self))
    }

    pub fn strip_names(&self) -> SpecAst {
        match self {
            SpecAst::Atomic(z, m) => SpecAst::Atomic(z.strip_names(), m.strip_names()),
            SpecAst::Concat(a, b) => a.strip_names().concat(b.strip_names()),
            SpecAst::Else(a, b) => a.strip_names().or_else(b.strip_names()),
            SpecAst::Named(_, a) => a.strip_names(),
        }
    }

    /// The arms of the top-level `else` chain in priority order, each with
    /// the name it was defined under, if any.
    pub fn else_arms(&self) -> Vec<(Option<&str>, &SpecAst)> {
        fn walk<'a>(s: &'a SpecAst, name: Option<&'a str>, out: &mut Vec<(Option<&'a str>, &'a SpecAst)>) {
            match s {
                SpecAst::Else(a, b) => {
                    walk(a, None, out);
                    walk(b, None, out);
                }
                SpecAst::Named(n, inner) => {
                    if matches!(peel(inner), SpecAst::Else(..)) {
                        walk(inner, None, out);
                    } else {
                        walk(inner, Some(name.unwrap_or(n)), out);
                    }
                }
                _ => out.push((name, s)),
            }
        }
        fn peel(s: &SpecAst) -> &SpecAst {
            match s {
                SpecAst::Named(_, inner) => peel(inner),
                _ => s,
            }
        }
        let mut out = Vec::new();
        walk(self, None, &mut out);
        out
    }

    /// Number of atomic specs in the tree.
    pub fn size(&self) -> usize {
        match self {
            SpecAst::Atomic(..) => 1,
            SpecAst::Concat(a, b) | SpecAst::Else(a, b) => a.size() + b.size(),
            SpecAst::Named(_, a) => a.size(),
        }
    }
}

/// A spec applied to FECs whose traffic satisfies `predicate`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedSpec {
    pub name: String,
    pub predicate: PrefixPredicate,
    pub spec: SpecAst,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedSpec {
    pub name: String,
    pub spec: SpecAst,
}

/// A parsed program: guarded specs tried in file order, then the default.
#[derive(Debug, Clone)]
pub struct Program {
    pub guarded: Vec<GuardedSpec>,
    pub default: Option<NamedSpec>,
    /// Every `regex` definition, inlined, in definition order.
    pub regexes: Vec<(String, RegexAst)>,
    /// Every `spec` definition, inlined, in definition order.
    pub specs: Vec<NamedSpec>,
    pub table: SymbolTable,
}
