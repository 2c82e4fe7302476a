//! The regular intermediate representation: path sets, relations over
//! paths, and specifications relating the two snapshots.

mod eval;
mod notation;
pub mod oracle;

pub use eval::{check_spec, eval_pathset, eval_rel, EvalCache, Evaluator, LeafWitness, Verdict};
pub use notation::{parse_pathset, parse_rel, parse_spec, NotationError, Notation};

use crate::automata::{Fsa, Symbol};

/// A regular set of paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PathSet {
    Sym(Symbol),
    /// Any single symbol from a sorted, non-empty set. Equivalent to a union
    /// of `Sym`s, kept flat because location classes can be large.
    Class(Vec<Symbol>),
    Zero,
    One,
    PreState,
    PostState,
    Union(Box<PathSet>, Box<PathSet>),
    Concat(Box<PathSet>, Box<PathSet>),
    Star(Box<PathSet>),
    Intersect(Box<PathSet>, Box<PathSet>),
    Complement(Box<PathSet>),
    Image(Box<PathSet>, Box<Rel>),
}

/// A regular relation between paths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rel {
    Cross(Box<PathSet>, Box<PathSet>),
    Identity(Box<PathSet>),
    Zero,
    One,
    Union(Box<Rel>, Box<Rel>),
    Concat(Box<Rel>, Box<Rel>),
    Star(Box<Rel>),
    Compose(Box<Rel>, Box<Rel>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Spec {
    Equal(PathSet, PathSet),
    Subset(PathSet, PathSet),
    And(Box<Spec>, Box<Spec>),
    Or(Box<Spec>, Box<Spec>),
    Not(Box<Spec>),
}

impl PathSet {
    pub fn class(mut symbols: Vec<Symbol>) -> PathSet {
        symbols.sort_unstable();
        symbols.dedup();
        match symbols.as_slice() {
            [] => PathSet::Zero,
            [one] => PathSet::Sym(*one),
            _ => PathSet::Class(symbols),
        }
    }

    pub fn union(self, other: PathSet) -> PathSet {
        PathSet::Union(Box::new(self), Box::new(other))
    }

    pub fn concat(self, other: PathSet) -> PathSet {
        PathSet::Concat(Box::new(self), Box::new(other))
    }

    pub fn star(self) -> PathSet {
        PathSet::Star(Box::new(self))
    }

    pub fn intersect(self, other: PathSet) -> PathSet {
        PathSet::Intersect(Box::new(self), Box::new(other))
    }

    pub fn complement(self) -> PathSet {
        PathSet::Complement(Box::new(self))
    }

    /// `self \ other`, lowered as `self ∩ ~other`.
    pub fn minus(self, other: PathSet) -> PathSet {
        self.intersect(other.complement())
    }

    pub fn image(self, rel: Rel) -> PathSet {
        PathSet::Image(Box::new(self), Box::new(rel))
    }

    /// Whether the value depends on the snapshot pair.
    pub fn mentions_state(&self) -> bool {
        match self {
            PathSet::PreState | PathSet::PostState => true,
            PathSet::Sym(_) | PathSet::Class(_) | PathSet::Zero | PathSet::One => false,
            PathSet::Union(a, b) | PathSet::Concat(a, b) | PathSet::Intersect(a, b) => {
                a.mentions_state() || b.mentions_state()
            }
            PathSet::Star(a) | PathSet::Complement(a) => a.mentions_state(),
            PathSet::Image(p, r) => p.mentions_state() || r.mentions_state(),
        }
    }

    /// Calls `f` on every symbol occurring in the tree, relations included.
    pub fn visit_symbols(&self, f: &mut impl FnMut(Symbol)) {
        match self {
            PathSet::Sym(s) => f(*s),
            PathSet::Class(ss) => ss.iter().copied().for_each(f),
            PathSet::Zero | PathSet::One | PathSet::PreState | PathSet::PostState => {}
            PathSet::Union(a, b) | PathSet::Concat(a, b) | PathSet::Intersect(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            PathSet::Star(a) | PathSet::Complement(a) => a.visit_symbols(f),
            PathSet::Image(p, r) => {
                p.visit_symbols(f);
                r.visit_symbols(f);
            }
        }
    }
}

impl Rel {
    pub fn cross(p1: PathSet, p2: PathSet) -> Rel {
        Rel::Cross(Box::new(p1), Box::new(p2))
    }

    pub fn identity(p: PathSet) -> Rel {
        Rel::Identity(Box::new(p))
    }

    pub fn union(self, other: Rel) -> Rel {
        Rel::Union(Box::new(self), Box::new(other))
    }

    pub fn concat(self, other: Rel) -> Rel {
        Rel::Concat(Box::new(self), Box::new(other))
    }

    pub fn star(self) -> Rel {
        Rel::Star(Box::new(self))
    }

    pub fn compose(self, other: Rel) -> Rel {
        Rel::Compose(Box::new(self), Box::new(other))
    }

    pub fn mentions_state(&self) -> bool {
        match self {
            Rel::Cross(a, b) => a.mentions_state() || b.mentions_state(),
            Rel::Identity(p) => p.mentions_state(),
            Rel::Zero | Rel::One => false,
            Rel::Union(a, b) | Rel::Concat(a, b) | Rel::Compose(a, b) => {
                a.mentions_state() || b.mentions_state()
            }
            Rel::Star(a) => a.mentions_state(),
        }
    }

    pub fn visit_symbols(&self, f: &mut impl FnMut(Symbol)) {
        match self {
            Rel::Cross(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            Rel::Identity(p) => p.visit_symbols(f),
            Rel::Zero | Rel::One => {}
            Rel::Union(a, b) | Rel::Concat(a, b) | Rel::Compose(a, b) => {
                a.visit_symbols(f);
                b.visit_symbols(f);
            }
            Rel::Star(a) => a.visit_symbols(f),
        }
    }
}

impl Spec {
    pub fn and(self, other: Spec) -> Spec {
        Spec::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Spec) -> Spec {
        Spec::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Spec {
        Spec::Not(Box::new(self))
    }
}

/// The two path sets a specification is checked against: `pre` is bound to
/// `PreState` and `post` to `PostState`.
#[derive(Debug, Clone)]
pub struct SnapshotPair {
    pub pre: Fsa,
    pub post: Fsa,
}
