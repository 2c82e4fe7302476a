//! Constructor trees for regular languages and relations, and their
//! translation to automata.

use thiserror::Error;

use super::fsa::Fsa;
use super::fst::Fst;
use super::symbol::{Alphabet, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("symbol {0} is not in the universe alphabet")]
    UnknownSymbol(Symbol),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RegularExpr {
    Symbol(Symbol),
    Empty,
    Unit,
    Union(Box<RegularExpr>, Box<RegularExpr>),
    Concat(Box<RegularExpr>, Box<RegularExpr>),
    Star(Box<RegularExpr>),
    Intersect(Box<RegularExpr>, Box<RegularExpr>),
    Complement(Box<RegularExpr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RelationExpr {
    Cross(RegularExpr, RegularExpr),
    Identity(RegularExpr),
    Empty,
    Unit,
    Union(Box<RelationExpr>, Box<RelationExpr>),
    Concat(Box<RelationExpr>, Box<RelationExpr>),
    Star(Box<RelationExpr>),
    Compose(Box<RelationExpr>, Box<RelationExpr>),
}

/// Builds an automaton for `expr`. Complement is relative to `universe*`.
pub fn build_fsa(expr: &RegularExpr, universe: &Alphabet) -> Result<Fsa, AlphabetError> {
    use RegularExpr as E;
    Ok(match expr {
        E::Symbol(s) => {
            if !universe.contains(*s) {
                return Err(AlphabetError::UnknownSymbol(*s));
            }
            Fsa::symbol(*s)
        }
        E::Empty => Fsa::empty(),
        E::Unit => Fsa::epsilon(),
        E::Union(a, b) => build_fsa(a, universe)?.union(&build_fsa(b, universe)?),
        E::Concat(a, b) => build_fsa(a, universe)?.concat(&build_fsa(b, universe)?),
        E::Star(a) => build_fsa(a, universe)?.star(),
        E::Intersect(a, b) => build_fsa(a, universe)?.intersect(&build_fsa(b, universe)?),
        E::Complement(a) => build_fsa(a, universe)?.complement(universe),
    })
}

/// Builds a transducer for `expr`. Path-set arguments are checked against
/// `universe` the same way [`build_fsa`] does.
pub fn build_fst(expr: &RelationExpr, universe: &Alphabet) -> Result<Fst, AlphabetError> {
    use RelationExpr as R;
    Ok(match expr {
        R::Cross(p1, p2) => Fst::cross(&build_fsa(p1, universe)?, &build_fsa(p2, universe)?),
        R::Identity(p) => Fst::identity(&build_fsa(p, universe)?),
        R::Empty => Fst::empty(),
        R::Unit => Fst::epsilon(),
        R::Union(a, b) => build_fst(a, universe)?.union(&build_fst(b, universe)?),
        R::Concat(a, b) => build_fst(a, universe)?.concat(&build_fst(b, universe)?),
        R::Star(a) => build_fst(a, universe)?.star(),
        R::Compose(a, b) => build_fst(a, universe)?.compose(&build_fst(b, universe)?),
    })
}
