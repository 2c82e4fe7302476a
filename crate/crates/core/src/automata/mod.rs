//! Exact finite-state automata and transducers over interned symbols.
//!
//! Values are immutable once built and every operation is a pure function of
//! its inputs, so automata can be shared freely across worker threads.

mod determinize;
mod enumerate;
mod expr;
mod fsa;
mod fst;
mod symbol;

pub use enumerate::{enumerate_shortest, words_up_to, PathList};
pub use expr::{build_fsa, build_fst, AlphabetError, RegularExpr, RelationExpr};
pub use fsa::{fsa_difference, fsa_equivalent, Fsa, StateId};
pub use fst::{apply_image, Fst, FstArc};
pub use symbol::{Alphabet, Label, Symbol, SymbolKind, SymbolTable, DROP_NAME, EPSILON};
