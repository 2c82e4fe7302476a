//! Relational verification of network forwarding changes: a specification
//! language compiled to regular relations, checked per flow equivalence
//! class against pre- and post-change forwarding graphs.

pub mod automata;
pub mod checker;
pub mod compiler;
pub mod frontend;
pub mod rir;
pub mod snapshot;
pub mod synth;

pub use automata::{Alphabet, Fsa, Fst, PathList, Symbol, SymbolKind, SymbolTable};
pub use checker::{check_all, CheckOptions, CompiledProgram, Counterexample, FecStatus, Report, RunVerdict};
pub use compiler::{compile, zone_of, CompiledSpec};
pub use frontend::{parse_program, FrontendError, LocationDb, LocationRecord, Program};
pub use rir::{PathSet, Rel, SnapshotPair, Spec};
pub use snapshot::{load_fecs, Fec, FecError, ForwardingGraph, Granularity, Traffic};
