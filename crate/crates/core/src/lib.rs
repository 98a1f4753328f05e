//! Symbolic safety checking for finite state machines described in a small
//! model language.
//!
//! Two SAT-based engines are provided: bounded model checking with a
//! k-induction loop ([`kind`]) and interpolation-based fixpoint computation
//! ([`itp`]). [`oracle`] is an explicit-state reference checker.

pub mod formula;
pub mod fsmlang;
pub mod itp;
pub mod kind;
pub mod oracle;
pub mod outcome;
pub mod report;
pub mod sat;
pub mod trace;
pub mod unroll;

pub use formula::{Assignment, Formula, VarId};
pub use fsmlang::{compile, parse, parse_property, CompileOptions, SymbolicFsm};
pub use outcome::{CheckOutcome, EngineError, Verdict};
