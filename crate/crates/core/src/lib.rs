//! Inductive invariant inference for propositional transition systems via
//! the monotone theory.
//!
//! The crate provides:
//!
//! - least `b`-monotone overapproximations computed against implicit sets
//!   through SAT intersection queries, with output-sensitive query bounds
//!   ([`monotone`]);
//! - interpolation-style inference of invariants with short CNF **and** DNF
//!   representations, driven by counterexamples to induction ([`infer`]);
//! - abstract interpretation in the monotone-span domain, with an iteration
//!   bound `Λ` derived from monotonizations of the transition relation
//!   ([`absint`]);
//! - exact learning of CDNF formulas from equivalence and membership
//!   oracles ([`learn`]);
//! - brute-force reference semantics for all of the above at desk scale
//!   ([`oracle`]), used throughout the test suite;
//! - a deterministic CDCL solver with per-kind query accounting ([`sat`]),
//!   so every complexity bound is a runtime-checkable property;
//! - benchmark system generators and the bound-assertion harness
//!   ([`gen`], [`bench`]) backing the `monotone-infer` CLI.

pub mod absint;
pub mod bench;
pub mod cli;
pub mod dtree;
pub mod formula;
pub mod gen;
pub mod infer;
pub mod learn;
pub mod monotone;
pub mod oracle;
pub mod parse;
pub mod report;
pub mod sat;
pub mod system;
pub mod types;

pub use formula::Formula;
pub use system::TransitionSystem;
pub use types::{Clause, ClauseList, Cube, Literal, State, TermList, Var, Vocab};
