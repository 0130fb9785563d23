//! Incremental, abstract-interpretation-based assertion checker for a mini
//! Horn-clause language.
//!
//! The pipeline: source files are parsed ([`syntax`]) and normalized into a
//! constrained-Horn-clause IR ([`chc`]); a goal-dependent fixpoint engine
//! ([`engine`]) builds a multivariant analysis graph over an abstract
//! domain ([`domains`]); `pred` assertions are checked against the fixpoint
//! ([`checker`]); clause-level edits update the graph in place instead of
//! reanalyzing from scratch ([`incremental`]); and a background daemon
//! serves the results as editor diagnostics ([`server`]). [`harness`]
//! generates synthetic corpora and benchmarks the incremental speedup.

pub mod chc;
pub mod checker;
pub mod diag;
pub mod domains;
pub mod engine;
pub mod harness;
pub mod incremental;
pub mod server;
pub mod snapshot;
pub mod syntax;
