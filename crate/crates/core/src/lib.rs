//! Equivalence of first-order formulas modulo a background theory, finite
//! counter models, and explanations (blockers and bugfixing modifications)
//! for non-equivalence.

pub mod countermodel;
pub mod definability;
pub mod explain;
pub mod harness;
pub mod profile;
pub mod prover;
pub mod semantics;
pub mod syntax;

pub use countermodel::{CounterExample, Direction, RandomModelConfig};
pub use prover::{decide_equivalence, Certainty, Decider, DecisionCache, SatBackend, Verdict};
pub use semantics::{eval, Structure};
pub use syntax::{parse, Address, Formula, Quantifier, Term, Theory, Vocabulary};
