//! Finite structures, evaluation, and exhaustive enumeration.

mod enumerate;
mod eval;
mod oracle;
mod structure;

pub use enumerate::{enumerate_structures, structure_count, EnumError, StructureIter};
pub use eval::{eval, eval_sentence, Assignment, CompiledFormula, CompiledTheory, EvalError};
pub use oracle::{brute_force_model, brute_force_verdict, BoundedVerdict, OracleError, DEFAULT_ENUMERATION_BUDGET};
pub use structure::{Structure, StructureError, StructureJson};
