//! Reducing equivalence to satisfiability and deciding it, either with an
//! external TPTP prover or with the built-in bounded model finder.

mod backend;
mod bounded;
mod cache;
mod decide;
mod external;
mod query;
pub mod tptp;

pub use backend::{Cascade, Certainty, CheckOptions, CountingBackend, SatBackend, SatResult, UnknownReason};
pub use bounded::{BoundedBackend, BoundedConfig};
pub use cache::{cache_key, CachedVerdict, DecisionCache};
pub use decide::{backend_countermodel, decide_equivalence, validate_counter, Decider, Verdict};
pub use external::{ExternalProver, ProverConfig, DEFAULT_MODES, STRATEGY_TIMEOUT, TOP_LEVEL_TIMEOUT};
pub use query::{check_sentence, encode_equivalence, QueryError, QueryOrigin, SatQuery};
