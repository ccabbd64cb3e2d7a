//! Datasets, the bundled corpus, mutation of solutions, and batch runs.

pub mod corpus;
pub mod dataset;
pub mod mutate;
pub mod report;
pub mod run;

pub use corpus::{corpus, self_pairs, Scenario, Solution};
pub use dataset::{load_dataset, parse_dataset, write_dataset, Dataset, LineError, PairRecord};
pub use mutate::Mutation;
pub use report::{Count, Counts, Report};
pub use run::{feedback_json, run_batch, run_pair, BatchResult, Engine, FeedbackOptions, PairOutcome, RunConfig, VerdictClass};

#[cfg(test)]
mod tests;
