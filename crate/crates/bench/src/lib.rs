//! Inputs shared by the benchmarks.

use foeq::harness::{corpus, Mutation, PairRecord, Scenario};
use foeq::prover::{BoundedBackend, BoundedConfig};

pub fn scenarios() -> Vec<Scenario> {
    corpus().expect("bundled corpus loads")
}

/// Every solution paired with its first mutant under each mutation.
pub fn mutated_pairs(scenarios: &[Scenario]) -> Vec<PairRecord> {
    let mut out = Vec::new();
    for s in scenarios {
        for sol in &s.solutions {
            for m in Mutation::ALL {
                if let Some(phi) = m.apply(&sol.formula).into_iter().next() {
                    out.push(s.pair(format!("{}/{m}", sol.id), &sol.formula, phi));
                }
            }
        }
    }
    out
}

pub fn backend(max_size: usize) -> BoundedBackend {
    BoundedBackend::new(BoundedConfig {
        max_size,
        ..BoundedConfig::default()
    })
}
