use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;

use super::backend::{Certainty, CheckOptions, SatBackend, SatResult, UnknownReason};
use super::cache::{cache_key, CachedVerdict, DecisionCache};
use super::external::TOP_LEVEL_TIMEOUT;
use super::query::encode_equivalence;
use crate::countermodel::{search_countermodel, Direction, RandomModelConfig};
use crate::semantics::{CompiledFormula, CompiledTheory, Structure};
use crate::syntax::{close_free_variables, Formula, Theory, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Verdict {
    Equivalent {
        certainty: Certainty,
    },
    NonEquivalent {
        #[serde(skip_serializing_if = "Option::is_none")]
        counter: Option<Structure>,
        #[serde(skip_serializing_if = "Option::is_none")]
        direction: Option<Direction>,
    },
    Unknown {
        reason: UnknownReason,
    },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn is_non_equivalent(&self) -> bool {
        matches!(self, Verdict::NonEquivalent { .. })
    }

    pub fn counter(&self) -> Option<&Structure> {
        match self {
            Verdict::NonEquivalent { counter, .. } => counter.as_ref(),
            _ => None,
        }
    }
}

/// Everything `decide_equivalence` needs besides the formulas.
#[derive(Clone, Copy)]
pub struct Decider<'a> {
    pub backend: &'a dyn SatBackend,
    pub cache: Option<&'a DecisionCache>,
    pub timeout: Duration,
    /// Ask the backend for a counter model.
    pub extract_model: bool,
    /// Run the random search when the backend gives no model.
    pub random: Option<&'a RandomModelConfig>,
}

impl<'a> Decider<'a> {
    pub fn new(backend: &'a dyn SatBackend) -> Self {
        Decider {
            backend,
            cache: None,
            timeout: TOP_LEVEL_TIMEOUT,
            extract_model: true,
            random: None,
        }
    }

    pub fn with_cache(mut self, cache: &'a DecisionCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_random(mut self, cfg: &'a RandomModelConfig) -> Self {
        self.random = Some(cfg);
        self
    }

    pub fn without_models(mut self) -> Self {
        self.extract_model = false;
        self.random = None;
        self
    }
}

/// Checks that `s` is a Γ-model on which ψ and φ differ and returns the
/// direction. `vocab` is the pair's vocabulary before free variables were
/// closed; `s` must interpret the closure constants.
pub fn validate_counter(
    s: &Structure,
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
) -> Option<Direction> {
    let (closed, _) = close_free_variables(&[psi, phi], vocab);
    let sv = s.vocab();
    let theory = CompiledTheory::compile(gamma.iter(), sv).ok()?;
    let a = CompiledFormula::compile(&closed[0], sv).ok()?;
    let b = CompiledFormula::compile(&closed[1], sv).ok()?;
    if !theory.holds(s) {
        return None;
    }
    Direction::of(a.holds(s), b.holds(s))
}

/// Asks the backend for a model of Γ ∪ {¬(ψ ↔ φ)} directly, bypassing any
/// cache, and returns it if it separates the pair.
pub fn backend_countermodel(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    backend: &dyn SatBackend,
    timeout: Duration,
) -> Option<(Structure, Direction)> {
    let (closed, closure) = close_free_variables(&[psi, phi], vocab);
    let query = encode_equivalence(&closed[0], &closed[1], gamma, Arc::new(closure.vocab)).ok()?;
    match backend.check_sat(&query, &CheckOptions::new(timeout).with_model(true)) {
        SatResult::Satisfiable(Some(s)) => {
            let dir = validate_counter(&s, psi, phi, gamma, vocab)?;
            Some((s, dir))
        }
        _ => None,
    }
}

/// Decides ψ ≡ φ modulo Γ.
pub fn decide_equivalence(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    d: &Decider<'_>,
) -> Verdict {
    let key = d.cache.map(|_| cache_key(psi, phi, gamma));
    if let (Some(cache), Some(key)) = (d.cache, &key) {
        match cache.get(key) {
            Some(CachedVerdict::Equivalent { certainty }) => return Verdict::Equivalent { certainty },
            Some(CachedVerdict::NonEquivalent) if !d.extract_model && d.random.is_none() => {
                return Verdict::NonEquivalent {
                    counter: None,
                    direction: None,
                }
            }
            Some(CachedVerdict::NonEquivalent) => {
                if let Some(cfg) = d.random {
                    if let Ok(Some(cx)) = search_countermodel(psi, phi, gamma, vocab, cfg, None) {
                        return Verdict::NonEquivalent {
                            counter: Some(cx.structure),
                            direction: Some(cx.direction),
                        };
                    }
                }
                return Verdict::NonEquivalent {
                    counter: None,
                    direction: None,
                };
            }
            None => {}
        }
    }

    let (closed, closure) = close_free_variables(&[psi, phi], vocab);
    let closed_vocab = Arc::new(closure.vocab);
    let query = match encode_equivalence(&closed[0], &closed[1], gamma, closed_vocab) {
        Ok(q) => q,
        Err(e) => {
            return Verdict::Unknown {
                reason: UnknownReason::ProverError(e.to_string()),
            }
        }
    };
    let opts = CheckOptions::new(d.timeout).with_model(d.extract_model);
    let verdict = match d.backend.check_sat(&query, &opts) {
        SatResult::Unsatisfiable(certainty) => Verdict::Equivalent { certainty },
        SatResult::Unknown(reason) => Verdict::Unknown { reason },
        SatResult::Satisfiable(model) => {
            let checked = model.and_then(|s| match validate_counter(&s, psi, phi, gamma, vocab) {
                Some(dir) => Some((s, dir)),
                None => {
                    log::warn!("backend model does not separate the pair; dropping it");
                    None
                }
            });
            let found = checked.or_else(|| {
                let cfg = d.random?;
                let cx = search_countermodel(psi, phi, gamma, vocab, cfg, None).ok()??;
                Some((cx.structure, cx.direction))
            });
            match found {
                Some((s, dir)) => Verdict::NonEquivalent {
                    counter: Some(s),
                    direction: Some(dir),
                },
                None => Verdict::NonEquivalent {
                    counter: None,
                    direction: None,
                },
            }
        }
    };
    if let (Some(cache), Some(key)) = (d.cache, key) {
        match &verdict {
            Verdict::Equivalent { certainty } => cache.insert(key, CachedVerdict::Equivalent { certainty: *certainty }),
            Verdict::NonEquivalent { .. } => cache.insert(key, CachedVerdict::NonEquivalent),
            Verdict::Unknown { .. } => {}
        }
    }
    verdict
}
