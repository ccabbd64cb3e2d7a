//! The per-pair pipeline (decide, find counter models, explain) and batch
//! evaluation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::dataset::PairRecord;
use super::report::Report;
use crate::countermodel::{pregenerate_gamma_models, search_countermodel, Direction, GammaPool, RandomModelConfig};
use crate::definability::NecessityCache;
use crate::explain::{explain_with_verdict, ExplainConfig, ExplanationBundle, StrategyId};
use crate::profile::formula_profile;
use crate::prover::{backend_countermodel, cache_key, decide_equivalence, Decider, DecisionCache, SatBackend, Verdict};
use crate::semantics::Structure;
use crate::syntax::{Theory, Vocabulary};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub explain: ExplainConfig,
    pub random: RandomModelConfig,
    /// Run the random search even when the backend produced a model.
    pub both_methods: bool,
    /// Worker threads for batches; `None` uses all cores, `Some(1)` runs
    /// records one after another.
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            explain: ExplainConfig {
                random: None,
                ..ExplainConfig::default()
            },
            random: RandomModelConfig::default(),
            both_methods: false,
            threads: None,
        }
    }
}

/// Shared state of a run: the backend, the decision cache, the necessity
/// cache, and Γ-model pools per theory.
pub struct Engine<'a> {
    pub backend: &'a dyn SatBackend,
    pub cache: &'a DecisionCache,
    pub necessity_cache: Option<&'a NecessityCache>,
    pools: Mutex<HashMap<String, Arc<GammaPool>>>,
}

impl<'a> Engine<'a> {
    pub fn new(backend: &'a dyn SatBackend, cache: &'a DecisionCache) -> Self {
        Engine {
            backend,
            cache,
            necessity_cache: None,
            pools: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_necessity_cache(mut self, c: &'a NecessityCache) -> Self {
        self.necessity_cache = Some(c);
        self
    }

    fn pool(&self, gamma: &Theory, vocab: &Vocabulary, cfg: &RandomModelConfig) -> Option<Arc<GammaPool>> {
        if gamma.is_empty() {
            return None;
        }
        let key = format!(
            "{}|{}|{}",
            serde_json::to_string(vocab).unwrap_or_default(),
            gamma.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";"),
            serde_json::to_string(cfg).unwrap_or_default()
        );
        if let Some(p) = self.pools.lock().expect("pool lock").get(&key) {
            return Some(p.clone());
        }
        let pool = Arc::new(pregenerate_gamma_models(gamma, &Arc::new(vocab.clone()), cfg).ok()?);
        self.pools.lock().expect("pool lock").entry(key).or_insert(pool).clone().into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictClass {
    Equivalent,
    NonEquivalent,
    Unknown,
}

impl VerdictClass {
    pub fn of(v: &Verdict) -> VerdictClass {
        match v {
            Verdict::Equivalent { .. } => VerdictClass::Equivalent,
            Verdict::NonEquivalent { .. } => VerdictClass::NonEquivalent,
            Verdict::Unknown { .. } => VerdictClass::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Timing {
    pub decide_ms: f64,
    pub countermodel_ms: f64,
    pub explain_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub id: String,
    pub key: String,
    pub verdict: VerdictClass,
    /// The backend produced a separating model.
    pub prover_model: bool,
    /// The random search found one.
    pub random_model: bool,
    /// Strategies with a verified explanation.
    pub strategies: Vec<StrategyId>,
    pub timing: Timing,
    pub bundle: ExplanationBundle,
}

impl PairOutcome {
    pub fn explained(&self) -> bool {
        !self.strategies.is_empty()
    }
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1000.0
}

/// Decides, searches counter models and explains one pair.
pub fn run_pair(record: &PairRecord, cfg: &RunConfig, engine: &Engine<'_>) -> PairOutcome {
    let (psi, phi, gamma, vocab) = (&record.psi, &record.phi, &record.gamma, &record.vocabulary);
    let start = Instant::now();
    let key = cache_key(psi, phi, gamma);
    let was_cached = engine.cache.get(&key).is_some();
    let d = Decider::new(engine.backend)
        .with_cache(engine.cache)
        .with_timeout(cfg.explain.decide_timeout);
    let mut verdict = decide_equivalence(psi, phi, gamma, vocab, &d);
    let decide_ms = ms(start);

    let t = Instant::now();
    let (mut prover_model, mut random_model) = (false, false);
    if let Verdict::NonEquivalent { counter, direction } = &verdict {
        let mut prover: Option<(Structure, Direction)> = match (counter, direction) {
            (Some(s), Some(dir)) => Some((s.clone(), *dir)),
            _ => None,
        };
        if prover.is_none() && was_cached {
            prover = backend_countermodel(psi, phi, gamma, vocab, engine.backend, cfg.explain.decide_timeout);
        }
        prover_model = prover.is_some();
        let mut random = None;
        if cfg.both_methods || prover.is_none() {
            let pool = engine.pool(gamma, vocab, &cfg.random);
            random = search_countermodel(psi, phi, gamma, vocab, &cfg.random, pool.as_deref()).ok().flatten();
            random_model = random.is_some();
        }
        let chosen = prover.or(random.map(|cx| (cx.structure, cx.direction)));
        verdict = Verdict::NonEquivalent {
            direction: chosen.as_ref().map(|(_, d)| *d),
            counter: chosen.map(|(s, _)| s),
        };
    }
    let countermodel_ms = ms(t);

    let t = Instant::now();
    let bundle = explain_with_verdict(
        psi,
        phi,
        gamma,
        vocab,
        verdict,
        engine.backend,
        Some(engine.cache),
        engine.necessity_cache,
        &cfg.explain,
    );
    let explain_ms = ms(t);
    PairOutcome {
        id: record.id.clone(),
        key: record.distinct_key(),
        verdict: VerdictClass::of(&bundle.verdict),
        prover_model,
        random_model,
        strategies: bundle.strategies().into_iter().collect(),
        timing: Timing {
            decide_ms,
            countermodel_ms,
            explain_ms,
            total_ms: ms(start),
        },
        bundle,
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FeedbackOptions {
    pub profiles: bool,
    pub necessity: bool,
}

/// The feedback document for one pair.
pub fn feedback_json(record: &PairRecord, outcome: &PairOutcome, opts: FeedbackOptions) -> Value {
    let mut v = serde_json::to_value(&outcome.bundle).expect("bundle serializes");
    let obj = v.as_object_mut().expect("bundle is an object");
    obj.insert("id".into(), json!(record.id));
    if outcome.verdict == VerdictClass::Unknown {
        obj.insert("message".into(), json!("not able to determine"));
    }
    obj.insert(
        "counter_model_methods".into(),
        json!({"prover": outcome.prover_model, "random": outcome.random_model}),
    );
    obj.insert("timing".into(), serde_json::to_value(outcome.timing).expect("timing serializes"));
    if opts.profiles {
        obj.insert(
            "profiles".into(),
            json!({
                "psi": formula_profile(&record.psi),
                "phi": formula_profile(&record.phi),
            }),
        );
    }
    if opts.necessity {
        obj.insert("necessity".into(), serde_json::to_value(&outcome.bundle.necessity).expect("report serializes"));
    }
    v
}

pub struct BatchResult {
    pub outcomes: Vec<PairOutcome>,
    pub report: Report,
}

/// Runs every record; outcomes keep the order of `records`.
pub fn run_batch(records: &[PairRecord], cfg: &RunConfig, engine: &Engine<'_>) -> BatchResult {
    let run = || -> Vec<PairOutcome> {
        match cfg.threads {
            Some(1) => records.iter().map(|r| run_pair(r, cfg, engine)).collect(),
            _ => records.par_iter().map(|r| run_pair(r, cfg, engine)).collect(),
        }
    };
    let outcomes = match cfg.threads {
        Some(n) if n > 1 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                log::warn!("cannot build a pool of {n} threads: {e}");
                run()
            }
        },
        _ => run(),
    };
    let report = Report::from_outcomes(&outcomes);
    BatchResult { outcomes, report }
}
