use super::*;
use crate::countermodel::RandomModelConfig;
use crate::explain::{ExplainConfig, Family, StrategyId};
use crate::prover::{BoundedBackend, BoundedConfig, CheckOptions, DecisionCache, SatBackend, SatQuery, SatResult, UnknownReason};
use crate::semantics::{brute_force_verdict, BoundedVerdict, DEFAULT_ENUMERATION_BUDGET};
use crate::syntax::{parse, Theory, Vocabulary};

fn backend() -> BoundedBackend {
    BoundedBackend::new(BoundedConfig {
        max_size: 3,
        ..BoundedConfig::default()
    })
}

fn config() -> RunConfig {
    RunConfig {
        explain: ExplainConfig {
            random: None,
            parallel: false,
            ..ExplainConfig::default()
        },
        random: RandomModelConfig {
            sizes: (1..=4).collect(),
            per_size_factor: 50,
            ..RandomModelConfig::default()
        },
        both_methods: true,
        threads: Some(1),
    }
}

fn library() -> Vocabulary {
    Vocabulary::new(true)
        .with_relation("S", 1)
        .unwrap()
        .with_relation("D", 2)
        .unwrap()
}

fn record(id: &str, psi: &str, phi: &str) -> PairRecord {
    let v = library();
    PairRecord {
        id: id.into(),
        psi: parse(psi, &v).unwrap(),
        phi: parse(phi, &v).unwrap(),
        gamma: Theory::empty(),
        vocabulary: v,
    }
}

const SOLUTION: &str = "forall x forall y ((S(x) & D(x, y)) -> S(y))";

#[test]
fn quantification_hint() {
    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let r = record("a", SOLUTION, "forall x exists y ((S(x) & D(x, y)) -> S(y))");
    let o = run_pair(&r, &config(), &engine);
    assert_eq!(o.verdict, VerdictClass::NonEquivalent);
    assert!(o.prover_model);
    assert!(o.strategies.iter().any(|s| s.family() == Family::Quantifiers), "{:?}", o.strategies);
}

#[test]
fn self_pair() {
    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let o = run_pair(&record("s", SOLUTION, SOLUTION), &config(), &engine);
    assert_eq!(o.verdict, VerdictClass::Equivalent);
    assert!(o.bundle.explanations.is_empty());
    assert!(!o.prover_model && !o.random_model);
}

#[test]
fn dropped_quantifier_in_millisoft() {
    let c = corpus().unwrap();
    let ms = c.iter().find(|s| s.id == "E-10").unwrap();
    let psi = &ms.solutions[2].formula;
    let phi = parse("forall x exists y (~(y = z) & G(x, y) & G(x, z) & I(y) & I(z))", &ms.vocabulary).unwrap();
    let bf = brute_force_verdict(psi, &phi, &ms.theory, &ms.vocabulary, 3, DEFAULT_ENUMERATION_BUDGET).unwrap();
    assert!(matches!(bf, BoundedVerdict::NonEquivalent(_)));

    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let o = run_pair(&ms.pair("m".into(), psi, phi), &config(), &engine);
    assert_eq!(o.verdict, VerdictClass::NonEquivalent);
    assert!(o.strategies.contains(&StrategyId::Q3), "{:?}", o.strategies);
}

struct Silent;

impl SatBackend for Silent {
    fn check_sat(&self, _: &SatQuery, _: &CheckOptions) -> SatResult {
        SatResult::Unknown(UnknownReason::Timeout)
    }

    fn name(&self) -> String {
        "silent".into()
    }
}

#[test]
fn unknown_is_reported() {
    let cache = DecisionCache::new();
    let engine = Engine::new(&Silent, &cache);
    let r = record("u", SOLUTION, "forall x S(x)");
    let o = run_pair(&r, &config(), &engine);
    assert_eq!(o.verdict, VerdictClass::Unknown);
    assert!(o.bundle.explanations.is_empty());
    let v = feedback_json(&r, &o, FeedbackOptions::default());
    assert_eq!(v["verdict"], "unknown");
    assert_eq!(v["message"], "not able to determine");
}

#[test]
fn feedback_document() {
    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let r = record("b", SOLUTION, "forall x forall y (D(x, y) -> S(y))");
    let o = run_pair(&r, &config(), &engine);
    let v = feedback_json(
        &r,
        &o,
        FeedbackOptions {
            profiles: true,
            necessity: true,
        },
    );
    assert_eq!(v["id"], "b");
    assert_eq!(v["verdict"], "non-equivalent");
    assert!(v["counterexample"]["structure"].is_object());
    assert!(v["explanations"].as_array().unwrap().iter().any(|e| e["strategy"] == "G1"));
    assert_eq!(v["profiles"]["psi"].as_array().unwrap().len(), 3);
    assert!(v["timing"]["total_ms"].is_number());
}

fn small_batch() -> Vec<PairRecord> {
    vec![
        record("1", SOLUTION, SOLUTION),
        record("2", SOLUTION, "forall x forall y (D(x, y) -> S(y))"),
        record("3", SOLUTION, "forall u forall v (D(u, v) -> S(v))"),
        record("4", SOLUTION, "forall x forall y (S(x) -> S(y))"),
        record("5", SOLUTION, "forall y forall x ((S(y) & D(y, x)) -> S(x))"),
    ]
}

#[test]
fn batch_counts_and_invariants() {
    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let res = run_batch(&small_batch(), &config(), &engine);
    let c = &res.report.counts;
    res.report.check().unwrap();
    assert_eq!(c.pairs, Count { total: 5, distinct: 3 });
    assert_eq!(c.equivalent, Count { total: 2, distinct: 1 });
    assert_eq!(c.non_equivalent, Count { total: 3, distinct: 2 });
    assert_eq!(c.at_least_one_strategy, Count { total: 3, distinct: 2 });
    let g1 = c.strategies.iter().find(|s| s.strategy == StrategyId::G1).unwrap();
    // Pair 4 is repaired by adding D(x, y) as a second antecedent.
    assert_eq!(g1.count, Count { total: 3, distinct: 2 });
    let s1 = c.strategies.iter().find(|s| s.strategy == StrategyId::S1).unwrap();
    assert_eq!(s1.count, Count { total: 1, distinct: 1 });
    assert_eq!(res.outcomes.iter().map(|o| o.id.as_str()).collect::<Vec<_>>(), ["1", "2", "3", "4", "5"]);
}

#[test]
fn warm_cache_keeps_counts() {
    let b = backend();
    let cache = DecisionCache::new();
    let engine = Engine::new(&b, &cache);
    let cold = run_batch(&small_batch(), &config(), &engine);
    let warm = run_batch(&small_batch(), &config(), &engine);
    assert_eq!(cold.report.counts, warm.report.counts);
}

#[test]
fn parallel_batch_matches_serial() {
    let b = backend();
    let serial = {
        let cache = DecisionCache::new();
        run_batch(&small_batch(), &config(), &Engine::new(&b, &cache)).report.counts
    };
    let cache = DecisionCache::new();
    let cfg = RunConfig {
        threads: Some(3),
        ..config()
    };
    assert_eq!(run_batch(&small_batch(), &cfg, &Engine::new(&b, &cache)).report.counts, serial);
}
