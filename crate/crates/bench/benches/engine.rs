use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use foeq::countermodel::search_countermodel;
use foeq::explain::{explain_nonequivalence, ExplainConfig};
use foeq::harness::{run_batch, Engine, RunConfig};
use foeq::profile::{extract_guards, formula_profile};
use foeq::prover::DecisionCache;
use foeq::syntax::parse;
use foeq::{decide_equivalence, Decider, RandomModelConfig};
use foeq_bench::{backend, mutated_pairs, scenarios};

fn syntax(c: &mut Criterion) {
    let sc = scenarios();
    let texts: Vec<_> = sc
        .iter()
        .flat_map(|s| s.solutions.iter().map(move |sol| (sol.text.clone(), &s.vocabulary)))
        .collect();
    c.bench_function("parse corpus", |b| {
        b.iter(|| {
            for (t, v) in &texts {
                black_box(parse(t, v).unwrap());
            }
        })
    });
    c.bench_function("profile and guards, corpus", |b| {
        b.iter(|| {
            for s in &sc {
                for sol in &s.solutions {
                    black_box(formula_profile(&sol.formula));
                    black_box(extract_guards(&sol.formula));
                }
            }
        })
    });
}

fn decide(c: &mut Criterion) {
    let sc = scenarios();
    let pairs = mutated_pairs(&sc);
    let sample: Vec<_> = pairs.iter().step_by(7).take(30).collect();
    let be = backend(4);
    c.bench_function("decide, 30 mutated pairs", |b| {
        b.iter(|| {
            for r in &sample {
                let d = Decider::new(&be);
                black_box(decide_equivalence(&r.psi, &r.phi, &r.gamma, &r.vocabulary, &d));
            }
        })
    });
    let cfg = RandomModelConfig {
        per_size_factor: 100,
        ..RandomModelConfig::default()
    };
    let empty: Vec<_> = sample.iter().filter(|r| r.gamma.is_empty()).collect();
    c.bench_function("random counter models, empty theories", |b| {
        b.iter(|| {
            for r in &empty {
                black_box(search_countermodel(&r.psi, &r.phi, &r.gamma, &r.vocabulary, &cfg, None).unwrap());
            }
        })
    });
}

fn explain(c: &mut Criterion) {
    let sc = scenarios();
    let pairs = mutated_pairs(&sc);
    let sample: Vec<_> = pairs.iter().step_by(11).take(12).collect();
    let be = backend(3);
    let cfg = ExplainConfig {
        random: None,
        ..ExplainConfig::default()
    };
    let mut g = c.benchmark_group("explain");
    g.sample_size(10);
    g.bench_function("12 mutated pairs", |b| {
        b.iter(|| {
            for r in &sample {
                black_box(explain_nonequivalence(
                    &r.psi,
                    &r.phi,
                    &r.gamma,
                    &r.vocabulary,
                    &be,
                    None,
                    None,
                    &cfg,
                ));
            }
        })
    });
    let records: Vec<_> = pairs.iter().take(40).cloned().collect();
    let mut run = RunConfig::default();
    run.random.per_size_factor = 50;
    g.bench_function("batch of 40, cold cache", |b| {
        b.iter_batched(
            DecisionCache::new,
            |cache| black_box(run_batch(&records, &run, &Engine::new(&be, &cache)).report),
            BatchSize::PerIteration,
        )
    });
    g.finish();
}

criterion_group!(benches, syntax, decide, explain);
criterion_main!(benches);
