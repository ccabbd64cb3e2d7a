//! Aggregate counts over a batch, over all pairs and over distinct pairs.

use std::collections::HashSet;

use serde::Serialize;

use super::run::{PairOutcome, VerdictClass};
use crate::explain::StrategyId;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Count {
    pub total: usize,
    pub distinct: usize,
}

impl Count {
    fn add(&mut self, first: bool) {
        self.total += 1;
        if first {
            self.distinct += 1;
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CounterModelCounts {
    /// Non-equivalent pairs with a counter model from either method.
    pub any: Count,
    pub prover: Count,
    pub random: Count,
    pub prover_only: Count,
    pub random_only: Count,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyCount {
    pub strategy: StrategyId,
    pub name: String,
    #[serde(flatten)]
    pub count: Count,
}

/// Everything in a report except timing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pairs: Count,
    pub equivalent: Count,
    pub non_equivalent: Count,
    pub unknown: Count,
    pub counter_models: CounterModelCounts,
    pub strategies: Vec<StrategyCount>,
    pub at_least_one_strategy: Count,
}

pub const BUCKET_MS: f64 = 10.0;
pub const BUCKET_LIMIT_MS: f64 = 250.0;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TimingStats {
    /// Pairs per 10 ms bucket below 250 ms; the last entry counts the rest.
    pub buckets: Vec<usize>,
    pub mean_ms: f64,
    pub p50_ms: f64,
    pub p90_ms: f64,
    pub p95_ms: f64,
    pub p99_ms: f64,
    pub max_ms: f64,
    /// (percent of pairs, ms) on the full curve, one point per percent.
    pub curve: Vec<(u32, f64)>,
}

fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

impl TimingStats {
    pub fn of(values: impl IntoIterator<Item = f64>) -> TimingStats {
        let mut v: Vec<f64> = values.into_iter().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        let n_buckets = (BUCKET_LIMIT_MS / BUCKET_MS) as usize;
        let mut buckets = vec![0; n_buckets + 1];
        for &x in &v {
            buckets[((x / BUCKET_MS) as usize).min(n_buckets)] += 1;
        }
        TimingStats {
            buckets,
            mean_ms: if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 },
            p50_ms: percentile(&v, 50.0),
            p90_ms: percentile(&v, 90.0),
            p95_ms: percentile(&v, 95.0),
            p99_ms: percentile(&v, 99.0),
            max_ms: v.last().copied().unwrap_or(0.0),
            curve: if v.is_empty() {
                Vec::new()
            } else {
                (1..=100).map(|p| (p, percentile(&v, p as f64))).collect()
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TimingReport {
    /// Equivalence decision, all pairs.
    pub decide: TimingStats,
    /// Counter-model search, non-equivalent pairs.
    pub countermodel: TimingStats,
    /// Strategies, non-equivalent pairs.
    pub explain: TimingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    #[serde(flatten)]
    pub counts: Counts,
    pub timing: TimingReport,
}

impl Report {
    /// Distinct counts take the first outcome for each distinct key.
    pub fn from_outcomes(outcomes: &[PairOutcome]) -> Report {
        let mut seen = HashSet::new();
        let mut c = Counts {
            pairs: Count::default(),
            equivalent: Count::default(),
            non_equivalent: Count::default(),
            unknown: Count::default(),
            counter_models: CounterModelCounts::default(),
            strategies: StrategyId::ALL
                .iter()
                .map(|&s| StrategyCount {
                    strategy: s,
                    name: s.to_string(),
                    count: Count::default(),
                })
                .collect(),
            at_least_one_strategy: Count::default(),
        };
        for o in outcomes {
            let first = seen.insert(o.key.as_str());
            c.pairs.add(first);
            match o.verdict {
                VerdictClass::Equivalent => c.equivalent.add(first),
                VerdictClass::Unknown => c.unknown.add(first),
                VerdictClass::NonEquivalent => {
                    c.non_equivalent.add(first);
                    let cm = &mut c.counter_models;
                    if o.prover_model || o.random_model {
                        cm.any.add(first);
                    }
                    if o.prover_model {
                        cm.prover.add(first);
                        if !o.random_model {
                            cm.prover_only.add(first);
                        }
                    }
                    if o.random_model {
                        cm.random.add(first);
                        if !o.prover_model {
                            cm.random_only.add(first);
                        }
                    }
                    for s in &o.strategies {
                        if let Some(sc) = c.strategies.iter_mut().find(|sc| sc.strategy == *s) {
                            sc.count.add(first);
                        }
                    }
                    if o.explained() {
                        c.at_least_one_strategy.add(first);
                    }
                }
            }
        }
        let non_eq = || outcomes.iter().filter(|o| o.verdict == VerdictClass::NonEquivalent);
        Report {
            counts: c,
            timing: TimingReport {
                decide: TimingStats::of(outcomes.iter().map(|o| o.timing.decide_ms)),
                countermodel: TimingStats::of(non_eq().map(|o| o.timing.countermodel_ms)),
                explain: TimingStats::of(non_eq().map(|o| o.timing.explain_ms)),
            },
        }
    }

    /// The arithmetic relations every report satisfies.
    pub fn check(&self) -> Result<(), String> {
        let c = &self.counts;
        let cm = &c.counter_models;
        let mut problems = Vec::new();
        let mut expect = |ok: bool, what: &str| {
            if !ok {
                problems.push(what.to_string());
            }
        };
        let total: fn(&Count) -> usize = |c| c.total;
        let distinct: fn(&Count) -> usize = |c| c.distinct;
        for (get, name) in [(total, "total"), (distinct, "distinct")] {
            expect(
                get(&c.equivalent) + get(&c.non_equivalent) + get(&c.unknown) == get(&c.pairs),
                &format!("{name}: equivalent + non-equivalent + unknown = all"),
            );
            expect(get(&cm.prover_only) <= get(&cm.prover), &format!("{name}: prover-only <= prover"));
            expect(get(&cm.random_only) <= get(&cm.random), &format!("{name}: random-only <= random"));
            expect(get(&cm.any) <= get(&c.non_equivalent), &format!("{name}: counter models <= non-equivalent"));
            expect(
                get(&cm.any) == get(&cm.prover) + get(&cm.random_only),
                &format!("{name}: any = prover + random-only"),
            );
            expect(
                get(&c.at_least_one_strategy) <= get(&c.non_equivalent),
                &format!("{name}: >=1 strategy <= non-equivalent"),
            );
            for s in &c.strategies {
                expect(
                    get(&s.count) <= get(&c.at_least_one_strategy),
                    &format!("{name}: {} <= >=1 strategy", s.name),
                );
            }
        }
        for x in [c.pairs, c.equivalent, c.non_equivalent, c.unknown, c.at_least_one_strategy] {
            expect(x.distinct <= x.total, "distinct <= total");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(problems.join("; "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles_nearest_rank() {
        let v: Vec<f64> = (1..=10).map(|x| x as f64).collect();
        assert_eq!(percentile(&v, 50.0), 5.0);
        assert_eq!(percentile(&v, 90.0), 9.0);
        assert_eq!(percentile(&v, 99.0), 10.0);
        assert_eq!(percentile(&[], 50.0), 0.0);
    }

    #[test]
    fn buckets() {
        let t = TimingStats::of([0.5, 9.9, 10.0, 249.0, 250.0, 1000.0]);
        assert_eq!(t.buckets.len(), 26);
        assert_eq!(t.buckets[0], 2);
        assert_eq!(t.buckets[1], 1);
        assert_eq!(t.buckets[24], 1);
        assert_eq!(t.buckets[25], 2);
        assert_eq!(t.curve.len(), 100);
    }

    #[test]
    fn empty_report_is_consistent() {
        let r = Report::from_outcomes(&[]);
        r.check().unwrap();
        assert_eq!(r.counts.pairs.total, 0);
    }
}
