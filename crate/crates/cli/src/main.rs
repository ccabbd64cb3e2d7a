use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};
use foeq::definability::NecessityCache;
use foeq::explain::StrategyId;
use foeq::harness::{self, feedback_json, run_batch, run_pair, Engine, FeedbackOptions, PairRecord, RunConfig};
use foeq::prover::{BoundedBackend, BoundedConfig, Cascade, DecisionCache, ExternalProver, ProverConfig, SatBackend};
use foeq::RandomModelConfig;

#[derive(Parser)]
#[command(name = "foeq", version, about = "Equivalence checking and explanations for first-order formulas")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide and explain a single pair given as one JSON record.
    Feedback(FeedbackArgs),
    /// Evaluate a JSON-lines dataset and write a summary report.
    Batch(BatchArgs),
    /// Print the bundled corpus as a JSON-lines dataset.
    Corpus(CorpusArgs),
}

#[derive(Args)]
struct Common {
    /// Path of a TPTP prover executable (Vampire command line). Defaults to
    /// `vampire` on PATH; without one the built-in bounded model finder is used.
    #[arg(long, env = "FOEQ_PROVER")]
    prover: Option<PathBuf>,
    /// Use only the bounded model finder even if a prover is available.
    #[arg(long)]
    no_prover: bool,
    /// Largest universe the bounded model finder tries.
    #[arg(long, default_value_t = 5)]
    max_size: usize,
    /// Timeout of the initial equivalence test.
    #[arg(long, default_value_t = 20_000)]
    timeout_ms: u64,
    /// Timeout of each equivalence test confirming a candidate modification.
    #[arg(long, default_value_t = 30_000)]
    strategy_timeout_ms: u64,
    /// Seed of the random counter-model search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Structures per universe size m in the random search are m times this.
    #[arg(long, default_value_t = 1000)]
    random_factor: usize,
    /// Stop after the first explanation.
    #[arg(long)]
    first_only: bool,
    /// Append-only file for decided pairs, reused across runs.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Append-only file for necessity reports.
    #[arg(long)]
    necessity_cache: Option<PathBuf>,
    /// Restrict to these strategies (e.g. S1,G1,Q1G1).
    #[arg(long, value_delimiter = ',')]
    strategies: Vec<String>,
}

#[derive(Args)]
struct FeedbackArgs {
    pairfile: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Also run the random search when the prover already gave a model.
    #[arg(long)]
    both_methods: bool,
    /// Include both formulas' atom profiles.
    #[arg(long)]
    dump_profiles: bool,
    /// Include the necessity report for ψ's symbols.
    #[arg(long)]
    dump_necessity: bool,
    /// Print a readable summary instead of JSON.
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct BatchArgs {
    dataset: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    report: PathBuf,
    /// Per-pair results.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Run both counter-model methods on every non-equivalent pair.
    #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = ArgAction::Set)]
    both_methods: bool,
    /// Skip malformed records instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CorpusArgs {
    /// Pair each solution with every single-site mutation of it instead of
    /// with itself.
    #[arg(long)]
    mutate: bool,
}

fn find_on_path(name: &str) -> Option<PathBuf> {
    std::env::var_os("PATH").and_then(|paths| {
        std::env::split_paths(&paths)
            .map(|d| d.join(name))
            .find(|p| p.is_file())
    })
}

impl Common {
    fn backend(&self) -> Box<dyn SatBackend> {
        let bounded = BoundedBackend::new(BoundedConfig {
            max_size: self.max_size,
            ..BoundedConfig::default()
        });
        let prover = if self.no_prover {
            None
        } else {
            self.prover.clone().or_else(|| find_on_path("vampire"))
        };
        match prover {
            Some(path) => {
                log::info!("using prover {}", path.display());
                Box::new(Cascade {
                    primary: ExternalProver::new(ProverConfig::new(path)),
                    fallback: bounded,
                })
            }
            None => {
                log::info!("no prover found; using the bounded model finder up to size {}", self.max_size);
                Box::new(bounded)
            }
        }
    }

    fn run_config(&self, both_methods: bool, threads: Option<usize>) -> Result<RunConfig> {
        let mut cfg = RunConfig {
            random: RandomModelConfig {
                seed: self.seed,
                per_size_factor: self.random_factor,
                ..RandomModelConfig::default()
            },
            both_methods,
            threads,
            ..RunConfig::default()
        };
        cfg.explain.decide_timeout = Duration::from_millis(self.timeout_ms);
        cfg.explain.timeout = Duration::from_millis(self.strategy_timeout_ms);
        cfg.explain.necessity.timeout = Duration::from_millis(self.timeout_ms);
        cfg.explain.first_only = self.first_only;
        if !self.strategies.is_empty() {
            cfg.explain.strategies = self
                .strategies
                .iter()
                .map(|s| StrategyId::parse(s).with_context(|| format!("unknown strategy `{s}`")))
                .collect::<Result<_>>()?;
        }
        Ok(cfg)
    }

    fn caches(&self) -> Result<(DecisionCache, Option<NecessityCache>)> {
        let cache = match &self.cache {
            Some(p) => DecisionCache::open(p).with_context(|| format!("cannot open cache {}", p.display()))?,
            None => DecisionCache::new(),
        };
        let nc = match &self.necessity_cache {
            Some(p) => Some(NecessityCache::open(p).with_context(|| format!("cannot open cache {}", p.display()))?),
            None => None,
        };
        Ok((cache, nc))
    }
}

/// Failures that map to exit code 2.
#[derive(Debug)]
struct DatasetError(String);

impl std::fmt::Display for DatasetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for DatasetError {}

fn read_pair(path: &Path) -> Result<PairRecord> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let ds = harness::parse_dataset(&text);
    if let Ok(r) = PairRecord::from_json(text.trim()) {
        return Ok(r);
    }
    if let Some(e) = ds.errors.first() {
        return Err(DatasetError(format!("{}: {e}", path.display())).into());
    }
    match ds.records.len() {
        1 => Ok(ds.records.into_iter().next().expect("one record")),
        0 => Err(DatasetError(format!("{}: no record", path.display())).into()),
        n => Err(DatasetError(format!("{}: expected one record, found {n}", path.display())).into()),
    }
}

fn print_text(v: &serde_json::Value, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "pair {}: {}", v["id"].as_str().unwrap_or("?"), v["verdict"].as_str().unwrap_or("?"))?;
    if let Some(m) = v["message"].as_str() {
        writeln!(out, "{m}")?;
    }
    if let Some(cx) = v.get("counterexample") {
        writeln!(out, "counter example ({}):", cx["direction"].as_str().unwrap_or("?"))?;
        for line in cx["text"].as_str().unwrap_or("").lines() {
            writeln!(out, "  {line}")?;
        }
    }
    for e in v["explanations"].as_array().into_iter().flatten() {
        let modified = e["evidence"]["modified"].as_str().map(|m| format!(" [{m}]")).unwrap_or_default();
        writeln!(
            out,
            "{} {}: {}{}",
            e["strategy"].as_str().unwrap_or("?"),
            e["kind"].as_str().unwrap_or("?"),
            e["message"].as_str().unwrap_or(""),
            modified
        )?;
    }
    Ok(())
}

fn feedback(args: FeedbackArgs) -> Result<()> {
    let record = read_pair(&args.pairfile)?;
    let cfg = args.common.run_config(args.both_methods, Some(1))?;
    let backend = args.common.backend();
    let (cache, nc) = args.common.caches()?;
    let mut engine = Engine::new(backend.as_ref(), &cache);
    if let Some(nc) = &nc {
        engine = engine.with_necessity_cache(nc);
    }
    let outcome = run_pair(&record, &cfg, &engine);
    let v = feedback_json(
        &record,
        &outcome,
        FeedbackOptions {
            profiles: args.dump_profiles,
            necessity: args.dump_necessity,
        },
    );
    let mut out = std::io::stdout().lock();
    if args.text {
        print_text(&v, &mut out)?;
    } else {
        serde_json::to_writer_pretty(&mut out, &v)?;
        writeln!(out)?;
    }
    Ok(())
}

fn write_csv(path: &Path, outcomes: &[harness::PairOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record([
        "id",
        "verdict",
        "prover_model",
        "random_model",
        "strategies",
        "decide_ms",
        "countermodel_ms",
        "explain_ms",
        "total_ms",
    ])?;
    for o in outcomes {
        let verdict = serde_json::to_value(o.verdict)?;
        let strategies: Vec<&str> = o.strategies.iter().map(|s| s.code()).collect();
        w.write_record([
            o.id.clone(),
            verdict.as_str().unwrap_or("").to_string(),
            o.prover_model.to_string(),
            o.random_model.to_string(),
            strategies.join(";"),
            format!("{:.3}", o.timing.decide_ms),
            format!("{:.3}", o.timing.countermodel_ms),
            format!("{:.3}", o.timing.explain_ms),
            format!("{:.3}", o.timing.total_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn batch(args: BatchArgs) -> Result<()> {
    let ds = harness::load_dataset(&args.dataset).with_context(|| format!("cannot read {}", args.dataset.display()))?;
    for e in &ds.errors {
        eprintln!("{}: {e}", args.dataset.display());
    }
    if !ds.errors.is_empty() && !args.lenient {
        return Err(DatasetError(format!("{} malformed record(s); use --lenient to skip them", ds.errors.len())).into());
    }
    let cfg = args.common.run_config(args.both_methods, args.threads)?;
    let backend = args.common.backend();
    let (cache, nc) = args.common.caches()?;
    let mut engine = Engine::new(backend.as_ref(), &cache);
    if let Some(nc) = &nc {
        engine = engine.with_necessity_cache(nc);
    }
    let res = run_batch(&ds.records, &cfg, &engine);
    if let Err(e) = res.report.check() {
        bail!("inconsistent report: {e}");
    }
    let file = std::fs::File::create(&args.report).with_context(|| format!("cannot write {}", args.report.display()))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &res.report)?;
    if let Some(path) = &args.csv {
        write_csv(path, &res.outcomes)?;
    }
    let c = &res.report.counts;
    eprintln!(
        "{} pairs ({} distinct): {} equivalent, {} non-equivalent, {} unknown; {} explained by >=1 strategy",
        c.pairs.total,
        c.pairs.distinct,
        c.equivalent.total,
        c.non_equivalent.total,
        c.unknown.total,
        c.at_least_one_strategy.total
    );
    if !ds.errors.is_empty() {
        eprintln!("skipped {} malformed record(s)", ds.errors.len());
    }
    Ok(())
}

fn corpus(args: CorpusArgs) -> Result<()> {
    let scenarios = harness::corpus()?;
    let records = if args.mutate {
        let mut out = Vec::new();
        for s in &scenarios {
            for sol in &s.solutions {
                for m in harness::Mutation::ALL {
                    for (k, phi) in m.apply(&sol.formula).into_iter().enumerate() {
                        out.push(s.pair(format!("{}/{m}/{}", sol.id, k + 1), &sol.formula, phi));
                    }
                }
            }
        }
        out
    } else {
        harness::self_pairs(&scenarios)
    };
    match std::io::stdout().lock().write_all(harness::write_dataset(&records).as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Feedback(a) => feedback(a),
        Command::Batch(a) => batch(a),
        Command::Corpus(a) => corpus(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<DatasetError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
