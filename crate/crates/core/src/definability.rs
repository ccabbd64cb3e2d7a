//! Necessary symbols via Padoa's method.
//!
//! A symbol `s` of ψ is necessary modulo Γ when there are two Γ-models that
//! agree on everything except `s` and disagree on ψ. The search for such a
//! pair is a single first-order satisfiability query over a vocabulary with
//! two copies of `s`. Equality is handled by replacing it with a fresh
//! congruence `E` and testing `E` instead.

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::prover::{
    Certainty, CheckOptions, QueryError, QueryOrigin, SatBackend, SatQuery, SatResult, TOP_LEVEL_TIMEOUT,
};
use crate::semantics::{CompiledFormula, CompiledTheory, Structure};
use crate::syntax::{alpha_normalize, close_free_variables, Formula, SymbolKind, Term, Theory, Vocabulary};

pub const EQUALITY: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefinabilityError {
    #[error("no symbol to test")]
    NothingTested,
    #[error("`{0}` does not occur in the formula or the theory")]
    NotOccurring(String),
    #[error("neither the formula nor the theory uses equality")]
    NoEquality,
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// A Padoa query together with what is needed to read back a witness pair.
#[derive(Debug, Clone)]
pub struct PadoaQuery {
    pub query: SatQuery,
    /// `(symbol, first copy, second copy)`.
    pub copies: Vec<(String, String, String)>,
    /// ψ with free variables replaced by shared constants.
    pub psi: Formula,
    pub gamma: Theory,
    /// Vocabulary of `psi` and `gamma`, including the closure constants.
    pub base: Arc<Vocabulary>,
}

fn add_like(v: &mut Vocabulary, kind: SymbolKind, name: &str) {
    match kind {
        SymbolKind::Relation { arity, .. } => v.add_relation(name, arity),
        SymbolKind::Function { arity, .. } => v.add_function(name, arity),
        SymbolKind::Constant { .. } => v.add_constant(name),
    }
    .expect("fresh name");
}

/// Builds the query "Γ' ∪ Γ'' ∪ {ψ' ↔ ¬ψ''}" where primed formulas use the
/// first and second copy of each tested symbol and share all others.
pub fn encode_padoa(
    psi: &Formula,
    gamma: &Theory,
    tested: &[&str],
    vocab: &Vocabulary,
) -> Result<PadoaQuery, DefinabilityError> {
    if tested.is_empty() {
        return Err(DefinabilityError::NothingTested);
    }
    let mut used = psi.symbols();
    used.merge(&gamma.symbols());
    for s in tested {
        if !used.contains(s) || vocab.lookup(s).is_none() {
            return Err(DefinabilityError::NotOccurring(s.to_string()));
        }
    }
    let (closed, closure) = close_free_variables(&[psi], vocab);
    let base = closure.vocab;
    let mut qv = base.filtered(|n| !tested.contains(&n));
    let mut copies = Vec::new();
    let mut first = HashMap::new();
    let mut second = HashMap::new();
    for s in tested {
        let kind = base.lookup(s).expect("checked above");
        let a = qv.fresh_name(&format!("{s}_a"), &|n| base.contains(n));
        add_like(&mut qv, kind, &a);
        let b = qv.fresh_name(&format!("{s}_b"), &|n| base.contains(n));
        add_like(&mut qv, kind, &b);
        first.insert(s.to_string(), a.clone());
        second.insert(s.to_string(), b.clone());
        copies.push((s.to_string(), a, b));
    }
    let r1 = |n: &str| first.get(n).cloned();
    let r2 = |n: &str| second.get(n).cloned();
    let mut axioms = Vec::new();
    for ax in gamma {
        axioms.push(ax.rename_symbols(&r1));
    }
    for ax in gamma {
        axioms.push(ax.rename_symbols(&r2));
    }
    let psi_closed = closed.into_iter().next().expect("one formula");
    axioms.push(Formula::iff(
        psi_closed.rename_symbols(&r1),
        Formula::not(psi_closed.rename_symbols(&r2)),
    ));
    let query = SatQuery::new(axioms, Arc::new(qv), QueryOrigin::Definability)?;
    Ok(PadoaQuery {
        query,
        copies,
        psi: psi_closed,
        gamma: gamma.clone(),
        base: Arc::new(base),
    })
}

impl PadoaQuery {
    /// Splits a model of the query into the two structures it describes.
    pub fn split(&self, model: &Structure) -> Option<(Structure, Structure)> {
        let pick = |which: usize| {
            move |n: &str| {
                self.copies
                    .iter()
                    .find(|(s, _, _)| s == n)
                    .map(|(_, a, b)| if which == 0 { a.clone() } else { b.clone() })
                    .unwrap_or_else(|| n.to_string())
            }
        };
        let a = model.reinterpret(self.base.clone(), &pick(0)).ok()?;
        let b = model.reinterpret(self.base.clone(), &pick(1)).ok()?;
        Some((a, b))
    }

    /// Both halves are Γ-models, agree off the tested symbols (by
    /// construction of `split`), and disagree on ψ.
    pub fn validate_witness(&self, model: &Structure) -> bool {
        let Some((a, b)) = self.split(model) else { return false };
        let Ok(theory) = CompiledTheory::compile(self.gamma.iter(), &self.base) else { return false };
        let Ok(psi) = CompiledFormula::compile(&self.psi, &self.base) else { return false };
        theory.holds(&a) && theory.holds(&b) && psi.holds(&a) != psi.holds(&b)
    }
}

/// ψ*, Γ* and the congruence axioms δ_E for a fresh binary relation E.
#[derive(Debug, Clone)]
pub struct StarTransform {
    pub psi_star: Formula,
    pub gamma_star: Theory,
    pub delta_e: Vec<Formula>,
    pub e: String,
    /// σ ∪ {E}, without equality.
    pub vocab: Vocabulary,
}

fn star(f: &Formula, e: &str) -> Formula {
    f.map_atoms(&|a| match a {
        Formula::Eq(x, y) => Formula::atom(e, vec![x.clone(), y.clone()]),
        other => other.clone(),
    })
}

fn vars(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn forall_all(vs: &[String], body: Formula) -> Formula {
    vs.iter().rev().fold(body, |acc, v| Formula::forall(v, acc))
}

fn congruence(e: &str, xs: &[String], ys: &[String]) -> Formula {
    Formula::conjunction(
        xs.iter()
            .zip(ys)
            .map(|(x, y)| Formula::atom(e, vec![Term::var(x), Term::var(y)])),
    )
    .expect("arity is positive")
}

pub fn star_transform(psi: &Formula, gamma: &Theory, vocab: &Vocabulary) -> Result<StarTransform, DefinabilityError> {
    if !psi.symbols().equality && !gamma.symbols().equality {
        return Err(DefinabilityError::NoEquality);
    }
    let mut names: Vec<String> = psi.all_variables().into_iter().collect();
    for ax in gamma {
        names.extend(ax.all_variables());
    }
    let e = vocab.fresh_name("E", &|n| names.iter().any(|v| v == n));
    let mut sv = vocab.clone();
    sv.set_equality(false);
    sv.add_relation(&e, 2).expect("fresh name");

    let ev = |a: &str, b: &str| Formula::atom(&e, vec![Term::var(a), Term::var(b)]);
    let mut delta = vec![
        Formula::forall("x", ev("x", "x")),
        Formula::forall("x", Formula::forall("y", Formula::implies(ev("x", "y"), ev("y", "x")))),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::forall("z", Formula::implies(Formula::and(ev("x", "y"), ev("y", "z")), ev("x", "z"))),
            ),
        ),
    ];
    for (r, k) in vocab.relations() {
        if *k == 0 {
            continue;
        }
        let (xs, ys) = (vars("x", *k), vars("y", *k));
        let rx = Formula::atom(r, xs.iter().map(|v| Term::var(v)).collect());
        let ry = Formula::atom(r, ys.iter().map(|v| Term::var(v)).collect());
        let body = Formula::implies(Formula::and(congruence(&e, &xs, &ys), rx), ry);
        delta.push(forall_all(&xs, forall_all(&ys, body)));
    }
    for (f, k) in vocab.functions() {
        let (xs, ys) = (vars("x", *k), vars("y", *k));
        let fx = Term::app(f, xs.iter().map(|v| Term::var(v)).collect());
        let fy = Term::app(f, ys.iter().map(|v| Term::var(v)).collect());
        let body = Formula::implies(congruence(&e, &xs, &ys), Formula::atom(&e, vec![fx, fy]));
        delta.push(forall_all(&xs, forall_all(&ys, body)));
    }
    Ok(StarTransform {
        psi_star: star(psi, &e),
        gamma_star: Theory::new(gamma.iter().map(|a| star(a, &e)).collect()),
        delta_e: delta,
        e,
        vocab: sv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NecessityStatus {
    Necessary,
    NotShownNecessary,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolNecessity {
    pub symbol: String,
    pub status: NecessityStatus,
    pub query: String,
    /// How far the search for a witness pair went when none was found.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certainty: Option<Certainty>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub symbols: Vec<SymbolNecessity>,
}

impl NecessityReport {
    pub fn status(&self, symbol: &str) -> Option<NecessityStatus> {
        self.symbols.iter().find(|s| s.symbol == symbol).map(|s| s.status)
    }

    pub fn necessary(&self) -> impl Iterator<Item = &str> {
        self.with_status(NecessityStatus::Necessary)
    }

    pub fn with_status(&self, status: NecessityStatus) -> impl Iterator<Item = &str> {
        self.symbols.iter().filter(move |s| s.status == status).map(|s| s.symbol.as_str())
    }

    fn is_complete(&self) -> bool {
        self.symbols.iter().all(|s| s.status != NecessityStatus::Unknown)
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    key: String,
    report: NecessityReport,
}

/// Necessity reports keyed by (ψ, Γ), optionally persisted as JSON lines.
#[derive(Default)]
pub struct NecessityCache {
    map: RwLock<HashMap<String, NecessityReport>>,
    log: Option<Mutex<File>>,
}

pub fn necessity_key(psi: &Formula, gamma: &Theory) -> String {
    let mut g: Vec<String> = gamma.iter().map(|a| alpha_normalize(a).to_string()).collect();
    g.sort();
    g.dedup();
    serde_json::to_string(&(alpha_normalize(psi).to_string(), g)).expect("strings serialize")
}

impl NecessityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(path: &Path) -> io::Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                match serde_json::from_str::<CacheLine>(&line) {
                    Ok(l) => {
                        map.insert(l.key, l.report);
                    }
                    Err(e) if !line.trim().is_empty() => log::warn!("{}: skipping line: {e}", path.display()),
                    Err(_) => {}
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(NecessityCache {
            map: RwLock::new(map),
            log: Some(Mutex::new(file)),
        })
    }

    pub fn get(&self, key: &str) -> Option<NecessityReport> {
        self.map.read().expect("cache lock").get(key).cloned()
    }

    pub fn insert(&self, key: String, report: NecessityReport) {
        let line = serde_json::to_string(&CacheLine {
            key: key.clone(),
            report: report.clone(),
        })
        .expect("serializable");
        if self.map.write().expect("cache lock").insert(key, report).is_some() {
            return;
        }
        if let Some(log) = &self.log {
            if let Err(e) = writeln!(log.lock().expect("cache file lock"), "{line}") {
                log::warn!("cannot append to necessity cache: {e}");
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NecessityConfig {
    pub timeout: Duration,
    pub parallel: bool,
}

impl Default for NecessityConfig {
    fn default() -> Self {
        NecessityConfig {
            timeout: TOP_LEVEL_TIMEOUT,
            parallel: true,
        }
    }
}

fn run_padoa(backend: &dyn SatBackend, pq: &PadoaQuery, symbol: &str, cfg: &NecessityConfig) -> SymbolNecessity {
    let opts = CheckOptions::new(cfg.timeout).with_model(true);
    let query = format!("padoa:{symbol}");
    let (status, certainty, detail) = match backend.check_sat(&pq.query, &opts) {
        SatResult::Satisfiable(Some(m)) if !pq.validate_witness(&m) => {
            log::warn!("witness pair for {symbol} does not validate");
            (NecessityStatus::Unknown, None, Some("invalid witness".to_string()))
        }
        SatResult::Satisfiable(_) => (NecessityStatus::Necessary, None, None),
        SatResult::Unsatisfiable(c) => (NecessityStatus::NotShownNecessary, Some(c), None),
        SatResult::Unknown(r) => (NecessityStatus::Unknown, None, Some(r.to_string())),
    };
    SymbolNecessity {
        symbol: symbol.to_string(),
        status,
        query,
        certainty,
        detail,
    }
}

fn failed(symbol: &str, e: DefinabilityError) -> SymbolNecessity {
    SymbolNecessity {
        symbol: symbol.to_string(),
        status: NecessityStatus::Unknown,
        query: format!("padoa:{symbol}"),
        certainty: None,
        detail: Some(e.to_string()),
    }
}

fn test_symbol(
    psi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    symbol: &str,
    backend: &dyn SatBackend,
    cfg: &NecessityConfig,
) -> SymbolNecessity {
    if symbol == EQUALITY {
        let st = match star_transform(psi, gamma, vocab) {
            Ok(st) => st,
            Err(e) => return failed(symbol, e),
        };
        let mut axioms: Vec<Formula> = st.gamma_star.iter().cloned().collect();
        axioms.extend(st.delta_e.iter().cloned());
        match encode_padoa(&st.psi_star, &Theory::new(axioms), &[&st.e], &st.vocab) {
            Ok(pq) => {
                let mut r = run_padoa(backend, &pq, &st.e, cfg);
                r.symbol = EQUALITY.to_string();
                r.query = format!("padoa:{EQUALITY}");
                r
            }
            Err(e) => failed(symbol, e),
        }
    } else {
        match encode_padoa(psi, gamma, &[symbol], vocab) {
            Ok(pq) => run_padoa(backend, &pq, symbol, cfg),
            Err(e) => failed(symbol, e),
        }
    }
}

/// Tests every non-logical symbol of ψ (and equality, when ψ uses it) for
/// necessity modulo Γ, one query per symbol.
pub fn necessary_symbols(
    psi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    backend: &dyn SatBackend,
    cfg: &NecessityConfig,
    cache: Option<&NecessityCache>,
) -> NecessityReport {
    let key = necessity_key(psi, gamma);
    if let Some(r) = cache.and_then(|c| c.get(&key)) {
        return r;
    }
    let used = psi.symbols();
    let mut symbols: Vec<String> = used.names().cloned().collect();
    if used.equality {
        symbols.push(EQUALITY.to_string());
    }
    let run = |s: &String| test_symbol(psi, gamma, vocab, s, backend, cfg);
    let results: Vec<SymbolNecessity> = if cfg.parallel {
        symbols.par_iter().map(run).collect()
    } else {
        symbols.iter().map(run).collect()
    };
    let order: BTreeMap<&str, usize> = symbols.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut results = results;
    results.sort_by_key(|r| order[r.symbol.as_str()]);
    let report = NecessityReport { symbols: results };
    if let Some(c) = cache {
        if report.is_complete() {
            c.insert(key, report.clone());
        }
    }
    report
}
