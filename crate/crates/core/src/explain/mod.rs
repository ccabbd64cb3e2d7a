//! Explanations for non-equivalence: blockers (syntactic properties of φ
//! that rule out equivalence with ψ) and bugfixing modifications (small
//! edits of φ confirmed to make it equivalent to ψ).

mod boolean;
mod guards;
mod quantifiers;
mod symbols;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::countermodel::{Direction, RandomModelConfig};
use crate::definability::{necessary_symbols, NecessityCache, NecessityConfig, NecessityReport};
use crate::profile::{extract_guards, formula_profile, AtomProfile, Guards};
use crate::prover::{decide_equivalence, Certainty, Decider, DecisionCache, SatBackend, UnknownReason, Verdict, STRATEGY_TIMEOUT};
use crate::semantics::Structure;
use crate::syntax::{prenex_decompose, Address, Formula, Prefix, Theory, Vocabulary};

pub use boolean::boolean_strategies;
pub use guards::guard_strategies;
pub use quantifiers::quantifier_strategies;
pub use symbols::symbol_strategies;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyId {
    S1,
    S2,
    S3,
    S4,
    Q1,
    Q2,
    Q3,
    G1,
    G2,
    Q1G1,
    B1,
    B2,
}

impl StrategyId {
    pub const ALL: [StrategyId; 12] = [
        StrategyId::S1,
        StrategyId::S2,
        StrategyId::S3,
        StrategyId::S4,
        StrategyId::Q1,
        StrategyId::Q2,
        StrategyId::Q3,
        StrategyId::G1,
        StrategyId::G2,
        StrategyId::Q1G1,
        StrategyId::B1,
        StrategyId::B2,
    ];

    pub fn code(self) -> &'static str {
        match self {
            StrategyId::S1 => "S1",
            StrategyId::S2 => "S2",
            StrategyId::S3 => "S3",
            StrategyId::S4 => "S4",
            StrategyId::Q1 => "Q1",
            StrategyId::Q2 => "Q2",
            StrategyId::Q3 => "Q3",
            StrategyId::G1 => "G1",
            StrategyId::G2 => "G2",
            StrategyId::Q1G1 => "Q1G1",
            StrategyId::B1 => "B1",
            StrategyId::B2 => "B2",
        }
    }

    pub fn family(self) -> Family {
        match self {
            StrategyId::S1 | StrategyId::S2 | StrategyId::S3 | StrategyId::S4 => Family::Symbols,
            StrategyId::Q1 | StrategyId::Q2 | StrategyId::Q3 => Family::Quantifiers,
            StrategyId::G1 | StrategyId::G2 | StrategyId::Q1G1 => Family::Guards,
            StrategyId::B1 | StrategyId::B2 => Family::Boolean,
        }
    }

    pub fn parse(s: &str) -> Option<StrategyId> {
        let s = s.replace(['-', '+', ' '], "").to_ascii_uppercase();
        StrategyId::ALL.into_iter().find(|id| id.code() == s)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyId::Q1G1 => f.write_str("Q-1+G-1"),
            other => {
                let c = other.code();
                write!(f, "{}-{}", &c[..1], &c[1..])
            }
        }
    }
}

impl Serialize for StrategyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Symbols,
    Quantifiers,
    Guards,
    Boolean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplanationKind {
    Blocker,
    Bugfix,
}

fn display_str<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Replacement of the subtree at `address`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edit {
    pub address: Address,
    #[serde(serialize_with = "display_str")]
    pub before: Formula,
    #[serde(serialize_with = "display_str")]
    pub after: Formula,
}

impl Edit {
    /// The edit replacing the node at `address` of `f` by `after`.
    pub fn at(f: &Formula, address: Address, after: Formula) -> Option<Edit> {
        let before = f.at(&address)?.clone();
        Some(Edit { address, before, after })
    }
}

/// Applies edits in order, checking each `before` against the current tree.
pub fn apply_edits(f: &Formula, edits: &[Edit]) -> Option<Formula> {
    let mut cur = f.clone();
    for e in edits {
        if cur.at(&e.address)? != &e.before {
            return None;
        }
        cur = cur.replaced(&e.address, e.after.clone())?;
    }
    Some(cur)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum Evidence {
    MissingSymbol {
        symbol: String,
    },
    FreeVariables {
        only_in_psi: Vec<String>,
        only_in_phi: Vec<String>,
    },
    Modification {
        #[serde(serialize_with = "display_str")]
        modified: Formula,
        edits: Vec<Edit>,
        description: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Explanation {
    pub strategy: StrategyId,
    pub kind: ExplanationKind,
    /// False only for missing-symbol blockers whose necessity could not be
    /// established.
    pub verified: bool,
    pub evidence: Evidence,
    pub message: String,
}

impl Explanation {
    pub fn modified(&self) -> Option<&Formula> {
        match &self.evidence {
            Evidence::Modification { modified, .. } => Some(modified),
            _ => None,
        }
    }

    pub fn edits(&self) -> &[Edit] {
        match &self.evidence {
            Evidence::Modification { edits, .. } => edits,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub per_strategy: usize,
    /// Argument permutations considered per atom.
    pub permutations: usize,
    pub combined: usize,
    /// Atoms of larger arity are not permuted.
    pub max_permuted_arity: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            per_strategy: 16,
            permutations: 24,
            combined: 32,
            max_permuted_arity: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExplainConfig {
    /// Per equivalence test of a candidate.
    pub timeout: Duration,
    /// For the initial decision.
    pub decide_timeout: Duration,
    pub caps: Caps,
    /// Stop after the first explanation.
    pub first_only: bool,
    /// Run the strategy families concurrently.
    pub parallel: bool,
    pub necessity: NecessityConfig,
    /// Random counter-model search when the backend gives no model.
    pub random: Option<RandomModelConfig>,
    pub strategies: BTreeSet<StrategyId>,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            timeout: STRATEGY_TIMEOUT,
            decide_timeout: crate::prover::TOP_LEVEL_TIMEOUT,
            caps: Caps::default(),
            first_only: false,
            parallel: true,
            necessity: NecessityConfig::default(),
            random: Some(RandomModelConfig::default()),
            strategies: StrategyId::ALL.into_iter().collect(),
        }
    }
}

/// A modification of φ awaiting confirmation.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub edits: Vec<Edit>,
    pub formula: Formula,
    pub description: String,
    pub message: String,
}

impl Candidate {
    pub fn single(phi: &Formula, edit: Edit, description: String, message: String) -> Option<Candidate> {
        let formula = apply_edits(phi, std::slice::from_ref(&edit))?;
        Some(Candidate {
            edits: vec![edit],
            formula,
            description,
            message,
        })
    }

    pub fn chained(phi: &Formula, edits: Vec<Edit>, description: String, message: String) -> Option<Candidate> {
        let formula = apply_edits(phi, &edits)?;
        Some(Candidate {
            edits,
            formula,
            description,
            message,
        })
    }
}

/// The pair and everything precomputed about it.
pub struct StrategyContext<'a> {
    pub psi: Formula,
    pub phi: Formula,
    pub gamma: Theory,
    pub vocab: Vocabulary,
    pub psi_profile: Vec<AtomProfile>,
    pub phi_profile: Vec<AtomProfile>,
    pub psi_guards: Guards,
    pub phi_guards: Guards,
    pub psi_prenex: Option<(Prefix, Formula)>,
    pub phi_prenex: Option<(Prefix, Formula)>,
    pub necessity: NecessityReport,
    pub backend: &'a dyn SatBackend,
    pub cache: Option<&'a DecisionCache>,
    pub cfg: &'a ExplainConfig,
    tried: AtomicUsize,
    tried_formulas: Mutex<BTreeSet<(StrategyId, Formula)>>,
}

impl<'a> StrategyContext<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        psi: &Formula,
        phi: &Formula,
        gamma: &Theory,
        vocab: &Vocabulary,
        necessity: NecessityReport,
        backend: &'a dyn SatBackend,
        cache: Option<&'a DecisionCache>,
        cfg: &'a ExplainConfig,
    ) -> Self {
        StrategyContext {
            psi: psi.clone(),
            phi: phi.clone(),
            gamma: gamma.clone(),
            vocab: vocab.clone(),
            psi_profile: formula_profile(psi),
            phi_profile: formula_profile(phi),
            psi_guards: extract_guards(psi),
            phi_guards: extract_guards(phi),
            psi_prenex: prenex_decompose(psi),
            phi_prenex: prenex_decompose(phi),
            necessity,
            backend,
            cache,
            cfg,
            tried: AtomicUsize::new(0),
            tried_formulas: Mutex::new(BTreeSet::new()),
        }
    }

    /// Number of candidates sent to confirmation so far.
    pub fn candidates_tried(&self) -> usize {
        self.tried.load(Ordering::Relaxed)
    }

    pub fn enabled(&self, id: StrategyId) -> bool {
        self.cfg.strategies.contains(&id)
    }

    /// ψ ≡ φ' modulo Γ, established by the backend.
    pub fn confirm(&self, candidate: &Formula) -> bool {
        self.tried.fetch_add(1, Ordering::Relaxed);
        let mut d = Decider::new(self.backend).with_timeout(self.cfg.timeout).without_models();
        if let Some(c) = self.cache {
            d = d.with_cache(c);
        }
        decide_equivalence(&self.psi, candidate, &self.gamma, &self.vocab, &d).is_equivalent()
    }

    fn admissible(&self, f: &Formula) -> bool {
        if f == &self.phi {
            return false;
        }
        let allowed: BTreeSet<String> = self
            .phi
            .free_variables()
            .into_iter()
            .chain(self.psi.free_variables())
            .collect();
        f.free_variables().iter().all(|v| allowed.contains(v))
    }

    /// Tries candidates in order, at most `cap` of them, and reports the
    /// first confirmed one.
    pub fn first_confirmed(
        &self,
        id: StrategyId,
        candidates: impl IntoIterator<Item = Candidate>,
        cap: usize,
    ) -> Option<Explanation> {
        let mut n = 0;
        for c in candidates {
            if n >= cap {
                break;
            }
            if !self.admissible(&c.formula) {
                continue;
            }
            if !self.tried_formulas.lock().expect("lock").insert((id, c.formula.clone())) {
                continue;
            }
            n += 1;
            if self.confirm(&c.formula) {
                return Some(Explanation {
                    strategy: id,
                    kind: ExplanationKind::Bugfix,
                    verified: true,
                    evidence: Evidence::Modification {
                        modified: c.formula,
                        edits: c.edits,
                        description: c.description,
                    },
                    message: c.message,
                });
            }
        }
        None
    }

    /// Profiles of ψ whose key occurs more often in ψ than in φ, and vice versa.
    pub fn unmatched(&self) -> (Vec<&AtomProfile>, Vec<&AtomProfile>) {
        (
            crate::profile::unmatched(&self.psi_profile, &self.phi_profile),
            crate::profile::unmatched(&self.phi_profile, &self.psi_profile),
        )
    }
}

#[derive(Debug, Clone)]
pub struct ExplanationBundle {
    pub verdict: Verdict,
    pub explanations: Vec<Explanation>,
    pub necessity: Option<NecessityReport>,
    pub candidates_tried: usize,
}

impl ExplanationBundle {
    pub fn strategies(&self) -> BTreeSet<StrategyId> {
        self.explanations.iter().filter(|e| e.verified).map(|e| e.strategy).collect()
    }

    pub fn counterexample(&self) -> Option<(&Structure, Option<Direction>)> {
        match &self.verdict {
            Verdict::NonEquivalent {
                counter: Some(s),
                direction,
            } => Some((s, *direction)),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct CounterJson<'a> {
    structure: &'a Structure,
    #[serde(skip_serializing_if = "Option::is_none")]
    direction: Option<Direction>,
    text: String,
}

#[derive(Serialize)]
struct BundleJson<'a> {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    certainty: Option<Certainty>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a UnknownReason>,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<CounterJson<'a>>,
    explanations: &'a [Explanation],
}

impl Serialize for ExplanationBundle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (verdict, certainty, reason) = match &self.verdict {
            Verdict::Equivalent { certainty } => ("equivalent", Some(*certainty), None),
            Verdict::NonEquivalent { .. } => ("non-equivalent", None, None),
            Verdict::Unknown { reason } => ("unknown", None, Some(reason)),
        };
        BundleJson {
            verdict,
            certainty,
            reason,
            counterexample: self.counterexample().map(|(structure, direction)| CounterJson {
                structure,
                direction,
                text: structure.to_string(),
            }),
            explanations: &self.explanations,
        }
        .serialize(s)
    }
}

type FamilyFn = for<'c, 'd> fn(&'c StrategyContext<'d>) -> Vec<Explanation>;

const FAMILIES: [FamilyFn; 4] = [symbol_strategies, quantifier_strategies, guard_strategies, boolean_strategies];

/// Runs all enabled strategy families on a pair already known to be
/// non-equivalent. Results are ordered by family, then strategy.
pub fn run_strategies(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let mut out: Vec<Explanation> = if ctx.cfg.first_only {
        let mut out = Vec::new();
        for fam in FAMILIES {
            out = fam(ctx);
            if out.iter().any(|e| e.verified) {
                out.truncate(1);
                break;
            }
        }
        out
    } else if ctx.cfg.parallel {
        FAMILIES.par_iter().map(|f| f(ctx)).collect::<Vec<_>>().concat()
    } else {
        FAMILIES.iter().flat_map(|f| f(ctx)).collect()
    };
    out.retain(|e| ctx.enabled(e.strategy));
    out
}

/// Decides the pair and, when it is non-equivalent, explains why.
#[allow(clippy::too_many_arguments)]
pub fn explain_nonequivalence(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    backend: &dyn SatBackend,
    cache: Option<&DecisionCache>,
    necessity_cache: Option<&NecessityCache>,
    cfg: &ExplainConfig,
) -> ExplanationBundle {
    let mut d = Decider::new(backend).with_timeout(cfg.decide_timeout);
    if let Some(c) = cache {
        d = d.with_cache(c);
    }
    if let Some(r) = &cfg.random {
        d = d.with_random(r);
    }
    let verdict = decide_equivalence(psi, phi, gamma, vocab, &d);
    explain_with_verdict(psi, phi, gamma, vocab, verdict, backend, cache, necessity_cache, cfg)
}

/// As [`explain_nonequivalence`] with the decision already made.
#[allow(clippy::too_many_arguments)]
pub fn explain_with_verdict(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    verdict: Verdict,
    backend: &dyn SatBackend,
    cache: Option<&DecisionCache>,
    necessity_cache: Option<&NecessityCache>,
    cfg: &ExplainConfig,
) -> ExplanationBundle {
    if !verdict.is_non_equivalent() {
        return ExplanationBundle {
            verdict,
            explanations: Vec::new(),
            necessity: None,
            candidates_tried: 0,
        };
    }
    let necessity = if cfg.strategies.contains(&StrategyId::S1) && symbols::has_missing_symbol(psi, phi) {
        necessary_symbols(psi, gamma, vocab, backend, &cfg.necessity, necessity_cache)
    } else {
        NecessityReport::default()
    };
    let ctx = StrategyContext::new(psi, phi, gamma, vocab, necessity, backend, cache, cfg);
    let explanations = run_strategies(&ctx);
    let candidates_tried = ctx.candidates_tried();
    ExplanationBundle {
        verdict,
        explanations,
        necessity: Some(ctx.necessity),
        candidates_tried,
    }
}

#[cfg(test)]
mod tests;
