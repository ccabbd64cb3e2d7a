use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, SymbolKind, Term, Theory, Vocabulary};

/// Why a satisfiability query was issued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryOrigin {
    Equivalence,
    Definability,
    StrategyCandidate,
}

/// A set of sentences to be checked for joint satisfiability.
#[derive(Debug, Clone)]
pub struct SatQuery {
    pub axioms: Vec<Formula>,
    pub vocab: Arc<Vocabulary>,
    pub origin: QueryOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("formula has free variable `{0}`; close it first")]
    OpenFormula(String),
    #[error("symbol `{0}` is not declared with this use in the vocabulary")]
    VocabularyMismatch(String),
    #[error("equality used but the vocabulary has no equality")]
    EqualityNotAllowed,
}

fn check_term(t: &Term, vocab: &Vocabulary) -> Result<(), QueryError> {
    match t {
        Term::Var(_) => Ok(()),
        Term::Const(c) => match vocab.lookup(c) {
            Some(SymbolKind::Constant { .. }) => Ok(()),
            _ => Err(QueryError::VocabularyMismatch(c.clone())),
        },
        Term::App(f, args) => match vocab.lookup(f) {
            Some(SymbolKind::Function { arity, .. }) if arity == args.len() => {
                args.iter().try_for_each(|a| check_term(a, vocab))
            }
            _ => Err(QueryError::VocabularyMismatch(f.clone())),
        },
    }
}

/// Checks that `f` is a sentence over `vocab`.
pub fn check_sentence(f: &Formula, vocab: &Vocabulary) -> Result<(), QueryError> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(QueryError::OpenFormula(v));
    }
    for (_, node) in f.atoms() {
        match node {
            Formula::Atom(r, args) => match vocab.lookup(r) {
                Some(SymbolKind::Relation { arity, .. }) if arity == args.len() => {
                    args.iter().try_for_each(|a| check_term(a, vocab))?
                }
                _ => return Err(QueryError::VocabularyMismatch(r.clone())),
            },
            Formula::Eq(a, b) => {
                if !vocab.with_equality() {
                    return Err(QueryError::EqualityNotAllowed);
                }
                check_term(a, vocab)?;
                check_term(b, vocab)?;
            }
            _ => unreachable!("atoms() yields atomic nodes"),
        }
    }
    Ok(())
}

impl SatQuery {
    pub fn new(axioms: Vec<Formula>, vocab: Arc<Vocabulary>, origin: QueryOrigin) -> Result<SatQuery, QueryError> {
        for a in &axioms {
            check_sentence(a, &vocab)?;
        }
        Ok(SatQuery { axioms, vocab, origin })
    }
}

/// Γ ∪ {¬(ψ ↔ φ)}: satisfiable exactly when ψ and φ differ modulo Γ.
pub fn encode_equivalence(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: Arc<Vocabulary>,
) -> Result<SatQuery, QueryError> {
    let mut axioms: Vec<Formula> = gamma.iter().cloned().collect();
    axioms.push(Formula::not(Formula::iff(psi.clone(), phi.clone())));
    SatQuery::new(axioms, vocab, QueryOrigin::Equivalence)
}
