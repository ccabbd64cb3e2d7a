use std::sync::Arc;

use thiserror::Error;

use super::enumerate::{enumerate_structures, EnumError};
use super::eval::{CompiledFormula, CompiledTheory, EvalError};
use super::structure::Structure;
use crate::syntax::{close_free_variables, Formula, Theory, Vocabulary};

/// Structures per size the oracle is willing to enumerate by default.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedVerdict {
    /// A Γ-model on which the two formulas disagree.
    NonEquivalent(Structure),
    /// No distinguishing Γ-model up to this size.
    BoundedEquivalent(usize),
}

impl BoundedVerdict {
    pub fn witness(&self) -> Option<&Structure> {
        match self {
            BoundedVerdict::NonEquivalent(s) => Some(s),
            BoundedVerdict::BoundedEquivalent(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Smallest model (by size, then enumeration order) of a set of sentences.
pub fn brute_force_model(
    axioms: &[Formula],
    vocab: &Arc<Vocabulary>,
    max_size: usize,
    budget: u128,
) -> Result<Option<Structure>, OracleError> {
    let theory = CompiledTheory::compile(axioms, vocab)?;
    for n in 1..=max_size {
        for s in enumerate_structures(vocab.clone(), n, budget)? {
            if theory.holds(&s) {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}

/// Exhaustive equivalence check on all Γ-models of size at most `max_size`.
///
/// Free variables of ψ and φ are read as fresh constants, so a witness is a
/// structure over the vocabulary extended by those constants.
pub fn brute_force_verdict(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    max_size: usize,
    budget: u128,
) -> Result<BoundedVerdict, OracleError> {
    let (closed, closure) = close_free_variables(&[psi, phi], vocab);
    let vocab = Arc::new(closure.vocab);
    let theory = CompiledTheory::compile(gamma.iter(), &vocab)?;
    let psi = CompiledFormula::compile(&closed[0], &vocab)?;
    let phi = CompiledFormula::compile(&closed[1], &vocab)?;
    for n in 1..=max_size {
        for s in enumerate_structures(vocab.clone(), n, budget)? {
            if psi.holds(&s) != phi.holds(&s) && theory.holds(&s) {
                return Ok(BoundedVerdict::NonEquivalent(s));
            }
        }
    }
    Ok(BoundedVerdict::BoundedEquivalent(max_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval::eval_sentence;
    use crate::syntax::parse;

    fn vocab() -> Vocabulary {
        Vocabulary::new(true)
            .with_relation("P", 1)
            .unwrap()
            .with_relation("Q", 1)
            .unwrap()
    }

    fn p(s: &str) -> Formula {
        parse(s, &vocab()).unwrap()
    }

    #[test]
    fn forall_vs_exists_needs_two_elements() {
        let v = brute_force_verdict(&p("forall x P(x)"), &p("exists x P(x)"), &Theory::empty(), &vocab(), 2, 1 << 20)
            .unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.size(), 2);
        assert_eq!(w.relation_tuples("P").unwrap(), vec![vec![0]]);
    }

    #[test]
    fn identical_and_theory_implied_pairs() {
        let f = p("exists x (P(x) & Q(x))");
        assert_eq!(
            brute_force_verdict(&f, &f, &Theory::empty(), &vocab(), 3, 1 << 20).unwrap(),
            BoundedVerdict::BoundedEquivalent(3)
        );
        let gamma = Theory::new(vec![p("forall x P(x)")]);
        assert_eq!(
            brute_force_verdict(&p("forall x (Q(x) -> P(x))"), &p("forall x (P(x) | Q(x))"), &gamma, &vocab(), 3, 1 << 20)
                .unwrap(),
            BoundedVerdict::BoundedEquivalent(3)
        );
    }

    #[test]
    fn free_variables_become_constants() {
        let v = brute_force_verdict(&p("P(x)"), &p("Q(x)"), &Theory::empty(), &vocab(), 1, 1 << 20).unwrap();
        let w = v.witness().unwrap();
        assert!(w.vocab().contains("free_x"));
        let a = eval_sentence(w, &parse("P(free_x)", w.vocab()).unwrap()).unwrap();
        let b = eval_sentence(w, &parse("Q(free_x)", w.vocab()).unwrap()).unwrap();
        assert_ne!(a, b);
    }
}
