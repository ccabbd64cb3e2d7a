//! Vocabularies, terms and formulas, the concrete syntax, and the syntactic
//! transformations the rest of the engine is built on.

mod ast;
mod parser;
mod print;
mod transform;
mod vocab;

pub use ast::{Address, Formula, Quantifier, SymbolUse, Term, Theory};
pub use parser::{parse, ParseError, ParseErrorKind};
pub use print::pretty;
pub use transform::{
    alpha_normalize, binder_counts, close_free_variables, fresh_variable, nnf, prenex_compose, prenex_decompose, rename_binder,
    rewrite_at, Closure, Prefix, RewriteError,
};
pub use vocab::{SymbolKind, VocabError, Vocabulary, VocabularySpec};

/// Parses every axiom and checks that each one is a sentence.
pub fn parse_theory<S: AsRef<str>>(axioms: &[S], vocab: &Vocabulary) -> Result<Theory, TheoryError> {
    let mut out = Vec::with_capacity(axioms.len());
    for (i, text) in axioms.iter().enumerate() {
        let f = parse(text.as_ref(), vocab).map_err(|e| TheoryError::Parse(i, e))?;
        if let Some(v) = f.free_variables().into_iter().next() {
            return Err(TheoryError::OpenAxiom(i, v));
        }
        out.push(f);
    }
    Ok(Theory::new(out))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("axiom {0}: {1}")]
    Parse(usize, ParseError),
    #[error("axiom {0} has free variable `{1}`")]
    OpenAxiom(usize, String),
}
