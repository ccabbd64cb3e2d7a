//! The bundled exercise scenarios: vocabulary, background theory and
//! solution formulas for scenarios E-1 to E-14.

use serde::Deserialize;
use thiserror::Error;

use super::dataset::PairRecord;
use crate::syntax::{parse, Formula, ParseError, Theory, Vocabulary, VocabularySpec};

const CORPUS_JSON: &str = include_str!("../../data/corpus.json");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus data is malformed: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{scenario}: {source}")]
    Vocabulary {
        scenario: String,
        source: crate::syntax::VocabError,
    },
    #[error("{scenario}: cannot parse `{text}`: {source}")]
    Parse {
        scenario: String,
        text: String,
        source: ParseError,
    },
}

#[derive(Deserialize)]
struct RawScenario {
    id: String,
    name: String,
    vocabulary: VocabularySpec,
    theory: Vec<String>,
    solutions: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// `E-<scenario>-<k>`.
    pub id: String,
    pub text: String,
    pub formula: Formula,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub name: String,
    pub vocabulary: Vocabulary,
    pub theory: Theory,
    pub theory_text: Vec<String>,
    pub solutions: Vec<Solution>,
}

/// Parses the bundled corpus.
pub fn corpus() -> Result<Vec<Scenario>, CorpusError> {
    let raw: Vec<RawScenario> = serde_json::from_str(CORPUS_JSON)?;
    raw.into_iter()
        .map(|r| {
            let vocabulary = Vocabulary::try_from(r.vocabulary).map_err(|source| CorpusError::Vocabulary {
                scenario: r.id.clone(),
                source,
            })?;
            let parse_all = |texts: &[String]| -> Result<Vec<Formula>, CorpusError> {
                texts
                    .iter()
                    .map(|t| {
                        parse(t, &vocabulary).map_err(|source| CorpusError::Parse {
                            scenario: r.id.clone(),
                            text: t.clone(),
                            source,
                        })
                    })
                    .collect()
            };
            let theory = Theory::new(parse_all(&r.theory)?);
            let solutions = parse_all(&r.solutions)?
                .into_iter()
                .zip(&r.solutions)
                .enumerate()
                .map(|(k, (formula, text))| Solution {
                    id: format!("{}-{}", r.id, k + 1),
                    text: text.clone(),
                    formula,
                })
                .collect();
            Ok(Scenario {
                id: r.id,
                name: r.name,
                vocabulary,
                theory,
                theory_text: r.theory,
                solutions,
            })
        })
        .collect()
}

impl Scenario {
    pub fn pair(&self, id: String, psi: &Formula, phi: Formula) -> PairRecord {
        PairRecord {
            id,
            vocabulary: self.vocabulary.clone(),
            gamma: self.theory.clone(),
            psi: psi.clone(),
            phi,
        }
    }
}

/// Every solution paired with itself.
pub fn self_pairs(scenarios: &[Scenario]) -> Vec<PairRecord> {
    scenarios
        .iter()
        .flat_map(|s| s.solutions.iter().map(move |sol| s.pair(sol.id.clone(), &sol.formula, sol.formula.clone())))
        .collect()
}
