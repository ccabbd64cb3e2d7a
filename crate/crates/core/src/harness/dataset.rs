//! JSON-lines datasets of (id, vocabulary, Γ, ψ, φ) records.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::prover::cache_key;
use crate::syntax::{parse, Formula, Theory, Vocabulary, VocabularySpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub id: String,
    pub vocabulary: Vocabulary,
    pub gamma: Theory,
    /// The solution.
    pub psi: Formula,
    /// The attempt.
    pub phi: Formula,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Number(i64),
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: RawId,
    vocabulary: VocabularySpec,
    #[serde(default)]
    gamma: Vec<String>,
    psi: String,
    phi: String,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    vocabulary: &'a Vocabulary,
    gamma: Vec<String>,
    psi: String,
    phi: String,
}

/// A problem with one line of a dataset file. Lines are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Default)]
pub struct Dataset {
    pub records: Vec<PairRecord>,
    pub errors: Vec<LineError>,
}

impl PairRecord {
    /// Parses one JSON object.
    pub fn from_json(text: &str) -> Result<PairRecord, String> {
        let raw: RawRecord = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let id = match raw.id {
            RawId::Text(s) => s,
            RawId::Number(n) => n.to_string(),
        };
        let vocabulary = Vocabulary::try_from(raw.vocabulary).map_err(|e| format!("vocabulary: {e}"))?;
        let formula = |what: &str, s: &str| parse(s, &vocabulary).map_err(|e| format!("{what}: {e}"));
        let mut axioms = Vec::new();
        for (i, g) in raw.gamma.iter().enumerate() {
            let a = formula(&format!("gamma[{i}]"), g)?;
            if let Some(v) = a.free_variables().first() {
                return Err(format!("gamma[{i}]: axiom has free variable `{v}`"));
            }
            axioms.push(a);
        }
        Ok(PairRecord {
            psi: formula("psi", &raw.psi)?,
            phi: formula("phi", &raw.phi)?,
            gamma: Theory::new(axioms),
            vocabulary,
            id,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RecordOut {
            id: &self.id,
            vocabulary: &self.vocabulary,
            gamma: self.gamma.iter().map(|a| a.to_string()).collect(),
            psi: self.psi.to_string(),
            phi: self.phi.to_string(),
        })
        .expect("records serialize")
    }

    /// Identifies records equal up to renaming of bound variables.
    pub fn distinct_key(&self) -> String {
        cache_key(&self.psi, &self.phi, &self.gamma)
    }
}

/// Parses a JSON-lines text. Blank lines are skipped.
pub fn parse_dataset(text: &str) -> Dataset {
    let mut ds = Dataset::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match PairRecord::from_json(line) {
            Ok(r) => ds.records.push(r),
            Err(message) => ds.errors.push(LineError { line: i + 1, message }),
        }
    }
    ds
}

pub fn load_dataset(path: &Path) -> std::io::Result<Dataset> {
    Ok(parse_dataset(&std::fs::read_to_string(path)?))
}

pub fn write_dataset(records: &[PairRecord]) -> String {
    records.iter().map(|r| r.to_json() + "\n").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"id": 7, "vocabulary": {"relations": {"P": 1, "Q": 1}}, "gamma": ["forall x P(x)"], "psi": "forall x Q(x)", "phi": "forall y Q(y)"}"#;

    #[test]
    fn empty_file() {
        let ds = parse_dataset("");
        assert!(ds.records.is_empty() && ds.errors.is_empty());
    }

    #[test]
    fn one_record() {
        let ds = parse_dataset(&format!("{LINE}\n\n"));
        assert!(ds.errors.is_empty());
        assert_eq!(ds.records.len(), 1);
        let r = &ds.records[0];
        assert_eq!(r.id, "7");
        assert_eq!(r.gamma.len(), 1);
    }

    #[test]
    fn undeclared_symbol_names_line_and_symbol() {
        let bad = r#"{"id": "b", "vocabulary": {"relations": {"P": 1}}, "psi": "forall x P(x)", "phi": "forall x R(x)"}"#;
        let ds = parse_dataset(&format!("{LINE}\n{bad}\n"));
        assert_eq!(ds.records.len(), 1);
        assert_eq!(ds.errors.len(), 1);
        assert_eq!(ds.errors[0].line, 2);
        assert!(ds.errors[0].message.contains("`R`"), "{}", ds.errors[0]);
        assert!(ds.errors[0].to_string().starts_with("line 2: phi:"));
    }

    #[test]
    fn open_axiom_is_rejected() {
        let bad = r#"{"id": "b", "vocabulary": {"relations": {"P": 1}}, "gamma": ["P(x)"], "psi": "P(x)", "phi": "P(x)"}"#;
        assert_eq!(parse_dataset(bad).errors.len(), 1);
    }

    #[test]
    fn jsonl_roundtrip() {
        let ds = parse_dataset(LINE);
        let again = parse_dataset(&write_dataset(&ds.records));
        assert_eq!(again.records, ds.records);
    }

    #[test]
    fn distinct_up_to_alpha() {
        let a = parse_dataset(LINE).records.remove(0);
        let mut b = a.clone();
        b.phi = parse("forall z Q(z)", &b.vocabulary).unwrap();
        assert_eq!(a.distinct_key(), b.distinct_key());
        b.phi = parse("exists z Q(z)", &b.vocabulary).unwrap();
        assert_ne!(a.distinct_key(), b.distinct_key());
    }
}
