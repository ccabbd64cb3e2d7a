use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("symbol `{0}` is declared more than once")]
    Duplicate(String),
    #[error("function `{0}` must have arity >= 1 (use a constant instead)")]
    NullaryFunction(String),
    #[error("`{0}` is not a valid identifier")]
    BadIdentifier(String),
}

/// What a declared name stands for, plus its position in the declaration list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Relation { index: usize, arity: usize },
    Function { index: usize, arity: usize },
    Constant { index: usize },
}

/// A first-order signature: relation, function and constant symbols, and
/// whether the equality symbol may be used.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    relations: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    constants: Vec<String>,
    with_equality: bool,
    index: HashMap<String, SymbolKind>,
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Vocabulary {
    pub fn new(with_equality: bool) -> Self {
        Vocabulary {
            with_equality,
            ..Default::default()
        }
    }

    pub fn with_relation(mut self, name: &str, arity: usize) -> Result<Self, VocabError> {
        self.add_relation(name, arity)?;
        Ok(self)
    }

    pub fn with_function(mut self, name: &str, arity: usize) -> Result<Self, VocabError> {
        self.add_function(name, arity)?;
        Ok(self)
    }

    pub fn with_constant(mut self, name: &str) -> Result<Self, VocabError> {
        self.add_constant(name)?;
        Ok(self)
    }

    fn check_new(&self, name: &str) -> Result<(), VocabError> {
        if !is_identifier(name) || is_keyword(name) {
            return Err(VocabError::BadIdentifier(name.to_string()));
        }
        if self.index.contains_key(name) {
            return Err(VocabError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    pub fn add_relation(&mut self, name: &str, arity: usize) -> Result<(), VocabError> {
        self.check_new(name)?;
        let index = self.relations.len();
        self.relations.push((name.to_string(), arity));
        self.index
            .insert(name.to_string(), SymbolKind::Relation { index, arity });
        Ok(())
    }

    pub fn add_function(&mut self, name: &str, arity: usize) -> Result<(), VocabError> {
        self.check_new(name)?;
        if arity == 0 {
            return Err(VocabError::NullaryFunction(name.to_string()));
        }
        let index = self.functions.len();
        self.functions.push((name.to_string(), arity));
        self.index
            .insert(name.to_string(), SymbolKind::Function { index, arity });
        Ok(())
    }

    pub fn add_constant(&mut self, name: &str) -> Result<(), VocabError> {
        self.check_new(name)?;
        let index = self.constants.len();
        self.constants.push(name.to_string());
        self.index
            .insert(name.to_string(), SymbolKind::Constant { index });
        Ok(())
    }

    pub fn set_equality(&mut self, with_equality: bool) {
        self.with_equality = with_equality;
    }

    pub fn with_equality(&self) -> bool {
        self.with_equality
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn functions(&self) -> &[(String, usize)] {
        &self.functions
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolKind> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// All declared names in declaration order: relations, functions, constants.
    pub fn symbol_names(&self) -> impl Iterator<Item = &str> {
        self.relations
            .iter()
            .map(|(n, _)| n.as_str())
            .chain(self.functions.iter().map(|(n, _)| n.as_str()))
            .chain(self.constants.iter().map(String::as_str))
    }

    /// A name not yet declared, derived from `base`.
    pub fn fresh_name(&self, base: &str, avoid: &dyn Fn(&str) -> bool) -> String {
        let base = if is_identifier(base) { base } else { "s" };
        if !self.contains(base) && !avoid(base) && !is_keyword(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}_{i}"))
            .find(|n| !self.contains(n) && !avoid(n))
            .expect("unbounded name supply")
    }

    /// Same symbols with the same arities, regardless of declaration order.
    pub fn same_symbols(&self, other: &Vocabulary) -> bool {
        self.with_equality == other.with_equality
            && self.index.len() == other.index.len()
            && self.index.iter().all(|(name, kind)| {
                match (kind, other.index.get(name)) {
                    (SymbolKind::Relation { arity: a, .. }, Some(SymbolKind::Relation { arity: b, .. }))
                    | (SymbolKind::Function { arity: a, .. }, Some(SymbolKind::Function { arity: b, .. })) => a == b,
                    (SymbolKind::Constant { .. }, Some(SymbolKind::Constant { .. })) => true,
                    _ => false,
                }
            })
    }

    /// Rebuilds the vocabulary keeping only symbols accepted by `keep`.
    pub fn filtered(&self, keep: impl Fn(&str) -> bool) -> Vocabulary {
        let mut out = Vocabulary::new(self.with_equality);
        for (n, a) in &self.relations {
            if keep(n) {
                out.add_relation(n, *a).expect("names were distinct");
            }
        }
        for (n, a) in &self.functions {
            if keep(n) {
                out.add_function(n, *a).expect("names were distinct");
            }
        }
        for n in &self.constants {
            if keep(n) {
                out.add_constant(n).expect("names were distinct");
            }
        }
        out
    }
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.same_symbols(other)
    }
}

impl Eq for Vocabulary {}

pub(crate) fn is_keyword(name: &str) -> bool {
    matches!(name, "forall" | "exists")
}

/// JSON shape of a vocabulary:
/// `{"relations": {"P": 1}, "functions": {"f": 1}, "constants": ["c"], "equality": true}`.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct VocabularySpec {
    #[serde(default)]
    pub relations: std::collections::BTreeMap<String, usize>,
    #[serde(default)]
    pub functions: std::collections::BTreeMap<String, usize>,
    #[serde(default)]
    pub constants: Vec<String>,
    #[serde(default = "default_true")]
    pub equality: bool,
}

fn default_true() -> bool {
    true
}

impl TryFrom<VocabularySpec> for Vocabulary {
    type Error = VocabError;

    fn try_from(spec: VocabularySpec) -> Result<Self, Self::Error> {
        let mut v = Vocabulary::new(spec.equality);
        for (n, a) in &spec.relations {
            v.add_relation(n, *a)?;
        }
        for (n, a) in &spec.functions {
            v.add_function(n, *a)?;
        }
        for n in &spec.constants {
            v.add_constant(n)?;
        }
        Ok(v)
    }
}

impl From<&Vocabulary> for VocabularySpec {
    fn from(v: &Vocabulary) -> Self {
        VocabularySpec {
            relations: v.relations.iter().cloned().collect(),
            functions: v.functions.iter().cloned().collect(),
            constants: v.constants.clone(),
            equality: v.with_equality,
        }
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VocabularySpec::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let spec = VocabularySpec::deserialize(d)?;
        Vocabulary::try_from(spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_distinct_across_kinds() {
        let v = Vocabulary::new(true).with_relation("P", 1).unwrap();
        assert_eq!(
            v.clone().with_constant("P").unwrap_err(),
            VocabError::Duplicate("P".into())
        );
        assert!(v.clone().with_function("f", 0).is_err());
        assert!(v.with_relation("forall", 1).is_err());
    }

    #[test]
    fn json_round_trip() {
        let v = Vocabulary::new(true)
            .with_relation("G", 2)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c")
            .unwrap();
        let text = serde_json::to_string(&v).unwrap();
        let back: Vocabulary = serde_json::from_str(&text).unwrap();
        assert_eq!(v, back);
        assert_eq!(back.lookup("f"), Some(SymbolKind::Function { index: 0, arity: 1 }));
    }

    #[test]
    fn fresh_names_avoid_declared_symbols() {
        let v = Vocabulary::new(true).with_relation("E", 2).unwrap();
        assert_eq!(v.fresh_name("E", &|_| false), "E_1");
        assert_eq!(v.fresh_name("F", &|_| false), "F");
    }
}
