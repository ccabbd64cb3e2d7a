use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{SymbolKind, Vocabulary};

/// A finite structure over `{0, .., size-1}`.
///
/// Relation and function tables are flat, indexed by the argument tuple read
/// as a base-`size` number with the first argument most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    size: usize,
    vocab: Arc<Vocabulary>,
    relations: Vec<Vec<bool>>,
    functions: Vec<Vec<usize>>,
    constants: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe size must be at least 1")]
    EmptyUniverse,
    #[error("`{0}` is not declared in the vocabulary")]
    UnknownSymbol(String),
    #[error("`{0}` is declared but has no interpretation")]
    Missing(String),
    #[error("tuple {tuple:?} for `{symbol}` has the wrong length or an element >= {size}")]
    BadTuple {
        symbol: String,
        tuple: Vec<usize>,
        size: usize,
    },
    #[error("function `{0}` is not total or has conflicting entries")]
    NotAFunction(String),
}

fn table_len(size: usize, arity: usize) -> usize {
    size.pow(arity as u32)
}

impl Structure {
    /// Empty relations, every function and constant mapped to element 0.
    pub fn new(vocab: Arc<Vocabulary>, size: usize) -> Structure {
        assert!(size >= 1, "universe must be nonempty");
        let relations = vocab
            .relations()
            .iter()
            .map(|(_, k)| vec![false; table_len(size, *k)])
            .collect();
        let functions = vocab
            .functions()
            .iter()
            .map(|(_, k)| vec![0; table_len(size, *k)])
            .collect();
        let constants = vec![0; vocab.constants().len()];
        Structure {
            size,
            vocab,
            relations,
            functions,
            constants,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vocab(&self) -> &Arc<Vocabulary> {
        &self.vocab
    }

    pub fn tuple_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn tuple_at(&self, arity: usize, mut index: usize) -> Vec<usize> {
        let mut t = vec![0; arity];
        for slot in t.iter_mut().rev() {
            *slot = index % self.size;
            index /= self.size;
        }
        t
    }

    pub fn relation_table(&self, rel: usize) -> &[bool] {
        &self.relations[rel]
    }

    pub fn relation_table_mut(&mut self, rel: usize) -> &mut [bool] {
        &mut self.relations[rel]
    }

    pub fn function_table(&self, func: usize) -> &[usize] {
        &self.functions[func]
    }

    pub fn function_table_mut(&mut self, func: usize) -> &mut [usize] {
        &mut self.functions[func]
    }

    pub fn constant_value(&self, c: usize) -> usize {
        self.constants[c]
    }

    pub fn set_constant_value(&mut self, c: usize, value: usize) {
        assert!(value < self.size);
        self.constants[c] = value;
    }

    pub fn holds(&self, rel: usize, args: &[usize]) -> bool {
        self.relations[rel][self.tuple_index(args)]
    }

    pub fn apply(&self, func: usize, args: &[usize]) -> usize {
        self.functions[func][self.tuple_index(args)]
    }

    fn kind(&self, name: &str) -> Result<SymbolKind, StructureError> {
        self.vocab
            .lookup(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))
    }

    fn check_tuple(&self, name: &str, t: &[usize], arity: usize) -> Result<(), StructureError> {
        if t.len() != arity || t.iter().any(|&e| e >= self.size) {
            return Err(StructureError::BadTuple {
                symbol: name.to_string(),
                tuple: t.to_vec(),
                size: self.size,
            });
        }
        Ok(())
    }

    /// Sets whether `args` is in relation `name`.
    pub fn set_relation(&mut self, name: &str, args: &[usize], value: bool) -> Result<(), StructureError> {
        match self.kind(name)? {
            SymbolKind::Relation { index, arity } => {
                self.check_tuple(name, args, arity)?;
                let i = self.tuple_index(args);
                self.relations[index][i] = value;
                Ok(())
            }
            _ => Err(StructureError::UnknownSymbol(name.to_string())),
        }
    }

    pub fn set_function(&mut self, name: &str, args: &[usize], value: usize) -> Result<(), StructureError> {
        match self.kind(name)? {
            SymbolKind::Function { index, arity } => {
                self.check_tuple(name, args, arity)?;
                self.check_tuple(name, &[value], 1)?;
                let i = self.tuple_index(args);
                self.functions[index][i] = value;
                Ok(())
            }
            _ => Err(StructureError::UnknownSymbol(name.to_string())),
        }
    }

    pub fn set_constant(&mut self, name: &str, value: usize) -> Result<(), StructureError> {
        match self.kind(name)? {
            SymbolKind::Constant { index } => {
                self.check_tuple(name, &[value], 1)?;
                self.constants[index] = value;
                Ok(())
            }
            _ => Err(StructureError::UnknownSymbol(name.to_string())),
        }
    }

    /// Tuples of relation `name` in ascending order.
    pub fn relation_tuples(&self, name: &str) -> Option<Vec<Vec<usize>>> {
        match self.vocab.lookup(name)? {
            SymbolKind::Relation { index, arity } => Some(
                self.relations[index]
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| self.tuple_at(arity, i))
                    .collect(),
            ),
            _ => None,
        }
    }

    /// Interprets every symbol of `target` by the symbol `source_name(s)` of
    /// this structure. Used to split a structure over a renamed vocabulary
    /// into its parts.
    pub fn reinterpret(
        &self,
        target: Arc<Vocabulary>,
        source_name: &dyn Fn(&str) -> String,
    ) -> Result<Structure, StructureError> {
        let mut out = Structure::new(target.clone(), self.size);
        for (i, (name, arity)) in target.relations().iter().enumerate() {
            let src = source_name(name);
            match self.kind(&src)? {
                SymbolKind::Relation { index, arity: a } if a == *arity => {
                    out.relations[i] = self.relations[index].clone();
                }
                _ => return Err(StructureError::Missing(src)),
            }
        }
        for (i, (name, arity)) in target.functions().iter().enumerate() {
            let src = source_name(name);
            match self.kind(&src)? {
                SymbolKind::Function { index, arity: a } if a == *arity => {
                    out.functions[i] = self.functions[index].clone();
                }
                _ => return Err(StructureError::Missing(src)),
            }
        }
        for (i, name) in target.constants().iter().enumerate() {
            let src = source_name(name);
            match self.kind(&src)? {
                SymbolKind::Constant { index } => out.constants[i] = self.constants[index],
                _ => return Err(StructureError::Missing(src)),
            }
        }
        Ok(out)
    }

    /// The same structure over a larger vocabulary. Symbols only in `target`
    /// get empty relations and the value 0.
    pub fn expanded(&self, target: Arc<Vocabulary>) -> Structure {
        let mut out = Structure::new(target.clone(), self.size);
        for (i, (name, _)) in target.relations().iter().enumerate() {
            if let Some(SymbolKind::Relation { index, arity }) = self.vocab.lookup(name) {
                if table_len(self.size, arity) == out.relations[i].len() {
                    out.relations[i] = self.relations[index].clone();
                }
            }
        }
        for (i, (name, _)) in target.functions().iter().enumerate() {
            if let Some(SymbolKind::Function { index, arity }) = self.vocab.lookup(name) {
                if table_len(self.size, arity) == out.functions[i].len() {
                    out.functions[i] = self.functions[index].clone();
                }
            }
        }
        for (i, name) in target.constants().iter().enumerate() {
            if let Some(SymbolKind::Constant { index }) = self.vocab.lookup(name) {
                out.constants[i] = self.constants[index];
            }
        }
        out
    }

    pub fn to_json(&self) -> StructureJson {
        let mut relations = BTreeMap::new();
        for (name, _) in self.vocab.relations() {
            relations.insert(name.clone(), self.relation_tuples(name).expect("declared"));
        }
        let mut functions = BTreeMap::new();
        for (i, (name, arity)) in self.vocab.functions().iter().enumerate() {
            let rows = self.functions[i]
                .iter()
                .enumerate()
                .map(|(idx, &v)| {
                    let mut row = self.tuple_at(*arity, idx);
                    row.push(v);
                    row
                })
                .collect();
            functions.insert(name.clone(), rows);
        }
        let constants = self
            .vocab
            .constants()
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), self.constants[i]))
            .collect();
        StructureJson {
            size: self.size,
            relations,
            functions,
            constants,
        }
    }

    pub fn from_json(json: &StructureJson, vocab: Arc<Vocabulary>) -> Result<Structure, StructureError> {
        if json.size == 0 {
            return Err(StructureError::EmptyUniverse);
        }
        let mut s = Structure::new(vocab.clone(), json.size);
        for (name, tuples) in &json.relations {
            for t in tuples {
                s.set_relation(name, t, true)?;
            }
        }
        for (i, (name, arity)) in vocab.functions().iter().enumerate() {
            let rows = json
                .functions
                .get(name)
                .ok_or_else(|| StructureError::Missing(name.clone()))?;
            let mut seen = vec![false; s.functions[i].len()];
            for row in rows {
                let Some((&value, args)) = row.split_last() else {
                    return Err(StructureError::NotAFunction(name.clone()));
                };
                s.set_function(name, args, value)?;
                let idx = s.tuple_index(args);
                if seen[idx] {
                    return Err(StructureError::NotAFunction(name.clone()));
                }
                seen[idx] = true;
            }
            if seen.iter().any(|b| !b) || args_mismatch(rows, *arity) {
                return Err(StructureError::NotAFunction(name.clone()));
            }
        }
        for name in json.functions.keys() {
            if !matches!(vocab.lookup(name), Some(SymbolKind::Function { .. })) {
                return Err(StructureError::UnknownSymbol(name.clone()));
            }
        }
        for c in vocab.constants() {
            let v = json.constants.get(c).ok_or_else(|| StructureError::Missing(c.clone()))?;
            s.set_constant(c, *v)?;
        }
        for c in json.constants.keys() {
            if !matches!(vocab.lookup(c), Some(SymbolKind::Constant { .. })) {
                return Err(StructureError::UnknownSymbol(c.clone()));
            }
        }
        Ok(s)
    }
}

fn args_mismatch(rows: &[Vec<usize>], arity: usize) -> bool {
    rows.iter().any(|r| r.len() != arity + 1)
}

/// Serialized form. Elements are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureJson {
    pub size: usize,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub functions: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, usize>,
}

impl Serialize for Structure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// Human-readable rendering with the universe written as `{1, .., n}`.
impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: &[usize]| {
            let parts: Vec<String> = t.iter().map(|e| (e + 1).to_string()).collect();
            if parts.len() == 1 {
                parts[0].clone()
            } else {
                format!("({})", parts.join(","))
            }
        };
        write!(f, "universe {{1..{}}}", self.size)?;
        for (name, _) in self.vocab.relations() {
            let tuples = self.relation_tuples(name).expect("declared");
            let items: Vec<String> = tuples.iter().map(|t| show(t)).collect();
            write!(f, "; {name} = {{{}}}", items.join(", "))?;
        }
        for (i, (name, arity)) in self.vocab.functions().iter().enumerate() {
            let items: Vec<String> = self.functions[i]
                .iter()
                .enumerate()
                .map(|(idx, v)| format!("{}->{}", show(&self.tuple_at(*arity, idx)), v + 1))
                .collect();
            write!(f, "; {name} = [{}]", items.join(", "))?;
        }
        for (i, c) in self.vocab.constants().iter().enumerate() {
            write!(f, "; {c} = {}", self.constants[i] + 1)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Arc<Vocabulary> {
        Arc::new(
            Vocabulary::new(true)
                .with_relation("R", 2)
                .unwrap()
                .with_function("f", 1)
                .unwrap()
                .with_constant("c")
                .unwrap(),
        )
    }

    #[test]
    fn json_round_trip() {
        let mut s = Structure::new(vocab(), 3);
        s.set_relation("R", &[0, 2], true).unwrap();
        s.set_relation("R", &[2, 1], true).unwrap();
        s.set_function("f", &[1], 2).unwrap();
        s.set_constant("c", 1).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["relations"]["R"], serde_json::json!([[0, 2], [2, 1]]));
        assert_eq!(json["functions"]["f"], serde_json::json!([[0, 0], [1, 2], [2, 0]]));
        let back = Structure::from_json(&serde_json::from_value(json).unwrap(), vocab()).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.to_string(), "universe {1..3}; R = {(1,3), (3,2)}; f = [1->1, 2->3, 3->1]; c = 2");
    }

    #[test]
    fn rejects_partial_functions_and_bad_tuples() {
        let mut json = Structure::new(vocab(), 2).to_json();
        json.functions.get_mut("f").unwrap().pop();
        assert!(matches!(
            Structure::from_json(&json, vocab()),
            Err(StructureError::NotAFunction(_))
        ));
        let mut s = Structure::new(vocab(), 2);
        assert!(s.set_relation("R", &[0, 2], true).is_err());
        assert!(s.set_relation("R", &[0], true).is_err());
    }

    #[test]
    fn tuple_indexing_is_row_major() {
        let s = Structure::new(vocab(), 3);
        assert_eq!(s.tuple_index(&[1, 2]), 5);
        assert_eq!(s.tuple_at(2, 5), vec![1, 2]);
    }
}
