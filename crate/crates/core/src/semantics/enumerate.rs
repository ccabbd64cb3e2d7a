use std::sync::Arc;

use thiserror::Error;

use super::structure::Structure;
use crate::syntax::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("{count} structures of size {size} exceed the enumeration budget of {budget}")]
    BudgetExceeded { size: usize, count: u128, budget: u128 },
}

/// Number of structures of exactly `size` elements, saturating at `u128::MAX`.
pub fn structure_count(vocab: &Vocabulary, size: usize) -> u128 {
    let n = size as u128;
    let mut total: u128 = 1;
    let mut mul = |base: u128, exp: u128| {
        for _ in 0..exp {
            total = total.saturating_mul(base);
            if total == u128::MAX {
                return;
            }
        }
    };
    for (_, k) in vocab.relations() {
        mul(2, n.saturating_pow(*k as u32));
    }
    for (_, k) in vocab.functions() {
        mul(n, n.saturating_pow(*k as u32));
    }
    mul(n, vocab.constants().len() as u128);
    total
}

/// Every structure of one size, each exactly once, in a fixed order.
///
/// The structure is treated as one big odometer whose digits are relation
/// bits, then function table entries, then constants; the first digit moves
/// fastest.
pub struct StructureIter {
    current: Option<Structure>,
}

pub fn enumerate_structures(
    vocab: Arc<Vocabulary>,
    size: usize,
    budget: u128,
) -> Result<StructureIter, EnumError> {
    let count = structure_count(&vocab, size);
    if count > budget {
        return Err(EnumError::BudgetExceeded { size, count, budget });
    }
    Ok(StructureIter {
        current: Some(Structure::new(vocab, size)),
    })
}

fn advance(s: &mut Structure) -> bool {
    let n = s.size();
    let vocab = s.vocab().clone();
    for r in 0..vocab.relations().len() {
        for bit in s.relation_table_mut(r) {
            if !*bit {
                *bit = true;
                return true;
            }
            *bit = false;
        }
    }
    for f in 0..vocab.functions().len() {
        for v in s.function_table_mut(f) {
            if *v + 1 < n {
                *v += 1;
                return true;
            }
            *v = 0;
        }
    }
    for c in 0..vocab.constants().len() {
        let v = s.constant_value(c);
        if v + 1 < n {
            s.set_constant_value(c, v + 1);
            return true;
        }
        s.set_constant_value(c, 0);
    }
    false
}

impl Iterator for StructureIter {
    type Item = Structure;

    fn next(&mut self) -> Option<Structure> {
        let out = self.current.take()?;
        let mut next = out.clone();
        if advance(&mut next) {
            self.current = Some(next);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;

    fn count(v: Vocabulary, n: usize) -> usize {
        let v = Arc::new(v);
        let all: Vec<Structure> = enumerate_structures(v, n, 1 << 20).unwrap().collect();
        let distinct: HashSet<String> = all.iter().map(|s| serde_json::to_string(s).unwrap()).collect();
        assert_eq!(distinct.len(), all.len());
        all.len()
    }

    #[test]
    fn counts_match_the_closed_form() {
        assert_eq!(count(Vocabulary::new(true).with_relation("P", 1).unwrap(), 1), 2);
        assert_eq!(count(Vocabulary::new(true).with_relation("R", 2).unwrap(), 2), 16);
        assert_eq!(count(Vocabulary::new(true).with_constant("c").unwrap(), 2), 2);
        let v = Vocabulary::new(true)
            .with_relation("P", 1)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c")
            .unwrap();
        assert_eq!(structure_count(&v, 3), 8 * 27 * 3);
        assert_eq!(count(v, 3), 8 * 27 * 3);
        assert_eq!(count(Vocabulary::new(true), 4), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let v = Arc::new(Vocabulary::new(true).with_relation("R", 2).unwrap());
        assert!(matches!(
            enumerate_structures(v, 3, 100),
            Err(EnumError::BudgetExceeded { count: 512, .. })
        ));
    }
}
