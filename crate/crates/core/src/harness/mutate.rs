//! Edits that introduce typical mistakes into a correct formula. Each one
//! undoes one kind of bugfixing modification.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::explain::Family;
use crate::profile::{extract_guards, GuardKind};
use crate::syntax::{Address, Formula};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    QuantifierFlip,
    GuardDrop,
    GuardOperatorFlip,
    ImplicationSwap,
    NegationToggle,
    ArgumentPermutation,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::QuantifierFlip,
        Mutation::GuardDrop,
        Mutation::GuardOperatorFlip,
        Mutation::ImplicationSwap,
        Mutation::NegationToggle,
        Mutation::ArgumentPermutation,
    ];

    /// The strategy family expected to repair it.
    pub fn family(self) -> Family {
        match self {
            Mutation::QuantifierFlip => Family::Quantifiers,
            Mutation::GuardDrop | Mutation::GuardOperatorFlip => Family::Guards,
            Mutation::ImplicationSwap | Mutation::NegationToggle => Family::Boolean,
            Mutation::ArgumentPermutation => Family::Symbols,
        }
    }

    /// All distinct results of applying the mutation at one place, in
    /// pre-order of the places.
    pub fn apply(self, f: &Formula) -> Vec<Formula> {
        let raw = match self {
            Mutation::QuantifierFlip => quantifier_flips(f),
            Mutation::GuardDrop => guard_drops(f),
            Mutation::GuardOperatorFlip => guard_operator_flips(f),
            Mutation::ImplicationSwap => implication_swaps(f),
            Mutation::NegationToggle => negation_toggles(f),
            Mutation::ArgumentPermutation => argument_swaps(f),
        };
        let mut seen = BTreeSet::new();
        raw.into_iter().filter(|g| g != f && seen.insert(g.clone())).collect()
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mutation::QuantifierFlip => "quantifier-flip",
            Mutation::GuardDrop => "guard-drop",
            Mutation::GuardOperatorFlip => "guard-operator-flip",
            Mutation::ImplicationSwap => "implication-swap",
            Mutation::NegationToggle => "negation-toggle",
            Mutation::ArgumentPermutation => "argument-permutation",
        })
    }
}

fn quantifier_flips(f: &Formula) -> Vec<Formula> {
    f.nodes()
        .into_iter()
        .filter_map(|(addr, node)| match node {
            Formula::Quant(q, v, body) => f.replaced(&addr, Formula::Quant(q.dual(), v.clone(), body.clone())),
            _ => None,
        })
        .collect()
}

fn guard_sites(f: &Formula) -> Vec<Address> {
    let mut out: Vec<Address> = extract_guards(f)
        .guards
        .iter()
        .filter(|r| r.kind == GuardKind::Guarded)
        .map(|r| r.guard.address.clone())
        .collect();
    out.sort();
    out.dedup();
    out
}

fn guard_drops(f: &Formula) -> Vec<Formula> {
    guard_sites(f)
        .into_iter()
        .filter_map(|g| {
            let parent = g.parent()?;
            let left = g.0.last() == Some(&0);
            let after = match f.at(&parent)? {
                Formula::And(l, r) => {
                    if left {
                        (**r).clone()
                    } else {
                        (**l).clone()
                    }
                }
                Formula::Implies(_, r) if left => (**r).clone(),
                _ => return None,
            };
            f.replaced(&parent, after)
        })
        .collect()
}

fn guard_operator_flips(f: &Formula) -> Vec<Formula> {
    guard_sites(f)
        .into_iter()
        .filter_map(|g| {
            let parent = g.parent()?;
            let left = g.0.last() == Some(&0);
            let after = match f.at(&parent)? {
                Formula::Implies(l, r) if left => Formula::and((**l).clone(), (**r).clone()),
                Formula::And(l, r) if left => Formula::implies((**l).clone(), (**r).clone()),
                Formula::And(l, r) => Formula::implies((**r).clone(), (**l).clone()),
                _ => return None,
            };
            f.replaced(&parent, after)
        })
        .collect()
}

fn implication_swaps(f: &Formula) -> Vec<Formula> {
    f.nodes()
        .into_iter()
        .filter_map(|(addr, node)| match node {
            Formula::Implies(l, r) => f.replaced(&addr, Formula::implies((**r).clone(), (**l).clone())),
            _ => None,
        })
        .collect()
}

fn negation_toggles(f: &Formula) -> Vec<Formula> {
    f.atoms()
        .into_iter()
        .filter_map(|(addr, atom)| {
            let atom = atom.clone();
            match addr.parent() {
                Some(p) if matches!(f.at(&p), Some(Formula::Not(_))) => f.replaced(&p, atom),
                _ => f.replaced(&addr, Formula::not(atom)),
            }
        })
        .collect()
}

fn argument_swaps(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    for (addr, atom) in f.atoms() {
        let Formula::Atom(r, args) = atom else { continue };
        for i in 0..args.len() {
            for j in i + 1..args.len() {
                if args[i] == args[j] {
                    continue;
                }
                let mut a = args.clone();
                a.swap(i, j);
                out.extend(f.replaced(&addr, Formula::Atom(r.clone(), a)));
            }
        }
    }
    out
}
