use std::collections::HashMap;

use itertools::Itertools;

use super::{Candidate, Edit, Evidence, Explanation, ExplanationKind, StrategyContext, StrategyId};
use crate::definability::{NecessityStatus, EQUALITY};
use crate::profile::{profile_at, AtomProfile, EQUALITY_SYMBOL};
use crate::syntax::{Formula, Term};

pub(super) fn has_missing_symbol(psi: &Formula, phi: &Formula) -> bool {
    let (a, b) = (psi.symbols(), phi.symbols());
    a.names().any(|n| !b.contains(n)) || (a.equality && !b.equality)
}

pub fn symbol_strategies(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let mut out = Vec::new();
    if ctx.enabled(StrategyId::S1) {
        out.extend(missing_symbols(ctx));
    }
    if ctx.enabled(StrategyId::S2) {
        out.extend(permuted_arguments(ctx));
    }
    if ctx.enabled(StrategyId::S3) {
        out.extend(renamed_relation(ctx));
    }
    if ctx.enabled(StrategyId::S4) {
        out.extend(different_terms(ctx));
    }
    out
}

fn missing_symbols(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let used = ctx.phi.symbols();
    let mut out = Vec::new();
    for s in &ctx.necessity.symbols {
        let absent = if s.symbol == EQUALITY {
            !used.equality
        } else {
            !used.contains(&s.symbol)
        };
        if !absent {
            continue;
        }
        let name = if s.symbol == EQUALITY { "equality" } else { s.symbol.as_str() };
        let (verified, message) = match s.status {
            NecessityStatus::Necessary => (true, format!("{name} does not occur in φ, but is required")),
            NecessityStatus::Unknown => (
                false,
                format!("{name} does not occur in φ and may be required (necessity not verified)"),
            ),
            NecessityStatus::NotShownNecessary => continue,
        };
        out.push(Explanation {
            strategy: StrategyId::S1,
            kind: ExplanationKind::Blocker,
            verified,
            evidence: Evidence::MissingSymbol {
                symbol: s.symbol.clone(),
            },
            message,
        });
    }
    out
}

fn rebuild(atom: &Formula, symbol: &str, args: Vec<Term>) -> Formula {
    if symbol == EQUALITY_SYMBOL && args.len() == 2 {
        let mut it = args.into_iter();
        let a = it.next().expect("two arguments");
        return Formula::Eq(a, it.next().expect("two arguments"));
    }
    match atom {
        Formula::Atom(..) | Formula::Eq(..) => Formula::Atom(symbol.to_string(), args),
        _ => unreachable!("profiles describe atoms"),
    }
}

fn permuted_arguments(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let (only_psi, only_phi) = ctx.unmatched();
    let caps = ctx.cfg.caps;
    let mut cands = Vec::new();
    for a in &only_phi {
        let k = a.args().len();
        if a.symbol == EQUALITY_SYMBOL || !(2..=caps.max_permuted_arity).contains(&k) {
            continue;
        }
        let targets: Vec<&&AtomProfile> = only_psi
            .iter()
            .filter(|b| b.symbol == a.symbol && b.valence == a.valence && b.args().len() == k)
            .collect();
        if targets.is_empty() {
            continue;
        }
        let args: Vec<Term> = a.args().into_iter().cloned().collect();
        for perm in (0..k).permutations(k).filter(|p| p.iter().enumerate().any(|(i, &j)| i != j)).take(caps.permutations) {
            let new_args: Vec<Term> = perm.iter().map(|&j| args[j].clone()).collect();
            let atom = rebuild(&a.atom, &a.symbol, new_args);
            let Some(phi2) = ctx.phi.replaced(&a.address, atom.clone()) else { continue };
            let Ok(prof) = profile_at(&phi2, &a.address) else { continue };
            if !targets.iter().any(|b| b.key() == prof.key() || b.prefix_type == prof.prefix_type) {
                continue;
            }
            let Some(edit) = Edit::at(&ctx.phi, a.address.clone(), atom.clone()) else { continue };
            let order: Vec<String> = perm.iter().map(|j| (j + 1).to_string()).collect();
            cands.extend(Candidate::single(
                &ctx.phi,
                edit,
                format!("permute the arguments of {} to {}", a.atom, atom),
                format!(
                    "Wrong quantification pattern due to permutation: the arguments of {} should appear in the order ({})",
                    a.atom,
                    order.join(",")
                ),
            ));
        }
    }
    ctx.first_confirmed(StrategyId::S2, cands, caps.per_strategy).into_iter().collect()
}

fn renamed_relation(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let (only_psi, only_phi) = ctx.unmatched();
    let mut cands = Vec::new();
    for a in &only_phi {
        if a.symbol == EQUALITY_SYMBOL {
            continue;
        }
        let mut seen = Vec::new();
        for b in &only_psi {
            if b.symbol == a.symbol
                || b.symbol == EQUALITY_SYMBOL
                || b.valence != a.valence
                || b.args().len() != a.args().len()
                || b.prefix_type != a.prefix_type
                || b.fingerprint != a.fingerprint
                || seen.contains(&b.symbol)
            {
                continue;
            }
            seen.push(b.symbol.clone());
            let atom = rebuild(&a.atom, &b.symbol, a.args().into_iter().cloned().collect());
            let Some(edit) = Edit::at(&ctx.phi, a.address.clone(), atom.clone()) else { continue };
            cands.extend(Candidate::single(
                &ctx.phi,
                edit,
                format!("replace {} by {}", a.symbol, b.symbol),
                format!("Wrong relation symbol used: {} instead of {}", a.symbol, b.symbol),
            ));
        }
    }
    ctx.first_confirmed(StrategyId::S3, cands, ctx.cfg.caps.per_strategy).into_iter().collect()
}

/// Maps variables of the ψ-atom `b` to variables of the φ-atom `a`: first
/// through argument positions holding plain variables on both sides, then
/// by rank in the atoms' quantifier prefixes.
fn variable_map(a: &AtomProfile, b: &AtomProfile) -> HashMap<String, String> {
    let mut m: HashMap<String, String> = HashMap::new();
    for (ta, tb) in a.args().into_iter().zip(b.args()) {
        if let (Some(va), Some(vb)) = (ta.as_var(), tb.as_var()) {
            m.entry(vb.to_string()).or_insert_with(|| va.to_string());
        }
    }
    for (rank, eb) in b.prefix.entries().iter().enumerate() {
        if m.contains_key(&eb.variable) {
            continue;
        }
        if let Some(ea) = a.prefix.entries().get(rank) {
            if ea.quantifier == eb.quantifier && !m.values().any(|v| v == &ea.variable) {
                m.insert(eb.variable.clone(), ea.variable.clone());
            }
        }
    }
    m
}

fn translate(t: &Term, m: &HashMap<String, String>, bound_in_psi: &dyn Fn(&str) -> bool) -> Option<Term> {
    match t {
        Term::Var(v) => match m.get(v) {
            Some(w) => Some(Term::Var(w.clone())),
            None if !bound_in_psi(v) => Some(Term::Var(v.clone())),
            None => None,
        },
        Term::Const(c) => Some(Term::Const(c.clone())),
        Term::App(f, args) => Some(Term::App(
            f.clone(),
            args.iter().map(|a| translate(a, m, bound_in_psi)).collect::<Option<_>>()?,
        )),
    }
}

fn different_terms(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let (only_psi, only_phi) = ctx.unmatched();
    let mut cands = Vec::new();
    for a in &only_phi {
        for b in &only_psi {
            if b.symbol != a.symbol || b.valence != a.valence || b.args().len() != a.args().len() {
                continue;
            }
            let differing: Vec<usize> = (0..a.fingerprint.len())
                .filter(|&i| a.fingerprint[i] != b.fingerprint[i])
                .collect();
            if differing.is_empty() {
                continue;
            }
            let m = variable_map(a, b);
            let bound = |v: &str| b.prefix.find(v).is_some();
            let Some(translated): Option<Vec<Term>> =
                b.args().into_iter().map(|t| translate(t, &m, &bound)).collect()
            else {
                continue;
            };
            let args: Vec<Term> = a.args().into_iter().cloned().collect();
            let mut variants: Vec<Vec<usize>> = vec![differing.clone()];
            if differing.len() > 1 {
                variants.extend(differing.iter().map(|&i| vec![i]));
            }
            for positions in variants {
                let mut new_args = args.clone();
                for &i in &positions {
                    new_args[i] = translated[i].clone();
                }
                let atom = rebuild(&a.atom, &a.symbol, new_args);
                let Some(edit) = Edit::at(&ctx.phi, a.address.clone(), atom.clone()) else { continue };
                let sym = if a.symbol == EQUALITY_SYMBOL { "=" } else { a.symbol.as_str() };
                cands.extend(Candidate::single(
                    &ctx.phi,
                    edit,
                    format!("replace {} by {}", a.atom, atom),
                    format!("Terms in {sym}(·) differ: {} instead of {}", a.atom, atom),
                ));
            }
        }
    }
    ctx.first_confirmed(StrategyId::S4, cands, ctx.cfg.caps.per_strategy).into_iter().collect()
}
