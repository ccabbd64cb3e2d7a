use super::{apply_edits, Candidate, Edit, Explanation, StrategyContext, StrategyId};
use crate::syntax::{Address, Formula};

pub fn boolean_strategies(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let mut out = Vec::new();
    if ctx.enabled(StrategyId::B1) {
        out.extend(ctx.first_confirmed(StrategyId::B1, negation_candidates(ctx), ctx.cfg.caps.per_strategy));
    }
    if ctx.enabled(StrategyId::B2) {
        out.extend(ctx.first_confirmed(StrategyId::B2, swap_candidates(ctx), ctx.cfg.caps.per_strategy));
    }
    out
}

/// Non-negation nodes on the path to `addr`, from the node at `addr`
/// upwards, each with the number of negations directly above it.
fn negation_levels(f: &Formula, addr: &Address) -> Vec<(Address, usize)> {
    let mut path = vec![Address::root()];
    for i in 0..addr.len() {
        path.push(Address(addr.0[..=i].to_vec()));
    }
    let mut levels = Vec::new();
    let mut run = 0;
    for a in path {
        match f.at(&a) {
            Some(Formula::Not(_)) => run += 1,
            Some(_) => {
                levels.push((a, run));
                run = 0;
            }
            None => break,
        }
    }
    levels.reverse();
    levels
}

/// Adds or removes one negation directly above the node at `addr`.
fn toggle(f: &Formula, addr: &Address, run: usize) -> Option<Edit> {
    let node = f.at(addr)?.clone();
    if run % 2 == 1 {
        Edit::at(f, addr.parent()?, node)
    } else {
        Edit::at(f, addr.clone(), Formula::not(node))
    }
}

fn negation_candidates(ctx: &StrategyContext<'_>) -> Vec<Candidate> {
    let (only_psi, only_phi) = ctx.unmatched();
    let phi = &ctx.phi;
    let mut out = Vec::new();
    for a in &only_phi {
        for b in &only_psi {
            if b.symbol != a.symbol
                || b.valence == a.valence
                || b.prefix_type != a.prefix_type
                || b.fingerprint != a.fingerprint
            {
                continue;
            }
            let message = format!("Wrong negation prefix for {}", a.atom);
            let fl = negation_levels(phi, &a.address);
            let primary = toggle(phi, &a.address, fl[0].1)
                .and_then(|e| Candidate::single(phi, e, format!("toggle the negation of {}", a.atom), message.clone()));
            let primary_formula = primary.as_ref().map(|c| c.formula.clone());
            out.extend(primary);
            // Copy the negation pattern along ψ's path, bottom up.
            let pl = negation_levels(&ctx.psi, &b.address);
            let mut cur = phi.clone();
            let mut edits = Vec::new();
            for k in 0..fl.len().min(pl.len()) {
                if fl[k].1 % 2 == pl[k].1 % 2 {
                    continue;
                }
                let Some(e) = toggle(&cur, &fl[k].0, fl[k].1) else { break };
                let Some(next) = apply_edits(&cur, std::slice::from_ref(&e)) else { break };
                cur = next;
                edits.push(e);
            }
            if edits.is_empty() || primary_formula.as_ref() == Some(&cur) {
                continue;
            }
            out.extend(Candidate::chained(
                phi,
                edits,
                format!("negate along the path of {} as in ψ", a.atom),
                message,
            ));
        }
    }
    out
}

fn swap_candidates(ctx: &StrategyContext<'_>) -> Vec<Candidate> {
    let phi = &ctx.phi;
    let mut out = Vec::new();
    for (addr, node) in phi.nodes() {
        let Formula::Implies(l, r) = node else { continue };
        let after = Formula::implies((**r).clone(), (**l).clone());
        let Some(e) = Edit::at(phi, addr.clone(), after.clone()) else { continue };
        out.extend(Candidate::single(
            phi,
            e,
            format!("swap the implication {node} to {after}"),
            format!("Implication in wrong direction: {node}"),
        ));
    }
    out
}
