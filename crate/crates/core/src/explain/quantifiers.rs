use std::collections::BTreeSet;

use super::{Candidate, Edit, Evidence, Explanation, ExplanationKind, StrategyContext, StrategyId};
use crate::profile::AtomProfile;
use crate::syntax::{fresh_variable, prenex_compose, prenex_decompose, rename_binder, Formula, Quantifier};

pub fn quantifier_strategies(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let mut out = Vec::new();
    if ctx.enabled(StrategyId::Q1) {
        let cands = prefix_candidates(ctx, &ctx.phi);
        out.extend(ctx.first_confirmed(StrategyId::Q1, cands, ctx.cfg.caps.per_strategy));
    }
    if ctx.enabled(StrategyId::Q2) {
        out.extend(quantifier_order(ctx));
    }
    if ctx.enabled(StrategyId::Q3) {
        out.extend(free_variables(ctx));
    }
    out
}

fn show_prefix(prefix: &[(Quantifier, String)]) -> String {
    prefix.iter().map(|(q, v)| format!("{}{}", q.symbol(), v)).collect::<Vec<_>>().join(" ")
}

/// φ's matrix under ψ's quantifier kinds (by position) and under ψ's
/// literal prefix.
pub(super) fn prefix_candidates(ctx: &StrategyContext<'_>, phi: &Formula) -> Vec<Candidate> {
    let (Some((pp, _)), Some((fp, fm))) = (&ctx.psi_prenex, prenex_decompose(phi)) else {
        return Vec::new();
    };
    if pp == &fp {
        return Vec::new();
    }
    let mut prefixes = Vec::new();
    if pp.len() == fp.len() {
        prefixes.push(pp.iter().zip(&fp).map(|((q, _), (_, v))| (*q, v.clone())).collect::<Vec<_>>());
    }
    prefixes.push(pp.clone());
    let free: BTreeSet<String> = phi.free_variables().into_iter().collect();
    let mut out = Vec::new();
    for prefix in prefixes {
        let f = prenex_compose(&prefix, fm.clone());
        if f == *phi || f.free_variables().iter().any(|v| !free.contains(v)) {
            continue;
        }
        let shown = show_prefix(&prefix);
        let Some(edit) = Edit::at(phi, crate::syntax::Address::root(), f) else { continue };
        out.extend(Candidate::single(
            phi,
            edit,
            format!("replace the quantifier prefix {} by {}", show_prefix(&fp), shown),
            format!("Wrong quantifier prefix: use {shown}"),
        ));
    }
    out
}

fn quantifier_order(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let (only_psi, only_phi) = ctx.unmatched();
    let mut cands = Vec::new();
    for a in &only_phi {
        for b in &only_psi {
            if b.symbol != a.symbol
                || b.valence != a.valence
                || b.args().len() != a.args().len()
                || b.prefix_type == a.prefix_type
            {
                continue;
            }
            cands.extend(relabel(ctx, a, b));
        }
    }
    ctx.first_confirmed(StrategyId::Q2, cands, ctx.cfg.caps.per_strategy).into_iter().collect()
}

/// Rewrites the binders of `a`'s variables so that its prefix type becomes
/// `b`'s. Binders keep their places; each slot gets the quantifier and the
/// variable (by argument positions) the target prescribes.
fn relabel(ctx: &StrategyContext<'_>, a: &AtomProfile, b: &AtomProfile) -> Option<Candidate> {
    let phi = &ctx.phi;
    // Slots: prefix entries of `a` covering argument positions.
    let args = a.args();
    let slots: Vec<_> = a
        .prefix
        .entries()
        .iter()
        .filter_map(|e| {
            let ps: BTreeSet<usize> = (0..args.len())
                .filter(|&j| args[j].as_var() == Some(e.variable.as_str()))
                .map(|j| j + 1)
                .collect();
            (!ps.is_empty()).then_some((e, ps))
        })
        .collect();
    if slots.len() != b.prefix_type.0.len() {
        return None;
    }
    // sigma[i] = slot whose positions the target's i-th entry covers.
    let mut sigma = Vec::new();
    for (_, ps) in &b.prefix_type.0 {
        sigma.push(slots.iter().position(|(_, qs)| qs == ps)?);
    }
    let polarity = |i: usize| {
        let e = slots[i].0;
        match phi.at(&e.binder) {
            Some(Formula::Quant(q, _, _)) => *q == e.quantifier,
            _ => true,
        }
    };
    let syntactic = |i: usize, q: Quantifier| if polarity(i) { q } else { q.dual() };
    let identity = sigma.iter().enumerate().all(|(i, &j)| i == j);

    let mut cur = phi.clone();
    let mut edits = Vec::new();
    if identity {
        for (i, (q, _)) in b.prefix_type.0.iter().enumerate() {
            let e = slots[i].0;
            if e.quantifier == *q {
                continue;
            }
            let Formula::Quant(_, v, body) = cur.at(&e.binder)?.clone() else { return None };
            let edit = Edit::at(&cur, e.binder.clone(), Formula::Quant(syntactic(i, *q), v, body))?;
            cur = super::apply_edits(&cur, std::slice::from_ref(&edit))?;
            edits.push(edit);
        }
    } else {
        let mut taken = cur.all_variables();
        let mut fresh = Vec::new();
        for (e, _) in &slots {
            let w = fresh_variable(&e.variable, &taken);
            taken.insert(w.clone());
            cur = rename_binder(&cur, &e.binder, &w)?;
            fresh.push(w);
        }
        for (i, (q, _)) in b.prefix_type.0.iter().enumerate() {
            let addr = &slots[i].0.binder;
            let Formula::Quant(_, _, body) = cur.at(addr)?.clone() else { return None };
            cur = cur.replaced(addr, Formula::Quant(syntactic(i, *q), fresh[sigma[i]].clone(), body))?;
        }
        let top = slots.iter().map(|(e, _)| &e.binder).min_by_key(|a| a.len())?;
        edits.push(Edit::at(phi, top.clone(), cur.at(top)?.clone())?);
    }
    if edits.is_empty() {
        return None;
    }
    Candidate::chained(
        phi,
        edits,
        format!("requantify {} as {}", a.atom, b.prefix_type),
        format!("Wrong quantification pattern for {}", a.atom),
    )
}

fn free_variables(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let fp: Vec<String> = ctx.psi.free_variables();
    let ff: Vec<String> = ctx.phi.free_variables();
    let only_psi: Vec<String> = fp.iter().filter(|v| !ff.contains(v)).cloned().collect();
    let only_phi: Vec<String> = ff.iter().filter(|v| !fp.contains(v)).cloned().collect();
    if only_psi.is_empty() && only_phi.is_empty() {
        return Vec::new();
    }
    let mut parts = Vec::new();
    if !only_phi.is_empty() {
        parts.push(format!("{} {} free only in φ", only_phi.join(", "), if only_phi.len() == 1 { "is" } else { "are" }));
    }
    if !only_psi.is_empty() {
        parts.push(format!("{} {} free only in ψ", only_psi.join(", "), if only_psi.len() == 1 { "is" } else { "are" }));
    }
    vec![Explanation {
        strategy: StrategyId::Q3,
        kind: ExplanationKind::Blocker,
        verified: true,
        evidence: Evidence::FreeVariables { only_in_psi: only_psi, only_in_phi: only_phi },
        message: parts.join("; "),
    }]
}
