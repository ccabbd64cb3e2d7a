use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;

use super::quantifiers::prefix_candidates;
use super::{Candidate, Edit, Explanation, StrategyContext, StrategyId};
use crate::profile::{extract_guards, formula_profile, GuardRecord};
use crate::syntax::{Address, Formula, Quantifier, Term};

pub fn guard_strategies(ctx: &StrategyContext<'_>) -> Vec<Explanation> {
    let caps = ctx.cfg.caps;
    let mut out = Vec::new();
    if ctx.enabled(StrategyId::G1) {
        let mut cands = add_guard_candidates(ctx, &ctx.phi);
        cands.extend(remove_guard_candidates(ctx, &ctx.phi));
        out.extend(ctx.first_confirmed(StrategyId::G1, cands, caps.per_strategy));
    }
    if ctx.enabled(StrategyId::G2) {
        out.extend(ctx.first_confirmed(StrategyId::G2, flip_operator_candidates(ctx), caps.per_strategy));
    }
    if ctx.enabled(StrategyId::Q1G1) {
        let mut cands = Vec::new();
        for q in prefix_candidates(ctx, &ctx.phi) {
            let mut gs = add_guard_candidates(ctx, &q.formula);
            gs.extend(remove_guard_candidates(ctx, &q.formula));
            for g in gs {
                let mut edits = q.edits.clone();
                edits.extend(g.edits);
                cands.extend(Candidate::chained(
                    &ctx.phi,
                    edits,
                    format!("{}; {}", q.description, g.description),
                    format!("{}; {}", q.message, g.message),
                ));
            }
        }
        out.extend(ctx.first_confirmed(StrategyId::Q1G1, cands, caps.combined));
    }
    out
}

fn quantifier_word(q: Quantifier) -> &'static str {
    match q {
        Quantifier::Forall => "universal",
        Quantifier::Exists => "existential",
    }
}

fn map_term(t: &Term, m: &HashMap<String, String>) -> Term {
    t.map_vars(&|v| Term::Var(m.get(v).cloned().unwrap_or_else(|| v.to_string())))
}

fn map_atom(atom: &Formula, m: &HashMap<String, String>) -> Formula {
    match atom {
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(|t| map_term(t, m)).collect()),
        Formula::Eq(a, b) => Formula::Eq(map_term(a, m), map_term(b, m)),
        other => other.clone(),
    }
}

/// Guards of ψ transported to φ-atoms with the same profile whose
/// corresponding position is unguarded in `base`.
fn add_guard_candidates(ctx: &StrategyContext<'_>, base: &Formula) -> Vec<Candidate> {
    let profile = formula_profile(base);
    let guards = extract_guards(base);
    let cap = ctx.cfg.caps.per_strategy;
    let mut out: Vec<Candidate> = Vec::new();
    let mut seen_atoms = BTreeSet::new();
    for a in &profile {
        if !seen_atoms.insert(a.address.clone()) {
            continue;
        }
        let args = a.args();
        for (i, arg) in args.iter().enumerate() {
            let Some(z) = arg.as_var() else { continue };
            if a.prefix.find(z).is_none() || guards.is_guarded(&a.address, z) {
                continue;
            }
            for b in ctx.psi_profile.iter().filter(|b| b.key() == a.key()) {
                let Some(zb) = b.args()[i].as_var() else { continue };
                for rec in ctx
                    .psi_guards
                    .guards
                    .iter()
                    .filter(|r| r.guarded.address == b.address && r.variable == zb)
                {
                    for g in transport_guard(base, a, b, rec, z) {
                        if out.len() >= cap * 2 {
                            return out;
                        }
                        out.extend(insert_guard(base, &a.address, g, z));
                    }
                }
            }
        }
    }
    out
}

/// The guard of `rec` rewritten into `base`'s variables: positions shared
/// by the two atoms fix most variables; the remaining ones range over
/// injective choices among the variables bound above the φ-atom.
fn transport_guard(
    base: &Formula,
    a: &crate::profile::AtomProfile,
    b: &crate::profile::AtomProfile,
    rec: &GuardRecord,
    z: &str,
) -> Vec<Formula> {
    let mut m: HashMap<String, String> = HashMap::new();
    m.insert(rec.variable.clone(), z.to_string());
    for (ta, tb) in a.args().into_iter().zip(b.args()) {
        if let (Some(va), Some(vb)) = (ta.as_var(), tb.as_var()) {
            m.entry(vb.to_string()).or_insert_with(|| va.to_string());
        }
    }
    let open: Vec<String> = rec
        .guard
        .prefix
        .entries()
        .iter()
        .map(|e| e.variable.clone())
        .filter(|v| !m.contains_key(v))
        .collect();
    if open.is_empty() {
        return vec![map_atom(&rec.guard.atom, &m)];
    }
    let used: BTreeSet<&String> = m.values().collect();
    let pool: Vec<String> = base
        .binders_above(&a.address)
        .into_iter()
        .map(|(_, _, v)| v)
        .filter(|v| !used.contains(v))
        .unique()
        .collect();
    let mut out = Vec::new();
    for choice in pool.iter().permutations(open.len()).take(16) {
        let mut m2 = m.clone();
        for (v, w) in open.iter().zip(choice) {
            m2.insert(v.clone(), w.clone());
        }
        out.push(map_atom(&rec.guard.atom, &m2));
    }
    out
}

/// Puts `guard` directly below the innermost binder of its variables on
/// the path to `atom`: `G -> body` below a universal, `G & body` below an
/// existential quantifier.
fn insert_guard(base: &Formula, atom: &Address, guard: Formula, z: &str) -> Option<Candidate> {
    let binders = base.binders_above(atom);
    let mut vars = Vec::new();
    for t in crate::profile::atom_args(&guard) {
        t.variables(&mut vars);
    }
    let free: BTreeSet<String> = base.free_variables().into_iter().collect();
    let mut deepest: Option<usize> = None;
    for v in &vars {
        match binders.iter().rposition(|(_, _, w)| w == v) {
            Some(i) => deepest = Some(deepest.map_or(i, |d| d.max(i))),
            None if free.contains(v) => {}
            None => return None,
        }
    }
    let (addr, q, _) = &binders[deepest?];
    let body_addr = addr.child(0);
    let body = base.at(&body_addr)?.clone();
    let after = match q {
        Quantifier::Forall => Formula::implies(guard.clone(), body),
        Quantifier::Exists => Formula::and(guard.clone(), body),
    };
    let eff = crate::profile::atom_quantifier_prefix(base, atom)
        .ok()
        .and_then(|p| p.find(z).map(|(_, e)| e.quantifier))
        .unwrap_or(*q);
    let edit = Edit::at(base, body_addr, after)?;
    Candidate::single(
        base,
        edit,
        format!("add the guard {guard} for {z}"),
        format!("Missing {} guard for {z}", quantifier_word(eff)),
    )
}

/// Removes a guard of `base` that the same-profile ψ-atom does without.
fn remove_guard_candidates(ctx: &StrategyContext<'_>, base: &Formula) -> Vec<Candidate> {
    let guards = extract_guards(base);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in &guards.guards {
        let a = &rec.guarded;
        let Some(i) = a.args().iter().position(|t| t.as_var() == Some(rec.variable.as_str())) else { continue };
        let unguarded_in_psi = ctx.psi_profile.iter().filter(|b| b.key() == a.key()).any(|b| match b.args()[i].as_var() {
            Some(zb) => !ctx.psi_guards.is_guarded(&b.address, zb),
            None => false,
        });
        if !unguarded_in_psi || !seen.insert(rec.guard.address.clone()) {
            continue;
        }
        let Some(parent) = rec.guard.address.parent() else { continue };
        let idx = *rec.guard.address.0.last().expect("guard is not the root");
        let after = match base.at(&parent) {
            Some(Formula::And(l, r)) => {
                if idx == 0 {
                    (**r).clone()
                } else {
                    (**l).clone()
                }
            }
            Some(Formula::Implies(_, r)) if idx == 0 => (**r).clone(),
            _ => continue,
        };
        let q = a.prefix.find(&rec.variable).map(|(_, e)| e.quantifier).unwrap_or(Quantifier::Forall);
        let Some(edit) = Edit::at(base, parent, after) else { continue };
        out.extend(Candidate::single(
            base,
            edit,
            format!("remove the guard {} for {}", rec.guard.atom, rec.variable),
            format!("Superfluous {} guard for {}", quantifier_word(q), rec.variable),
        ));
    }
    out
}

fn conjunct_list(f: &Formula, addr: Address, out: &mut Vec<(Address, Formula)>) {
    if let Formula::And(a, b) = f {
        conjunct_list(a, addr.child(0), out);
        conjunct_list(b, addr.child(1), out);
    } else {
        out.push((addr, f.clone()));
    }
}

fn flip_operator_candidates(ctx: &StrategyContext<'_>) -> Vec<Candidate> {
    let phi = &ctx.phi;
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for rec in &ctx.phi_guards.wrong_guards {
        if !seen.insert((rec.witness.clone(), rec.guard.address.clone())) {
            continue;
        }
        let Some(node) = phi.at(&rec.witness) else { continue };
        let after = match node {
            Formula::Implies(l, r) => Formula::and((**l).clone(), (**r).clone()),
            Formula::And(..) => {
                let mut cs = Vec::new();
                conjunct_list(node, rec.witness.clone(), &mut cs);
                let rest = cs.into_iter().filter(|(a, _)| a != &rec.guard.address).map(|(_, f)| f);
                let Some(rest) = Formula::conjunction(rest) else { continue };
                Formula::implies(rec.guard.atom.clone(), rest)
            }
            _ => continue,
        };
        let q = rec.guarded.prefix.find(&rec.variable).map(|(_, e)| e.quantifier).unwrap_or(Quantifier::Forall);
        let message = match q {
            Quantifier::Forall => format!("∧ is the wrong guard operator for universally quantified {}", rec.variable),
            Quantifier::Exists => format!("→ is the wrong guard operator for existentially quantified {}", rec.variable),
        };
        let Some(edit) = Edit::at(phi, rec.witness.clone(), after) else { continue };
        out.extend(Candidate::single(phi, edit, format!("change the guard operator at {}", rec.witness), message));
    }
    out
}
