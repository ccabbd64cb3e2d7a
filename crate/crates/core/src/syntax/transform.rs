use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::ast::{Address, Formula, Quantifier, Term};
use super::vocab::Vocabulary;

/// Negation normal form: implications and biconditionals are eliminated and
/// negations sit only directly above atoms and equalities.
pub fn nnf(f: &Formula) -> Formula {
    to_nnf(f, true)
}

fn to_nnf(f: &Formula, positive: bool) -> Formula {
    match f {
        Formula::Atom(..) | Formula::Eq(..) => {
            if positive {
                f.clone()
            } else {
                Formula::not(f.clone())
            }
        }
        Formula::Not(inner) => to_nnf(inner, !positive),
        Formula::And(a, b) => {
            if positive {
                Formula::and(to_nnf(a, true), to_nnf(b, true))
            } else {
                Formula::or(to_nnf(a, false), to_nnf(b, false))
            }
        }
        Formula::Or(a, b) => {
            if positive {
                Formula::or(to_nnf(a, true), to_nnf(b, true))
            } else {
                Formula::and(to_nnf(a, false), to_nnf(b, false))
            }
        }
        Formula::Implies(a, b) => {
            if positive {
                Formula::or(to_nnf(a, false), to_nnf(b, true))
            } else {
                Formula::and(to_nnf(a, true), to_nnf(b, false))
            }
        }
        Formula::Iff(a, b) => {
            // a <-> b == (~a | b) & (~b | a)
            if positive {
                Formula::and(
                    Formula::or(to_nnf(a, false), to_nnf(b, true)),
                    Formula::or(to_nnf(b, false), to_nnf(a, true)),
                )
            } else {
                // ~(a <-> b) == (a & ~b) | (b & ~a)
                Formula::or(
                    Formula::and(to_nnf(a, true), to_nnf(b, false)),
                    Formula::and(to_nnf(b, true), to_nnf(a, false)),
                )
            }
        }
        Formula::Quant(q, v, body) => {
            let q = if positive { *q } else { q.dual() };
            Formula::Quant(q, v.clone(), Box::new(to_nnf(body, positive)))
        }
    }
}

pub type Prefix = Vec<(Quantifier, String)>;

/// Splits `Q1 x1 ... Qk xk M` into its prefix and quantifier-free matrix.
/// Returns `None` when a quantifier occurs inside the matrix.
pub fn prenex_decompose(f: &Formula) -> Option<(Prefix, Formula)> {
    let mut prefix = Vec::new();
    let mut cur = f;
    while let Formula::Quant(q, v, body) = cur {
        prefix.push((*q, v.clone()));
        cur = body;
    }
    if cur.nodes().iter().any(|(_, n)| matches!(n, Formula::Quant(..))) {
        return None;
    }
    Some((prefix, cur.clone()))
}

pub fn prenex_compose(prefix: &[(Quantifier, String)], matrix: Formula) -> Formula {
    prefix
        .iter()
        .rev()
        .fold(matrix, |acc, (q, v)| Formula::Quant(*q, v.clone(), Box::new(acc)))
}

/// Renames bound variables to `v0, v1, ...` in depth-first binder order.
/// Canonical names that clash with a free variable are skipped.
pub fn alpha_normalize(f: &Formula) -> Formula {
    let free: BTreeSet<String> = f.free_variables().into_iter().collect();
    let mut counter = 0usize;
    let mut next = move || loop {
        let name = format!("v{counter}");
        counter += 1;
        if !free.contains(&name) {
            return name;
        }
    };
    let mut scope: Vec<(String, String)> = Vec::new();
    rename_bound(f, &mut scope, &mut next)
}

fn rename_term(t: &Term, scope: &[(String, String)]) -> Term {
    t.map_vars(&|v| {
        let renamed = scope
            .iter()
            .rev()
            .find(|(from, _)| from == v)
            .map(|(_, to)| to.clone())
            .unwrap_or_else(|| v.to_string());
        Term::Var(renamed)
    })
}

fn rename_bound(
    f: &Formula,
    scope: &mut Vec<(String, String)>,
    next: &mut dyn FnMut() -> String,
) -> Formula {
    match f {
        Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(|t| rename_term(t, scope)).collect()),
        Formula::Eq(a, b) => Formula::Eq(rename_term(a, scope), rename_term(b, scope)),
        Formula::Not(a) => Formula::not(rename_bound(a, scope, next)),
        Formula::And(a, b) => {
            let a = rename_bound(a, scope, next);
            Formula::and(a, rename_bound(b, scope, next))
        }
        Formula::Or(a, b) => {
            let a = rename_bound(a, scope, next);
            Formula::or(a, rename_bound(b, scope, next))
        }
        Formula::Implies(a, b) => {
            let a = rename_bound(a, scope, next);
            Formula::implies(a, rename_bound(b, scope, next))
        }
        Formula::Iff(a, b) => {
            let a = rename_bound(a, scope, next);
            Formula::iff(a, rename_bound(b, scope, next))
        }
        Formula::Quant(q, v, body) => {
            let fresh = next();
            scope.push((v.clone(), fresh.clone()));
            let body = rename_bound(body, scope, next);
            scope.pop();
            Formula::Quant(*q, fresh, Box::new(body))
        }
    }
}

/// Renames the variable bound at the quantifier node `binder` throughout its
/// scope. Occurrences that are re-bound by an inner quantifier are untouched.
pub fn rename_binder(f: &Formula, binder: &Address, new_name: &str) -> Option<Formula> {
    let Formula::Quant(q, old, body) = f.at(binder)? else {
        return None;
    };
    let renamed = Formula::Quant(*q, new_name.to_string(), Box::new(body.substitute_free(old, &Term::var(new_name))));
    f.replaced(binder, renamed)
}

/// A variable name not occurring anywhere in the given formulas.
pub fn fresh_variable(base: &str, taken: &BTreeSet<String>) -> String {
    if !taken.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken.contains(n))
        .expect("unbounded name supply")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("address {0} does not exist in the formula")]
    InvalidAddress(Address),
    #[error("variable `{0}` of the replacement is neither bound at {1} nor free in the formula")]
    UnboundVariable(String, Address),
}

/// Replaces the subtree at `addr` by `replacement`.
///
/// Free variables of the replacement must be bound above `addr` or free in
/// `f` (unrestricted when replacing the root). Bound variables of the replacement that would shadow a variable in
/// scope at `addr` are renamed apart first.
pub fn rewrite_at(f: &Formula, addr: &Address, replacement: &Formula) -> Result<Formula, RewriteError> {
    if f.at(addr).is_none() {
        return Err(RewriteError::InvalidAddress(addr.clone()));
    }
    let in_scope: BTreeSet<String> = f.binders_above(addr).into_iter().map(|(_, _, v)| v).collect();
    let free_in_f: BTreeSet<String> = f.free_variables().into_iter().collect();
    for v in replacement.free_variables() {
        if !addr.is_empty() && !in_scope.contains(&v) && !free_in_f.contains(&v) {
            return Err(RewriteError::UnboundVariable(v, addr.clone()));
        }
    }
    let mut taken: BTreeSet<String> = f.all_variables();
    taken.extend(replacement.all_variables());
    let mut repl = replacement.clone();
    let binders: Vec<Address> = repl
        .nodes()
        .into_iter()
        .filter_map(|(a, n)| match n {
            Formula::Quant(_, v, _) if in_scope.contains(v) || free_in_f.contains(v) => Some(a),
            _ => None,
        })
        .collect();
    // Outermost first; inner addresses stay valid because renaming keeps shape.
    for b in binders {
        let Some(Formula::Quant(_, v, _)) = repl.at(&b) else { continue };
        let fresh = fresh_variable(v, &taken);
        taken.insert(fresh.clone());
        repl = rename_binder(&repl, &b, &fresh).expect("binder address came from traversal");
    }
    Ok(f.replaced(addr, repl).expect("address checked above"))
}

/// Counts binders per variable name.
pub fn binder_counts(f: &Formula) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for (_, n) in f.nodes() {
        if let Formula::Quant(_, v, _) = n {
            *m.entry(v.clone()).or_insert(0) += 1;
        }
    }
    m
}

/// Free variables turned into constants: the extended vocabulary and the
/// `(variable, constant)` pairs in first-occurrence order.
#[derive(Debug, Clone)]
pub struct Closure {
    pub vocab: Vocabulary,
    pub constants: Vec<(String, String)>,
}

/// Replaces every free variable of `formulas` by a fresh constant, the same
/// constant for the same variable across all of them.
pub fn close_free_variables(formulas: &[&Formula], vocab: &Vocabulary) -> (Vec<Formula>, Closure) {
    let mut free: Vec<String> = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    for f in formulas {
        for v in f.free_variables() {
            if !free.contains(&v) {
                free.push(v);
            }
        }
        names.extend(f.all_variables());
    }
    let mut out_vocab = vocab.clone();
    let mut constants = Vec::new();
    for v in &free {
        let c = out_vocab.fresh_name(&format!("free_{v}"), &|n| names.contains(n));
        out_vocab.add_constant(&c).expect("fresh name");
        constants.push((v.clone(), c));
    }
    let closed = formulas
        .iter()
        .map(|f| {
            constants
                .iter()
                .fold((*f).clone(), |acc, (v, c)| acc.substitute_free(v, &Term::constant(c)))
        })
        .collect();
    (
        closed,
        Closure {
            vocab: out_vocab,
            constants,
        },
    )
}
