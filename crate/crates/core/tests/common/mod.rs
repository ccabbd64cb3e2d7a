#![allow(dead_code)]

use foeq::syntax::{Formula, Quantifier, Term, Vocabulary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two unary relations, one binary relation, equality.
pub fn small_vocab() -> Vocabulary {
    Vocabulary::new(true)
        .with_relation("P", 1)
        .unwrap()
        .with_relation("Q", 1)
        .unwrap()
        .with_relation("R", 2)
        .unwrap()
}

const VARS: [&str; 2] = ["x", "y"];

fn term(rng: &mut impl Rng, bound: &[&'static str]) -> Term {
    Term::var(bound[rng.gen_range(0..bound.len())])
}

fn atom(rng: &mut impl Rng, bound: &[&'static str]) -> Formula {
    match rng.gen_range(0..10) {
        0..=2 => Formula::atom("P", vec![term(rng, bound)]),
        3..=5 => Formula::atom("Q", vec![term(rng, bound)]),
        6..=8 => Formula::atom("R", vec![term(rng, bound), term(rng, bound)]),
        _ => Formula::eq(term(rng, bound), term(rng, bound)),
    }
}

fn gen(rng: &mut impl Rng, bound: &mut Vec<&'static str>, depth: usize, size: usize) -> Formula {
    let must_bind = bound.is_empty();
    if !must_bind && (size == 0 || rng.gen_bool(0.3)) {
        return atom(rng, bound);
    }
    let choice = if must_bind { 5 } else { rng.gen_range(0..if depth > 0 { 7 } else { 5 }) };
    let size = size.saturating_sub(1);
    match choice {
        0 => Formula::not(gen(rng, bound, depth, size)),
        1..=4 => {
            let a = gen(rng, bound, depth, size / 2);
            let b = gen(rng, bound, depth, size / 2);
            match choice {
                1 => Formula::and(a, b),
                2 => Formula::or(a, b),
                3 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        _ => {
            let v = VARS[rng.gen_range(0..VARS.len())];
            let q = if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists };
            bound.push(v);
            let body = gen(rng, bound, depth - 1, size);
            bound.pop();
            Formula::Quant(q, v.to_string(), Box::new(body))
        }
    }
}

/// A sentence over `small_vocab` of quantifier depth at most 2.
pub fn random_sentence(rng: &mut impl Rng) -> Formula {
    let size = rng.gen_range(1..=6);
    gen(rng, &mut Vec::new(), 2, size)
}

pub fn sentence_from_seed(seed: u64) -> Formula {
    random_sentence(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// A random pair; about half the time φ is a small perturbation of ψ so
/// that equivalent and near-equivalent pairs are common.
pub fn pair_from_seed(seed: u64) -> (Formula, Formula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let psi = random_sentence(&mut rng);
    let phi = match rng.gen_range(0..4) {
        0 => random_sentence(&mut rng),
        1 => Formula::not(Formula::not(psi.clone())),
        _ => perturb(&psi, &mut rng),
    };
    (psi, phi)
}

fn perturb(f: &Formula, rng: &mut impl Rng) -> Formula {
    let nodes = f.nodes();
    let (addr, node) = &nodes[rng.gen_range(0..nodes.len())];
    let replacement = match node {
        Formula::Quant(q, v, b) => Formula::Quant(q.dual(), v.clone(), b.clone()),
        Formula::And(a, b) => Formula::or((**a).clone(), (**b).clone()),
        Formula::Or(a, b) => Formula::and((**a).clone(), (**b).clone()),
        Formula::Implies(a, b) => Formula::implies((**b).clone(), (**a).clone()),
        Formula::Iff(a, b) => Formula::implies((**a).clone(), (**b).clone()),
        Formula::Not(a) => (**a).clone(),
        other => Formula::not((*other).clone()),
    };
    f.replaced(addr, replacement).unwrap()
}
