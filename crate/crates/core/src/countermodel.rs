//! Random counter-model search over Erdős–Rényi style structures.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::semantics::{CompiledFormula, CompiledTheory, EvalError, Structure};
use crate::syntax::{close_free_variables, Formula, Theory, Vocabulary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomModelConfig {
    /// Universe sizes, ascending.
    pub sizes: Vec<usize>,
    /// Probability of including each relation tuple.
    pub p: f64,
    /// A size `m` gets `m * per_size_factor` generated structures.
    pub per_size_factor: usize,
    pub seed: u64,
    /// After a first witness, keep looking for one of the other direction.
    pub both_directions: bool,
}

impl Default for RandomModelConfig {
    fn default() -> Self {
        RandomModelConfig {
            sizes: (1..=10).collect(),
            p: 0.5,
            per_size_factor: 1000,
            seed: 0,
            both_directions: false,
        }
    }
}

impl RandomModelConfig {
    pub fn with_seed(seed: u64) -> Self {
        RandomModelConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn budget(&self, size: usize) -> usize {
        size * self.per_size_factor
    }

    /// Generator for one universe size. Each size uses its own ChaCha stream
    /// of the master seed: stream `size` for the search, stream
    /// `size + 2^32` for Γ-model pre-generation.
    pub fn rng(&self, size: usize, pool: bool) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(size as u64 + if pool { 1 << 32 } else { 0 });
        rng
    }

    fn validate(&self) {
        assert!((0.0..=1.0).contains(&self.p), "p must be a probability");
        assert!(
            !self.sizes.is_empty() && self.sizes.windows(2).all(|w| w[0] < w[1]) && self.sizes[0] >= 1,
            "sizes must be nonempty, ascending and positive"
        );
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// The witness satisfies ψ but not φ: the attempt excludes an intended model.
    TooRestrictive,
    /// The witness satisfies φ but not ψ.
    TooPermissive,
    /// Witnesses for both directions were found.
    Both,
}

impl Direction {
    pub fn of(psi_holds: bool, phi_holds: bool) -> Option<Direction> {
        match (psi_holds, phi_holds) {
            (true, false) => Some(Direction::TooRestrictive),
            (false, true) => Some(Direction::TooPermissive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessSource {
    Random,
    ProverFmb,
    BruteForce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterExample {
    pub structure: Structure,
    pub direction: Direction,
    pub source: WitnessSource,
    /// With `Direction::Both`, a witness for the opposite direction.
    pub other: Option<Structure>,
}

/// One structure of size `n`: every relation tuple independently with
/// probability `p`, every function value and constant uniformly.
pub fn random_structure(vocab: &Arc<Vocabulary>, n: usize, p: f64, rng: &mut impl Rng) -> Structure {
    let mut s = Structure::new(vocab.clone(), n);
    for r in 0..vocab.relations().len() {
        for bit in s.relation_table_mut(r) {
            *bit = rng.gen_bool(p);
        }
    }
    for f in 0..vocab.functions().len() {
        for v in s.function_table_mut(f) {
            *v = rng.gen_range(0..n);
        }
    }
    for c in 0..vocab.constants().len() {
        s.set_constant_value(c, rng.gen_range(0..n));
    }
    s
}

/// Random models of Γ, grouped by size.
#[derive(Debug, Clone, Default)]
pub struct GammaPool {
    pub by_size: Vec<(usize, Vec<Structure>)>,
}

impl GammaPool {
    pub fn models(&self, size: usize) -> &[Structure] {
        self.by_size
            .iter()
            .find(|(n, _)| *n == size)
            .map(|(_, v)| v.as_slice())
            .unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.by_size.iter().map(|(_, v)| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Generates `budget(n)` structures per size and keeps the Γ-models.
pub fn pregenerate_gamma_models(
    gamma: &Theory,
    vocab: &Arc<Vocabulary>,
    cfg: &RandomModelConfig,
) -> Result<GammaPool, EvalError> {
    cfg.validate();
    let theory = CompiledTheory::compile(gamma.iter(), vocab)?;
    let mut by_size = Vec::new();
    for &n in &cfg.sizes {
        let mut rng = cfg.rng(n, true);
        let models = (0..cfg.budget(n))
            .map(|_| random_structure(vocab, n, cfg.p, &mut rng))
            .filter(|s| theory.holds(s))
            .collect();
        by_size.push((n, models));
    }
    Ok(GammaPool { by_size })
}

/// Looks for a Γ-model on which ψ and φ differ, in ascending size.
///
/// Free variables are read as constants; the witness is over the vocabulary
/// extended by them. When Γ is nonempty, candidates alternate between the
/// Γ-pool (computed here if not given) and fresh structures filtered by Γ.
pub fn search_countermodel(
    psi: &Formula,
    phi: &Formula,
    gamma: &Theory,
    vocab: &Vocabulary,
    cfg: &RandomModelConfig,
    pool: Option<&GammaPool>,
) -> Result<Option<CounterExample>, EvalError> {
    cfg.validate();
    let (closed, closure) = close_free_variables(&[psi, phi], vocab);
    let closed_vocab = Arc::new(closure.vocab);
    let psi = CompiledFormula::compile(&closed[0], &closed_vocab)?;
    let phi = CompiledFormula::compile(&closed[1], &closed_vocab)?;
    let theory = CompiledTheory::compile(gamma.iter(), &closed_vocab)?;
    let base_vocab = Arc::new(vocab.clone());
    let owned;
    let pool = match pool {
        Some(p) => Some(p),
        None if !gamma.is_empty() => {
            owned = pregenerate_gamma_models(gamma, &base_vocab, cfg)?;
            Some(&owned)
        }
        None => None,
    };
    let free_constants: Vec<usize> = closure
        .constants
        .iter()
        .map(|(_, c)| match closed_vocab.lookup(c) {
            Some(crate::syntax::SymbolKind::Constant { index }) => index,
            _ => unreachable!("closure constants are declared"),
        })
        .collect();

    let mut first: Option<(Structure, Direction)> = None;
    for &n in &cfg.sizes {
        let mut rng = cfg.rng(n, false);
        let models = pool.map(|p| p.models(n)).unwrap_or(&[]);
        let mut next_pool = 0;
        for i in 0..cfg.budget(n) {
            let candidate = if i % 2 == 1 && next_pool < models.len() {
                next_pool += 1;
                let mut s = models[next_pool - 1].expanded(closed_vocab.clone());
                for &c in &free_constants {
                    s.set_constant_value(c, rng.gen_range(0..n));
                }
                s
            } else {
                let s = random_structure(&closed_vocab, n, cfg.p, &mut rng);
                if !theory.holds(&s) {
                    continue;
                }
                s
            };
            let Some(dir) = Direction::of(psi.holds(&candidate), phi.holds(&candidate)) else {
                continue;
            };
            match &first {
                None if !cfg.both_directions => {
                    return Ok(Some(CounterExample {
                        structure: candidate,
                        direction: dir,
                        source: WitnessSource::Random,
                        other: None,
                    }))
                }
                None => first = Some((candidate, dir)),
                Some((s, d)) if *d != dir => {
                    return Ok(Some(CounterExample {
                        structure: s.clone(),
                        direction: Direction::Both,
                        source: WitnessSource::Random,
                        other: Some(candidate),
                    }))
                }
                Some(_) => {}
            }
        }
    }
    Ok(first.map(|(structure, direction)| CounterExample {
        structure,
        direction,
        source: WitnessSource::Random,
        other: None,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval_sentence;
    use crate::syntax::parse;

    fn vocab() -> Vocabulary {
        Vocabulary::new(true)
            .with_relation("P", 1)
            .unwrap()
            .with_relation("Q", 1)
            .unwrap()
            .with_relation("R", 2)
            .unwrap()
    }

    fn p(s: &str) -> Formula {
        parse(s, &vocab()).unwrap()
    }

    #[test]
    fn extreme_probabilities() {
        let v = Arc::new(vocab());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let full = random_structure(&v, 3, 1.0, &mut rng);
        assert_eq!(full.relation_tuples("R").unwrap().len(), 9);
        let empty = random_structure(&v, 3, 0.0, &mut rng);
        assert!(empty.relation_tuples("R").unwrap().is_empty());
    }

    #[test]
    fn forall_vs_exists() {
        let cx = search_countermodel(
            &p("forall x P(x)"),
            &p("exists x P(x)"),
            &Theory::empty(),
            &vocab(),
            &RandomModelConfig::with_seed(3),
            None,
        )
        .unwrap()
        .unwrap();
        assert_eq!(cx.direction, Direction::TooPermissive);
        assert!(cx.structure.size() >= 2);
    }

    #[test]
    fn superfluous_guard_is_too_restrictive() {
        let psi = p("exists x Q(x)");
        let phi = p("exists x (P(x) & Q(x))");
        let cx = search_countermodel(&psi, &phi, &Theory::empty(), &vocab(), &RandomModelConfig::default(), None)
            .unwrap()
            .unwrap();
        assert_eq!(cx.direction, Direction::TooRestrictive);
        assert!(eval_sentence(&cx.structure, &psi).unwrap());
        assert!(!eval_sentence(&cx.structure, &phi).unwrap());
    }

    #[test]
    fn identical_formulas_have_no_witness() {
        let f = p("forall x exists y R(x, y)");
        let cfg = RandomModelConfig {
            sizes: vec![1, 2, 3],
            per_size_factor: 50,
            ..Default::default()
        };
        assert!(search_countermodel(&f, &f, &Theory::empty(), &vocab(), &cfg, None).unwrap().is_none());
    }

    #[test]
    fn gamma_pool_respects_the_theory() {
        let v = Arc::new(vocab());
        let gamma = Theory::new(vec![p("forall x ~R(x, x)"), p("forall x forall y (R(x, y) -> ~R(y, x))")]);
        let cfg = RandomModelConfig {
            sizes: vec![1, 2, 3],
            per_size_factor: 200,
            ..Default::default()
        };
        let pool = pregenerate_gamma_models(&gamma, &v, &cfg).unwrap();
        assert!(!pool.is_empty());
        for (_, models) in &pool.by_size {
            for s in models {
                let r = s.relation_tuples("R").unwrap();
                assert!(r.iter().all(|t| t[0] != t[1] && !r.contains(&vec![t[1], t[0]])));
            }
        }
    }

    #[test]
    fn both_directions_on_request() {
        let cfg = RandomModelConfig {
            both_directions: true,
            ..RandomModelConfig::with_seed(5)
        };
        let cx = search_countermodel(&p("exists x P(x)"), &p("exists x Q(x)"), &Theory::empty(), &vocab(), &cfg, None)
            .unwrap()
            .unwrap();
        assert_eq!(cx.direction, Direction::Both);
        let other = cx.other.unwrap();
        assert_ne!(
            eval_sentence(&cx.structure, &p("exists x P(x)")).unwrap(),
            eval_sentence(&other, &p("exists x P(x)")).unwrap()
        );
    }

    #[test]
    fn reproducible_with_a_seed() {
        let cfg = RandomModelConfig::with_seed(42);
        let run = || {
            search_countermodel(
                &p("forall x exists y R(x, y)"),
                &p("exists y forall x R(x, y)"),
                &Theory::empty(),
                &vocab(),
                &cfg,
                None,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
    }
}
