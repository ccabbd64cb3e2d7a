//! A finite model finder: the query is grounded over a universe of fixed size
//! and handed to a SAT solver, for sizes `1..=max_size`.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use varisat::{CnfFormula, ExtendFormula, Lit, Solver, Var};

use super::backend::{Certainty, CheckOptions, SatBackend, SatResult, UnknownReason};
use super::query::SatQuery;
use crate::semantics::{CompiledTheory, Structure};
use crate::syntax::{Formula, Quantifier, SymbolKind, Term, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedConfig {
    /// Largest universe searched.
    pub max_size: usize,
    /// Grounding stops once the clause count passes this.
    pub max_clauses: usize,
    /// An interrupted search still answers "no model up to k" when at least
    /// this many sizes were completed; otherwise it answers unknown.
    pub min_completed: usize,
}

impl Default for BoundedConfig {
    fn default() -> Self {
        BoundedConfig {
            max_size: 5,
            max_clauses: 2_000_000,
            min_completed: 3,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BoundedBackend {
    pub config: BoundedConfig,
}

impl BoundedBackend {
    pub fn new(config: BoundedConfig) -> Self {
        BoundedBackend { config }
    }

    pub fn with_max_size(max_size: usize) -> Self {
        BoundedBackend {
            config: BoundedConfig {
                max_size,
                ..BoundedConfig::default()
            },
        }
    }

    /// Looks for a model of exactly `size` elements.
    pub fn model_of_size(&self, q: &SatQuery, size: usize) -> Result<Option<Structure>, UnknownReason> {
        let mut g = Grounder::new(&q.vocab, size, self.config.max_clauses);
        for a in &q.axioms {
            let lit = g.formula(a, &mut Vec::new())?;
            match lit {
                G::T => {}
                G::F => return Ok(None),
                G::L(l) => g.cnf.add_clause(&[l]),
            }
        }
        let mut solver = Solver::new();
        solver.add_formula(&g.cnf);
        match solver.solve() {
            Ok(true) => {
                let model = solver.model().expect("model after sat");
                Ok(Some(g.decode(&model)))
            }
            Ok(false) => Ok(None),
            Err(e) => Err(UnknownReason::ProverError(e.to_string())),
        }
    }
}

impl SatBackend for BoundedBackend {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        let start = Instant::now();
        let theory = match CompiledTheory::compile(&q.axioms, &q.vocab) {
            Ok(t) => t,
            Err(e) => return SatResult::Unknown(UnknownReason::ProverError(e.to_string())),
        };
        let mut completed = 0;
        for n in 1..=self.config.max_size {
            if start.elapsed() > opts.timeout {
                return self.interrupted(completed, UnknownReason::Timeout);
            }
            match self.model_of_size(q, n) {
                Ok(Some(s)) => {
                    if !theory.holds(&s) {
                        return SatResult::Unknown(UnknownReason::ProverError(
                            "grounded model failed revalidation".into(),
                        ));
                    }
                    return SatResult::Satisfiable(Some(s));
                }
                Ok(None) => completed = n,
                Err(reason) => return self.interrupted(completed, reason),
            }
        }
        SatResult::Unsatisfiable(Certainty::UpToSize(self.config.max_size))
    }

    fn name(&self) -> String {
        format!("bounded(max_size={})", self.config.max_size)
    }
}

impl BoundedBackend {
    fn interrupted(&self, completed: usize, reason: UnknownReason) -> SatResult {
        if completed >= self.config.min_completed {
            SatResult::Unsatisfiable(Certainty::UpToSize(completed))
        } else {
            SatResult::Unknown(reason)
        }
    }
}

/// A partially evaluated boolean: a constant or a solver literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum G {
    T,
    F,
    L(Lit),
}

impl std::ops::Not for G {
    type Output = G;
    fn not(self) -> G {
        match self {
            G::T => G::F,
            G::F => G::T,
            G::L(l) => G::L(!l),
        }
    }
}

fn constant(b: bool) -> G {
    if b {
        G::T
    } else {
        G::F
    }
}

/// Term with every variable already replaced by a universe element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum GTerm {
    Elem(usize),
    Const(usize),
    App(usize, Vec<GTerm>),
}

struct Grounder<'a> {
    vocab: &'a Arc<Vocabulary>,
    n: usize,
    cnf: CnfFormula,
    relations: Vec<Vec<Var>>,
    /// `functions[f][tuple][value]`
    functions: Vec<Vec<Vec<Var>>>,
    constants: Vec<Vec<Var>>,
    term_memo: HashMap<(GTerm, usize), G>,
    and_memo: HashMap<Vec<Lit>, Lit>,
    max_clauses: usize,
}

impl<'a> Grounder<'a> {
    fn new(vocab: &'a Arc<Vocabulary>, n: usize, max_clauses: usize) -> Self {
        let mut cnf = CnfFormula::new();
        let relations = vocab
            .relations()
            .iter()
            .map(|(_, k)| (0..n.pow(*k as u32)).map(|_| cnf.new_var()).collect())
            .collect();
        let one_hot = |cnf: &mut CnfFormula| -> Vec<Var> {
            let vars: Vec<Var> = (0..n).map(|_| cnf.new_var()).collect();
            cnf.add_clause(&vars.iter().map(|v| v.positive()).collect::<Vec<_>>());
            for i in 0..n {
                for j in i + 1..n {
                    cnf.add_clause(&[vars[i].negative(), vars[j].negative()]);
                }
            }
            vars
        };
        let functions = vocab
            .functions()
            .iter()
            .map(|(_, k)| (0..n.pow(*k as u32)).map(|_| one_hot(&mut cnf)).collect())
            .collect();
        let constants = vocab.constants().iter().map(|_| one_hot(&mut cnf)).collect();
        Grounder {
            vocab,
            n,
            cnf,
            relations,
            functions,
            constants,
            term_memo: HashMap::new(),
            and_memo: HashMap::new(),
            max_clauses,
        }
    }

    fn check_limit(&self) -> Result<(), UnknownReason> {
        if self.cnf.len() > self.max_clauses {
            Err(UnknownReason::Resource)
        } else {
            Ok(())
        }
    }

    fn and(&mut self, items: Vec<G>) -> G {
        let mut lits = Vec::with_capacity(items.len());
        for g in items {
            match g {
                G::F => return G::F,
                G::T => {}
                G::L(l) => lits.push(l),
            }
        }
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return G::F;
        }
        match lits.len() {
            0 => G::T,
            1 => G::L(lits[0]),
            _ => {
                if let Some(&x) = self.and_memo.get(&lits) {
                    return G::L(x);
                }
                let x = self.cnf.new_lit();
                for &l in &lits {
                    self.cnf.add_clause(&[!x, l]);
                }
                let mut long: Vec<Lit> = lits.iter().map(|&l| !l).collect();
                long.push(x);
                self.cnf.add_clause(&long);
                self.and_memo.insert(lits, x);
                G::L(x)
            }
        }
    }

    fn or(&mut self, items: Vec<G>) -> G {
        !self.and(items.into_iter().map(|g| !g).collect())
    }

    fn iff(&mut self, a: G, b: G) -> G {
        match (a, b) {
            (G::T, x) | (x, G::T) => x,
            (G::F, x) | (x, G::F) => !x,
            (G::L(p), G::L(q)) => {
                if p == q {
                    return G::T;
                }
                if p == !q {
                    return G::F;
                }
                let x = self.cnf.new_lit();
                self.cnf.add_clause(&[!x, !p, q]);
                self.cnf.add_clause(&[!x, p, !q]);
                self.cnf.add_clause(&[x, p, q]);
                self.cnf.add_clause(&[x, !p, !q]);
                G::L(x)
            }
        }
    }

    fn ground_term(&self, t: &Term, env: &[(String, usize)]) -> GTerm {
        match t {
            Term::Var(v) => GTerm::Elem(
                env.iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, e)| *e)
                    .expect("query formulas are closed"),
            ),
            Term::Const(c) => match self.vocab.lookup(c) {
                Some(SymbolKind::Constant { index }) => GTerm::Const(index),
                _ => unreachable!("checked by SatQuery::new"),
            },
            Term::App(f, args) => match self.vocab.lookup(f) {
                Some(SymbolKind::Function { index, .. }) => {
                    GTerm::App(index, args.iter().map(|a| self.ground_term(a, env)).collect())
                }
                _ => unreachable!("checked by SatQuery::new"),
            },
        }
    }

    fn tuple_index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    /// Every argument tuple together with the condition that the terms
    /// evaluate to it. Tuples whose condition is false are skipped.
    fn tuples(&mut self, args: &[GTerm]) -> Vec<(Vec<usize>, Vec<G>)> {
        let mut out: Vec<(Vec<usize>, Vec<G>)> = vec![(Vec::new(), Vec::new())];
        for a in args {
            let mut next = Vec::new();
            for v in 0..self.n {
                let c = self.term_eq(a, v);
                if c == G::F {
                    continue;
                }
                for (t, conds) in &out {
                    let mut t = t.clone();
                    t.push(v);
                    let mut conds = conds.clone();
                    conds.push(c);
                    next.push((t, conds));
                }
            }
            out = next;
        }
        out
    }

    fn term_eq(&mut self, t: &GTerm, v: usize) -> G {
        match t {
            GTerm::Elem(e) => constant(*e == v),
            GTerm::Const(c) => G::L(self.constants[*c][v].positive()),
            GTerm::App(f, args) => {
                if let Some(elems) = args
                    .iter()
                    .map(|a| match a {
                        GTerm::Elem(e) => Some(*e),
                        _ => None,
                    })
                    .collect::<Option<Vec<usize>>>()
                {
                    let idx = self.tuple_index(&elems);
                    return G::L(self.functions[*f][idx][v].positive());
                }
                let key = (t.clone(), v);
                if let Some(&g) = self.term_memo.get(&key) {
                    return g;
                }
                let f = *f;
                let mut cases = Vec::new();
                for (tuple, mut conds) in self.tuples(args) {
                    let idx = self.tuple_index(&tuple);
                    conds.push(G::L(self.functions[f][idx][v].positive()));
                    cases.push(self.and(conds));
                }
                let g = self.or(cases);
                self.term_memo.insert(key, g);
                g
            }
        }
    }

    fn formula(&mut self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<G, UnknownReason> {
        self.check_limit()?;
        Ok(match f {
            Formula::Atom(r, args) => {
                let Some(SymbolKind::Relation { index, .. }) = self.vocab.lookup(r) else {
                    unreachable!("checked by SatQuery::new")
                };
                let args: Vec<GTerm> = args.iter().map(|a| self.ground_term(a, env)).collect();
                let mut cases = Vec::new();
                for (tuple, mut conds) in self.tuples(&args) {
                    let idx = self.tuple_index(&tuple);
                    conds.push(G::L(self.relations[index][idx].positive()));
                    cases.push(self.and(conds));
                }
                self.or(cases)
            }
            Formula::Eq(a, b) => {
                let a = self.ground_term(a, env);
                let b = self.ground_term(b, env);
                if let (GTerm::Elem(x), GTerm::Elem(y)) = (&a, &b) {
                    return Ok(constant(x == y));
                }
                let mut cases = Vec::new();
                for v in 0..self.n {
                    let l = self.term_eq(&a, v);
                    let r = self.term_eq(&b, v);
                    cases.push(self.and(vec![l, r]));
                }
                self.or(cases)
            }
            Formula::Not(a) => !self.formula(a, env)?,
            Formula::And(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::F {
                    return Ok(G::F);
                }
                let b = self.formula(b, env)?;
                self.and(vec![a, b])
            }
            Formula::Or(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::T {
                    return Ok(G::T);
                }
                let b = self.formula(b, env)?;
                self.or(vec![a, b])
            }
            Formula::Implies(a, b) => {
                let a = self.formula(a, env)?;
                if a == G::F {
                    return Ok(G::T);
                }
                let b = self.formula(b, env)?;
                self.or(vec![!a, b])
            }
            Formula::Iff(a, b) => {
                let a = self.formula(a, env)?;
                let b = self.formula(b, env)?;
                self.iff(a, b)
            }
            Formula::Quant(q, v, body) => {
                let mut parts = Vec::with_capacity(self.n);
                for e in 0..self.n {
                    env.push((v.clone(), e));
                    let g = self.formula(body, env);
                    env.pop();
                    let g = g?;
                    match (q, g) {
                        (Quantifier::Forall, G::F) => return Ok(G::F),
                        (Quantifier::Exists, G::T) => return Ok(G::T),
                        _ => parts.push(g),
                    }
                }
                match q {
                    Quantifier::Forall => self.and(parts),
                    Quantifier::Exists => self.or(parts),
                }
            }
        })
    }

    fn decode(&self, model: &[Lit]) -> Structure {
        let mut value = vec![false; self.cnf.var_count()];
        for l in model {
            if l.index() < value.len() {
                value[l.index()] = l.is_positive();
            }
        }
        let mut s = Structure::new(self.vocab.clone(), self.n);
        for (r, vars) in self.relations.iter().enumerate() {
            for (idx, v) in vars.iter().enumerate() {
                s.relation_table_mut(r)[idx] = value[v.index()];
            }
        }
        for (f, table) in self.functions.iter().enumerate() {
            for (idx, vars) in table.iter().enumerate() {
                let out = vars.iter().position(|v| value[v.index()]).expect("exactly one value");
                s.function_table_mut(f)[idx] = out;
            }
        }
        for (c, vars) in self.constants.iter().enumerate() {
            let out = vars.iter().position(|v| value[v.index()]).expect("exactly one value");
            s.set_constant_value(c, out);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::prover::query::{encode_equivalence, QueryOrigin};
    use crate::semantics::eval_sentence;
    use crate::syntax::{parse, Theory};

    fn vocab() -> Arc<Vocabulary> {
        Arc::new(
            Vocabulary::new(true)
                .with_relation("P", 1)
                .unwrap()
                .with_relation("R", 2)
                .unwrap()
                .with_function("f", 1)
                .unwrap()
                .with_constant("c")
                .unwrap(),
        )
    }

    fn check(srcs: &[&str], max_size: usize) -> SatResult {
        let v = vocab();
        let axioms = srcs.iter().map(|s| parse(s, &v).unwrap()).collect();
        let q = SatQuery::new(axioms, v, QueryOrigin::Equivalence).unwrap();
        BoundedBackend::with_max_size(max_size).check_sat(&q, &CheckOptions::new(Duration::from_secs(10)))
    }

    #[test]
    fn forall_vs_exists_is_satisfiable_at_two() {
        let v = vocab();
        let q = encode_equivalence(
            &parse("forall x P(x)", &v).unwrap(),
            &parse("exists x P(x)", &v).unwrap(),
            &Theory::empty(),
            v.clone(),
        )
        .unwrap();
        let r = BoundedBackend::default().check_sat(&q, &CheckOptions::new(Duration::from_secs(10)));
        let SatResult::Satisfiable(Some(s)) = r else { panic!("{r:?}") };
        assert_eq!(s.size(), 2);
        assert!(eval_sentence(&s, &q.axioms[0]).unwrap());
    }

    #[test]
    fn contradictions_are_unsat_up_to_the_bound() {
        assert_eq!(
            check(&["exists x P(x)", "forall x ~P(x)"], 4),
            SatResult::Unsatisfiable(Certainty::UpToSize(4))
        );
        // needs an injective non-surjective function: no finite model
        assert_eq!(
            check(&["forall x forall y (f(x) = f(y) -> x = y)", "forall x ~(f(x) = c)"], 3),
            SatResult::Unsatisfiable(Certainty::UpToSize(3))
        );
    }

    #[test]
    fn nested_terms_and_equality() {
        let r = check(&["forall x f(f(x)) = x", "exists x ~(f(x) = x)", "R(c, f(c))", "~R(f(c), c)"], 4);
        let SatResult::Satisfiable(Some(s)) = r else { panic!("{r:?}") };
        assert!(s.size() >= 2);
    }

    #[test]
    fn strict_orders_need_three_elements_for_a_chain() {
        let r = check(
            &[
                "forall x ~R(x, x)",
                "forall x forall y forall z (R(x, y) & R(y, z) -> R(x, z))",
                "exists x exists y exists z (R(x, y) & R(y, z))",
            ],
            5,
        );
        let SatResult::Satisfiable(Some(s)) = r else { panic!("{r:?}") };
        assert_eq!(s.size(), 3);
    }
}
