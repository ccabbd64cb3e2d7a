use std::collections::BTreeMap;

use thiserror::Error;

use super::structure::Structure;
use crate::syntax::{Formula, Quantifier, SymbolKind, Term, Vocabulary};

/// Values for the free variables of a formula.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("free variable `{0}` has no value")]
    Unassigned(String),
    #[error("`{0}` is not interpreted by the structure")]
    UnknownSymbol(String),
    #[error("`{name}` used with {found} arguments, declared with {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },
}

#[derive(Debug, Clone)]
enum CTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Debug, Clone)]
enum Node {
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Forall(usize, Box<Node>),
    Exists(usize, Box<Node>),
}

/// A formula resolved against a vocabulary: symbols become table indices and
/// variables become slots of an environment vector. Free variables occupy
/// the first slots, in `free_variables()` order.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    root: Node,
    free: Vec<String>,
    slots: usize,
}

struct Compiler<'a> {
    vocab: &'a Vocabulary,
    scope: Vec<(String, usize)>,
    slots: usize,
}

impl Compiler<'_> {
    fn term(&self, t: &Term) -> Result<CTerm, EvalError> {
        Ok(match t {
            Term::Var(v) => {
                let slot = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| EvalError::Unassigned(v.clone()))?;
                CTerm::Var(slot)
            }
            Term::Const(c) => match self.vocab.lookup(c) {
                Some(SymbolKind::Constant { index }) => CTerm::Const(index),
                _ => return Err(EvalError::UnknownSymbol(c.clone())),
            },
            Term::App(f, args) => match self.vocab.lookup(f) {
                Some(SymbolKind::Function { index, arity }) => {
                    if arity != args.len() {
                        return Err(EvalError::Arity {
                            name: f.clone(),
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    CTerm::App(index, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
                }
                _ => return Err(EvalError::UnknownSymbol(f.clone())),
            },
        })
    }

    fn formula(&mut self, f: &Formula) -> Result<Node, EvalError> {
        let bin = |c: &mut Self, a: &Formula, b: &Formula| -> Result<(Box<Node>, Box<Node>), EvalError> {
            Ok((Box::new(c.formula(a)?), Box::new(c.formula(b)?)))
        };
        Ok(match f {
            Formula::Atom(r, args) => match self.vocab.lookup(r) {
                Some(SymbolKind::Relation { index, arity }) => {
                    if arity != args.len() {
                        return Err(EvalError::Arity {
                            name: r.clone(),
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    Node::Rel(index, args.iter().map(|a| self.term(a)).collect::<Result<_, _>>()?)
                }
                _ => return Err(EvalError::UnknownSymbol(r.clone())),
            },
            Formula::Eq(a, b) => Node::Eq(self.term(a)?, self.term(b)?),
            Formula::Not(a) => Node::Not(Box::new(self.formula(a)?)),
            Formula::And(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Implies(a, b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = bin(self, a, b)?;
                Node::Iff(a, b)
            }
            Formula::Quant(q, v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), slot));
                let body = Box::new(self.formula(body)?);
                self.scope.pop();
                match q {
                    Quantifier::Forall => Node::Forall(slot, body),
                    Quantifier::Exists => Node::Exists(slot, body),
                }
            }
        })
    }
}

impl CompiledFormula {
    pub fn compile(f: &Formula, vocab: &Vocabulary) -> Result<CompiledFormula, EvalError> {
        let free = f.free_variables();
        let mut c = Compiler {
            vocab,
            scope: free.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect(),
            slots: free.len(),
        };
        let root = c.formula(f)?;
        Ok(CompiledFormula {
            root,
            free,
            slots: c.slots,
        })
    }

    pub fn free_variables(&self) -> &[String] {
        &self.free
    }

    /// Truth value of a sentence.
    pub fn holds(&self, s: &Structure) -> bool {
        debug_assert!(self.free.is_empty(), "formula has free variables");
        let mut env = vec![0; self.slots];
        eval_node(&self.root, s, &mut env)
    }

    pub fn eval(&self, s: &Structure, a: &Assignment) -> Result<bool, EvalError> {
        let mut env = vec![0; self.slots];
        for (i, v) in self.free.iter().enumerate() {
            env[i] = *a.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))?;
        }
        Ok(eval_node(&self.root, s, &mut env))
    }
}

fn eval_term(t: &CTerm, s: &Structure, env: &[usize]) -> usize {
    match t {
        CTerm::Var(slot) => env[*slot],
        CTerm::Const(c) => s.constant_value(*c),
        CTerm::App(f, args) => {
            let n = s.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + eval_term(a, s, env));
            s.function_table(*f)[idx]
        }
    }
}

fn eval_node(node: &Node, s: &Structure, env: &mut [usize]) -> bool {
    match node {
        Node::Rel(r, args) => {
            let n = s.size();
            let idx = args.iter().fold(0, |acc, a| acc * n + eval_term(a, s, env));
            s.relation_table(*r)[idx]
        }
        Node::Eq(a, b) => eval_term(a, s, env) == eval_term(b, s, env),
        Node::Not(a) => !eval_node(a, s, env),
        Node::And(a, b) => eval_node(a, s, env) && eval_node(b, s, env),
        Node::Or(a, b) => eval_node(a, s, env) || eval_node(b, s, env),
        Node::Implies(a, b) => !eval_node(a, s, env) || eval_node(b, s, env),
        Node::Iff(a, b) => eval_node(a, s, env) == eval_node(b, s, env),
        Node::Forall(slot, body) => {
            let saved = env[*slot];
            let mut result = true;
            for e in 0..s.size() {
                env[*slot] = e;
                if !eval_node(body, s, env) {
                    result = false;
                    break;
                }
            }
            env[*slot] = saved;
            result
        }
        Node::Exists(slot, body) => {
            let saved = env[*slot];
            let mut result = false;
            for e in 0..s.size() {
                env[*slot] = e;
                if eval_node(body, s, env) {
                    result = true;
                    break;
                }
            }
            env[*slot] = saved;
            result
        }
    }
}

/// Tarskian satisfaction of `f` in `s` under `a`.
pub fn eval(s: &Structure, f: &Formula, a: &Assignment) -> Result<bool, EvalError> {
    CompiledFormula::compile(f, s.vocab())?.eval(s, a)
}

/// Truth value of a sentence; open formulas are an error.
pub fn eval_sentence(s: &Structure, f: &Formula) -> Result<bool, EvalError> {
    eval(s, f, &Assignment::new())
}

/// A set of sentences compiled once and checked together.
#[derive(Debug, Clone)]
pub struct CompiledTheory {
    axioms: Vec<CompiledFormula>,
}

impl CompiledTheory {
    pub fn compile<'a>(
        axioms: impl IntoIterator<Item = &'a Formula>,
        vocab: &Vocabulary,
    ) -> Result<CompiledTheory, EvalError> {
        let axioms = axioms
            .into_iter()
            .map(|f| {
                let c = CompiledFormula::compile(f, vocab)?;
                match c.free.first() {
                    Some(v) => Err(EvalError::Unassigned(v.clone())),
                    None => Ok(c),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(CompiledTheory { axioms })
    }

    pub fn holds(&self, s: &Structure) -> bool {
        self.axioms.iter().all(|a| a.holds(s))
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }
}
