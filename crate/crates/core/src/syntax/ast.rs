use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    /// Variables in left-to-right order, with repetitions.
    pub fn variables(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => out.push(v.clone()),
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.variables(out)),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => v == name,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }

    pub fn map_vars(&self, f: &dyn Fn(&str) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(g, args) => Term::App(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    fn collect_symbols(&self, s: &mut SymbolUse) {
        match self {
            Term::Var(_) => {}
            Term::Const(c) => {
                s.constants.insert(c.clone());
            }
            Term::App(f, args) => {
                s.functions.insert(f.clone());
                args.iter().for_each(|a| a.collect_symbols(s));
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantifier {
    #[serde(rename = "forall")]
    Forall,
    #[serde(rename = "exists")]
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Quantifier::Forall => "∀",
            Quantifier::Exists => "∃",
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

/// Child-index path from the root of a formula. Unary nodes (negation,
/// quantifiers) have a single child `0`; binary connectives have `0` and `1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Address(pub Vec<usize>);

impl Address {
    pub fn root() -> Address {
        Address(Vec::new())
    }

    pub fn child(&self, i: usize) -> Address {
        let mut v = self.0.clone();
        v.push(i);
        Address(v)
    }

    pub fn parent(&self) -> Option<Address> {
        if self.0.is_empty() {
            None
        } else {
            Some(Address(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &Address) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Non-logical symbols occurring in a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolUse {
    pub relations: BTreeSet<String>,
    pub functions: BTreeSet<String>,
    pub constants: BTreeSet<String>,
    pub equality: bool,
}

impl SymbolUse {
    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains(name) || self.functions.contains(name) || self.constants.contains(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.relations.iter().chain(&self.functions).chain(&self.constants)
    }

    pub fn merge(&mut self, other: &SymbolUse) {
        self.relations.extend(other.relations.iter().cloned());
        self.functions.extend(other.functions.iter().cloned());
        self.constants.extend(other.constants.iter().cloned());
        self.equality |= other.equality;
    }
}

impl Formula {
    pub fn atom(name: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(name.to_string(), args)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, v.to_string(), Box::new(body))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, v.to_string(), Box::new(body))
    }

    /// Conjunction of all formulas, left-nested. `None` for an empty list.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        items.into_iter().reduce(Formula::and)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom(..) | Formula::Eq(..))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(inner) => inner.is_atomic(),
            f => f.is_atomic(),
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => vec![],
            Formula::Not(a) | Formula::Quant(_, _, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                vec![a, b]
            }
        }
    }

    fn child_mut(&mut self, i: usize) -> Option<&mut Formula> {
        match (self, i) {
            (Formula::Not(a), 0) | (Formula::Quant(_, _, a), 0) => Some(a),
            (Formula::And(a, _), 0)
            | (Formula::Or(a, _), 0)
            | (Formula::Implies(a, _), 0)
            | (Formula::Iff(a, _), 0) => Some(a),
            (Formula::And(_, b), 1)
            | (Formula::Or(_, b), 1)
            | (Formula::Implies(_, b), 1)
            | (Formula::Iff(_, b), 1) => Some(b),
            _ => None,
        }
    }

    pub fn at(&self, addr: &Address) -> Option<&Formula> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }

    pub fn at_mut(&mut self, addr: &Address) -> Option<&mut Formula> {
        let mut cur = self;
        for &i in &addr.0 {
            cur = cur.child_mut(i)?;
        }
        Some(cur)
    }

    /// Copy of `self` with the subtree at `addr` replaced. No hygiene checks;
    /// see [`crate::syntax::rewrite_at`] for the capture-checked version.
    pub fn replaced(&self, addr: &Address, replacement: Formula) -> Option<Formula> {
        let mut out = self.clone();
        *out.at_mut(addr)? = replacement;
        Some(out)
    }

    /// Pre-order traversal yielding every node with its address.
    pub fn nodes(&self) -> Vec<(Address, &Formula)> {
        let mut out = Vec::new();
        fn go<'a>(f: &'a Formula, addr: Address, out: &mut Vec<(Address, &'a Formula)>) {
            out.push((addr.clone(), f));
            for (i, c) in f.children().into_iter().enumerate() {
                go(c, addr.child(i), out);
            }
        }
        go(self, Address::root(), &mut out);
        out
    }

    /// Atom and equality occurrences in pre-order.
    pub fn atoms(&self) -> Vec<(Address, &Formula)> {
        self.nodes().into_iter().filter(|(_, f)| f.is_atomic()).collect()
    }

    /// Binders (quantifier, variable) on the path from the root to `addr`,
    /// outermost first, excluding a binder at `addr` itself.
    pub fn binders_above(&self, addr: &Address) -> Vec<(Address, Quantifier, String)> {
        let mut out = Vec::new();
        let mut cur = self;
        let mut here = Address::root();
        for &i in &addr.0 {
            if let Formula::Quant(q, v, _) = cur {
                out.push((here.clone(), *q, v.clone()));
            }
            match cur.children().get(i) {
                Some(c) => cur = c,
                None => break,
            }
            here = here.child(i);
        }
        out
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let push_term_vars = |ts: &[&Term], bound: &Vec<String>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            ts.iter().for_each(|t| t.variables(&mut vs));
            for v in vs {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::Atom(_, args) => push_term_vars(&args.iter().collect::<Vec<_>>(), bound, out),
            Formula::Eq(a, b) => push_term_vars(&[a, b], bound, out),
            Formula::Quant(_, v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            other => other
                .children()
                .into_iter()
                .for_each(|c| c.collect_free(bound, out)),
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name that occurs, bound or free.
    pub fn all_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (_, n) in self.nodes() {
            match n {
                Formula::Atom(_, args) => {
                    let mut vs = Vec::new();
                    args.iter().for_each(|t| t.variables(&mut vs));
                    out.extend(vs);
                }
                Formula::Eq(a, b) => {
                    let mut vs = Vec::new();
                    a.variables(&mut vs);
                    b.variables(&mut vs);
                    out.extend(vs);
                }
                Formula::Quant(_, v, _) => {
                    out.insert(v.clone());
                }
                _ => {}
            }
        }
        out
    }

    pub fn symbols(&self) -> SymbolUse {
        let mut s = SymbolUse::default();
        for (_, n) in self.nodes() {
            match n {
                Formula::Atom(r, args) => {
                    s.relations.insert(r.clone());
                    args.iter().for_each(|t| t.collect_symbols(&mut s));
                }
                Formula::Eq(a, b) => {
                    s.equality = true;
                    a.collect_symbols(&mut s);
                    b.collect_symbols(&mut s);
                }
                _ => {}
            }
        }
        s
    }

    /// Replaces free occurrences of variable `var` by `term`. The caller
    /// guarantees `term`'s variables are not captured.
    pub fn substitute_free(&self, var: &str, term: &Term) -> Formula {
        let sub = |t: &Term| t.map_vars(&|v| if v == var { term.clone() } else { Term::Var(v.to_string()) });
        match self {
            Formula::Atom(r, args) => Formula::Atom(r.clone(), args.iter().map(sub).collect()),
            Formula::Eq(a, b) => Formula::Eq(sub(a), sub(b)),
            Formula::Not(a) => Formula::not(a.substitute_free(var, term)),
            Formula::And(a, b) => Formula::and(a.substitute_free(var, term), b.substitute_free(var, term)),
            Formula::Or(a, b) => Formula::or(a.substitute_free(var, term), b.substitute_free(var, term)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute_free(var, term), b.substitute_free(var, term))
            }
            Formula::Iff(a, b) => Formula::iff(a.substitute_free(var, term), b.substitute_free(var, term)),
            Formula::Quant(q, v, body) => {
                if v == var {
                    self.clone()
                } else {
                    Formula::Quant(*q, v.clone(), Box::new(body.substitute_free(var, term)))
                }
            }
        }
    }

    /// Renames relation, function and constant symbols through `rename`.
    pub fn rename_symbols(&self, rename: &dyn Fn(&str) -> Option<String>) -> Formula {
        fn term(t: &Term, rename: &dyn Fn(&str) -> Option<String>) -> Term {
            match t {
                Term::Var(v) => Term::Var(v.clone()),
                Term::Const(c) => Term::Const(rename(c).unwrap_or_else(|| c.clone())),
                Term::App(f, args) => Term::App(
                    rename(f).unwrap_or_else(|| f.clone()),
                    args.iter().map(|a| term(a, rename)).collect(),
                ),
            }
        }
        self.map_atoms(&|a| match a {
            Formula::Atom(r, args) => Formula::Atom(
                rename(r).unwrap_or_else(|| r.clone()),
                args.iter().map(|t| term(t, rename)).collect(),
            ),
            Formula::Eq(x, y) => Formula::Eq(term(x, rename), term(y, rename)),
            other => other.clone(),
        })
    }

    /// Rebuilds the formula with every atom/equality replaced via `f`.
    pub fn map_atoms(&self, f: &dyn Fn(&Formula) -> Formula) -> Formula {
        match self {
            Formula::Atom(..) | Formula::Eq(..) => f(self),
            Formula::Not(a) => Formula::not(a.map_atoms(f)),
            Formula::And(a, b) => Formula::and(a.map_atoms(f), b.map_atoms(f)),
            Formula::Or(a, b) => Formula::or(a.map_atoms(f), b.map_atoms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_atoms(f), b.map_atoms(f)),
            Formula::Iff(a, b) => Formula::iff(a.map_atoms(f), b.map_atoms(f)),
            Formula::Quant(q, v, body) => Formula::Quant(*q, v.clone(), Box::new(body.map_atoms(f))),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Quant(_, _, b) => 1 + b.quantifier_depth(),
            other => other
                .children()
                .into_iter()
                .map(Formula::quantifier_depth)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }
}

/// An ordered list of axioms; the background theory is the class of their models.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theory {
    pub axioms: Vec<Formula>,
}

impl Theory {
    pub fn new(axioms: Vec<Formula>) -> Theory {
        Theory { axioms }
    }

    pub fn empty() -> Theory {
        Theory::default()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.axioms.iter()
    }

    /// Index of the first axiom with a free variable, if any.
    pub fn first_open_axiom(&self) -> Option<usize> {
        self.axioms.iter().position(|a| !a.is_sentence())
    }

    pub fn symbols(&self) -> SymbolUse {
        let mut s = SymbolUse::default();
        self.axioms.iter().for_each(|a| s.merge(&a.symbols()));
        s
    }
}

impl<'a> IntoIterator for &'a Theory {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &str) -> Formula {
        Formula::atom("P", vec![Term::var(v)])
    }

    #[test]
    fn free_variables_examples() {
        assert!(Formula::forall("x", p("x")).free_variables().is_empty());
        assert_eq!(p("x").free_variables(), vec!["x".to_string()]);
        let r = Formula::forall("x", Formula::atom("R", vec![Term::var("x"), Term::var("y")]));
        assert_eq!(r.free_variables(), vec!["y".to_string()]);
    }

    #[test]
    fn free_variables_in_first_occurrence_order() {
        let f = Formula::and(
            Formula::atom("R", vec![Term::var("y"), Term::var("x")]),
            Formula::exists("y", Formula::atom("R", vec![Term::var("z"), Term::var("y")])),
        );
        assert_eq!(f.free_variables(), vec!["y", "x", "z"]);
    }

    #[test]
    fn addresses_follow_child_indices() {
        let f = Formula::forall("x", Formula::and(p("x"), Formula::atom("Q", vec![Term::var("x")])));
        let q = f.at(&Address(vec![0, 1])).unwrap();
        assert_eq!(q, &Formula::atom("Q", vec![Term::var("x")]));
        assert!(f.at(&Address(vec![0, 2])).is_none());
        let atoms: Vec<_> = f.atoms().into_iter().map(|(a, _)| a).collect();
        assert_eq!(atoms, vec![Address(vec![0, 0]), Address(vec![0, 1])]);
    }

    #[test]
    fn binders_above_lists_outermost_first() {
        let f = Formula::exists("y", Formula::forall("x", Formula::atom("R", vec![Term::var("x"), Term::var("y")])));
        let b = f.binders_above(&Address(vec![0, 0]));
        assert_eq!(
            b.iter().map(|(_, q, v)| (*q, v.as_str())).collect::<Vec<_>>(),
            vec![(Quantifier::Exists, "y"), (Quantifier::Forall, "x")]
        );
    }

    #[test]
    fn symbol_use_collects_terms() {
        let f = Formula::eq(
            Term::app("f", vec![Term::var("x")]),
            Term::constant("c"),
        );
        let s = f.symbols();
        assert!(s.equality);
        assert!(s.functions.contains("f"));
        assert!(s.constants.contains("c"));
    }
}
