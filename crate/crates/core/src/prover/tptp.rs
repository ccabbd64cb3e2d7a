//! TPTP first-order form output, SZS status lines, and finite models printed
//! by a finite model builder.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;
use std::sync::Arc;

use regex::Regex;
use thiserror::Error;

use super::query::SatQuery;
use crate::semantics::Structure;
use crate::syntax::{Formula, Quantifier, SymbolKind, Term, Vocabulary};

/// Maps vocabulary symbols to TPTP functor names and back.
///
/// A name keeps its spelling with the first letter lowercased; a leading `_`
/// becomes `s_`. When two symbols would map to the same name (for example `E`
/// and `e`), the one whose first letter was changed gets the suffix `_u<hex>`
/// of that letter's code point, repeated until the name is free.
#[derive(Debug, Clone)]
pub struct Mangler {
    forward: HashMap<String, String>,
    backward: HashMap<String, String>,
}

fn base_name(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => c.to_ascii_lowercase().to_string() + chars.as_str(),
        _ => format!("s{name}"),
    }
}

impl Mangler {
    pub fn new(vocab: &Vocabulary) -> Mangler {
        let mut names: Vec<&str> = vocab.symbol_names().collect();
        names.sort_unstable();
        let mut forward = HashMap::new();
        let mut backward: HashMap<String, String> = HashMap::new();
        // Names that need no change claim their spelling first.
        let (unchanged, changed): (Vec<&str>, Vec<&str>) = names.into_iter().partition(|n| base_name(n) == *n);
        for n in unchanged {
            forward.insert(n.to_string(), n.to_string());
            backward.insert(n.to_string(), n.to_string());
        }
        for n in changed {
            let mut m = base_name(n);
            let code = n.chars().next().map(|c| c as u32).unwrap_or(0);
            while backward.contains_key(&m) || is_reserved(&m) {
                write!(m, "_u{code:x}").expect("write to string");
            }
            forward.insert(n.to_string(), m.clone());
            backward.insert(m, n.to_string());
        }
        Mangler { forward, backward }
    }

    pub fn mangle<'a>(&'a self, name: &'a str) -> &'a str {
        self.forward.get(name).map(String::as_str).unwrap_or(name)
    }

    pub fn demangle(&self, name: &str) -> Option<&str> {
        self.backward.get(name).map(String::as_str)
    }
}

fn is_reserved(name: &str) -> bool {
    name.starts_with("fmb_")
}

struct Printer<'a> {
    mangler: &'a Mangler,
    next_var: usize,
    scope: Vec<(String, String)>,
}

impl Printer<'_> {
    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Var(v) => {
                let name = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| n == v)
                    .map(|(_, x)| x.as_str())
                    .expect("query formulas are closed");
                out.push_str(name);
            }
            Term::Const(c) => out.push_str(self.mangler.mangle(c)),
            Term::App(f, args) => {
                out.push_str(self.mangler.mangle(f));
                self.args(args, out);
            }
        }
    }

    fn args(&self, args: &[Term], out: &mut String) {
        out.push('(');
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.term(a, out);
        }
        out.push(')');
    }

    /// Writes `f` so that it can stand as an operand of a binary connective.
    fn unit(&mut self, f: &Formula, out: &mut String) {
        match f {
            Formula::Atom(..) | Formula::Not(..) => self.formula(f, out),
            _ => {
                out.push('(');
                self.formula(f, out);
                out.push(')');
            }
        }
    }

    fn formula(&mut self, f: &Formula, out: &mut String) {
        let bin = |p: &mut Self, a: &Formula, op: &str, b: &Formula, out: &mut String| {
            p.unit(a, out);
            let _ = write!(out, " {op} ");
            p.unit(b, out);
        };
        match f {
            Formula::Atom(r, args) => {
                out.push_str(self.mangler.mangle(r));
                if !args.is_empty() {
                    self.args(args, out);
                }
            }
            Formula::Eq(a, b) => {
                self.term(a, out);
                out.push_str(" = ");
                self.term(b, out);
            }
            Formula::Not(a) => {
                out.push('~');
                match a.as_ref() {
                    Formula::Atom(..) | Formula::Not(..) => self.formula(a, out),
                    _ => {
                        out.push('(');
                        self.formula(a, out);
                        out.push(')');
                    }
                }
            }
            Formula::And(a, b) => bin(self, a, "&", b, out),
            Formula::Or(a, b) => bin(self, a, "|", b, out),
            Formula::Implies(a, b) => bin(self, a, "=>", b, out),
            Formula::Iff(a, b) => bin(self, a, "<=>", b, out),
            Formula::Quant(q, v, body) => {
                let x = format!("X{}", self.next_var);
                self.next_var += 1;
                let sym = match q {
                    Quantifier::Forall => '!',
                    Quantifier::Exists => '?',
                };
                let _ = write!(out, "{sym} [{x}] : ");
                self.scope.push((v.clone(), x));
                self.unit(body, out);
                self.scope.pop();
            }
        }
    }
}

/// One formula in TPTP syntax. Variables are numbered `X0, X1, ...` in
/// binder order.
pub fn formula_to_tptp(f: &Formula, mangler: &Mangler) -> String {
    let mut p = Printer {
        mangler,
        next_var: 0,
        scope: Vec::new(),
    };
    let mut out = String::new();
    p.formula(f, &mut out);
    out
}

/// The query as a TPTP problem: one `fof(axN, axiom, ...)` line per axiom.
pub fn to_tptp(q: &SatQuery) -> String {
    let mangler = Mangler::new(&q.vocab);
    let mut out = String::new();
    for (i, a) in q.axioms.iter().enumerate() {
        let _ = writeln!(out, "fof(ax{i}, axiom, {}).", formula_to_tptp(a, &mangler));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SzsStatus {
    Satisfiable,
    Unsatisfiable,
    Timeout,
    GaveUp,
    Other,
}

impl SzsStatus {
    pub fn is_decisive(self) -> bool {
        matches!(self, SzsStatus::Satisfiable | SzsStatus::Unsatisfiable)
    }
}

/// The first `SZS status` line of a prover transcript.
pub fn parse_szs_status(output: &str) -> Option<SzsStatus> {
    for line in output.lines() {
        let Some(pos) = line.find("SZS status") else { continue };
        let word = line[pos + "SZS status".len()..].split_whitespace().next()?;
        return Some(match word {
            "Satisfiable" | "CounterSatisfiable" | "FiniteModel" | "Model" => SzsStatus::Satisfiable,
            "Unsatisfiable" | "Theorem" | "ContradictoryAxioms" => SzsStatus::Unsatisfiable,
            "Timeout" => SzsStatus::Timeout,
            "GaveUp" | "ResourceOut" | "MemoryOut" | "Unknown" | "Inappropriate" => SzsStatus::GaveUp,
            _ => SzsStatus::Other,
        });
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelParseError {
    #[error("no finite model block in the output")]
    NoModel,
    #[error("could not read the domain size")]
    NoDomain,
    #[error("unrecognized literal `{0}`")]
    BadLiteral(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
}

/// Reads the finite model printed between `SZS output start FiniteModel`
/// and `SZS output end FiniteModel`.
///
/// Domain elements are the constants `fmb_$i_1 .. fmb_$i_n`. Interpretations
/// are read from the `tff(function_f, ...)`, `tff(predicate_p, ...)` and
/// `tff(c_definition, ...)` statements, each a conjunction of ground
/// literals. Tuples not mentioned are absent from relations.
pub fn parse_finite_model(output: &str, vocab: &Arc<Vocabulary>) -> Result<Structure, ModelParseError> {
    let start = output.find("SZS output start FiniteModel").ok_or(ModelParseError::NoModel)?;
    let end = output[start..]
        .find("SZS output end FiniteModel")
        .map(|e| start + e)
        .ok_or(ModelParseError::NoModel)?;
    let block = &output[start..end];

    let elem = Regex::new(r"fmb_\$i_(\d+)").expect("valid regex");
    let size = elem
        .captures_iter(block)
        .filter_map(|c| c[1].parse::<usize>().ok())
        .max()
        .ok_or(ModelParseError::NoDomain)?;
    let mangler = Mangler::new(vocab);
    let mut s = Structure::new(vocab.clone(), size);

    let stmt = Regex::new(r"(?s)tff\(\s*([A-Za-z0-9_$]+)\s*,\s*axiom\s*,(.*?)\)\s*\.").expect("valid regex");
    let literal = Regex::new(r"^(~)?\s*([a-z][A-Za-z0-9_]*)\s*(?:\(([^()]*)\))?\s*(?:=\s*(fmb_\$i_\d+))?$")
        .expect("valid regex");
    let element = |tok: &str| -> Result<usize, ModelParseError> {
        elem.captures(tok.trim())
            .and_then(|c| c[1].parse::<usize>().ok())
            .filter(|&k| k >= 1 && k <= size)
            .map(|k| k - 1)
            .ok_or_else(|| ModelParseError::BadLiteral(tok.to_string()))
    };

    for cap in stmt.captures_iter(block) {
        let name = &cap[1];
        if !(name.starts_with("function_") || name.starts_with("predicate_") || name.ends_with("_definition")) {
            continue;
        }
        let mut body = cap[2].trim();
        while body.starts_with('(') && body.ends_with(')') && balanced(&body[1..body.len() - 1]) {
            body = body[1..body.len() - 1].trim();
        }
        for lit in body.split('&') {
            let lit = lit.trim();
            if lit.is_empty() || lit == "$true" || lit == "$false" {
                continue;
            }
            let m = literal
                .captures(lit)
                .ok_or_else(|| ModelParseError::BadLiteral(lit.to_string()))?;
            let negated = m.get(1).is_some();
            let sym = mangler
                .demangle(&m[2])
                .ok_or_else(|| ModelParseError::UnknownSymbol(m[2].to_string()))?
                .to_string();
            let args: Vec<usize> = match m.get(3) {
                Some(a) if !a.as_str().trim().is_empty() => {
                    a.as_str().split(',').map(element).collect::<Result<_, _>>()?
                }
                _ => Vec::new(),
            };
            let value = m.get(4).map(|v| element(v.as_str())).transpose()?;
            let bad = || ModelParseError::BadLiteral(lit.to_string());
            match (vocab.lookup(&sym), value) {
                (Some(SymbolKind::Relation { .. }), None) => {
                    s.set_relation(&sym, &args, !negated).map_err(|_| bad())?
                }
                (Some(SymbolKind::Function { .. }), Some(v)) if !negated => {
                    s.set_function(&sym, &args, v).map_err(|_| bad())?
                }
                (Some(SymbolKind::Constant { .. }), Some(v)) if !negated && args.is_empty() => {
                    s.set_constant(&sym, v).map_err(|_| bad())?
                }
                _ => return Err(bad()),
            }
        }
    }
    Ok(s)
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Renders a structure in the same finite model format the parser reads.
/// Used by tests and by stand-in provers.
pub fn render_finite_model(s: &Structure) -> String {
    let vocab = s.vocab();
    let mangler = Mangler::new(vocab);
    let e = |k: usize| format!("fmb_$i_{}", k + 1);
    let mut out = String::from("% SZS output start FiniteModel for input\n");
    let _ = writeln!(out, "% domain size is {}", s.size());
    for k in 0..s.size() {
        let _ = writeln!(out, "tff(declare_$i{},type,{}:$i).", k + 1, e(k));
    }
    let mut defs: BTreeMap<String, String> = BTreeMap::new();
    for (i, c) in vocab.constants().iter().enumerate() {
        let m = mangler.mangle(c);
        defs.insert(format!("{m}_definition"), format!("{m} = {}", e(s.constant_value(i))));
    }
    for (i, (f, arity)) in vocab.functions().iter().enumerate() {
        let m = mangler.mangle(f);
        let lits: Vec<String> = s
            .function_table(i)
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let args: Vec<String> = s.tuple_at(*arity, idx).into_iter().map(e).collect();
                format!("{m}({}) = {}", args.join(","), e(*v))
            })
            .collect();
        defs.insert(format!("function_{m}"), lits.join("\n         & "));
    }
    for (i, (r, arity)) in vocab.relations().iter().enumerate() {
        let m = mangler.mangle(r);
        let lits: Vec<String> = s
            .relation_table(i)
            .iter()
            .enumerate()
            .map(|(idx, b)| {
                let neg = if *b { "" } else { "~" };
                if *arity == 0 {
                    format!("{neg}{m}")
                } else {
                    let args: Vec<String> = s.tuple_at(*arity, idx).into_iter().map(e).collect();
                    format!("{neg}{m}({})", args.join(","))
                }
            })
            .collect();
        defs.insert(format!("predicate_{m}"), lits.join("\n         & "));
    }
    for (name, body) in defs {
        let _ = writeln!(out, "tff({name},axiom,\n           {body}\n).");
    }
    out.push_str("% SZS output end FiniteModel for input\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::query::QueryOrigin;
    use crate::syntax::parse;

    fn vocab() -> Arc<Vocabulary> {
        Arc::new(
            Vocabulary::new(true)
                .with_relation("P", 1)
                .unwrap()
                .with_relation("E", 2)
                .unwrap()
                .with_constant("e")
                .unwrap()
                .with_function("f", 1)
                .unwrap()
                .with_relation("_q", 0)
                .unwrap(),
        )
    }

    fn query(srcs: &[&str]) -> SatQuery {
        let v = vocab();
        let axioms = srcs.iter().map(|s| parse(s, &v).unwrap()).collect();
        SatQuery::new(axioms, v, QueryOrigin::Equivalence).unwrap()
    }

    #[test]
    fn single_axiom_line() {
        assert_eq!(to_tptp(&query(&["forall x P(x)"])), "fof(ax0, axiom, ! [X0] : p(X0)).\n");
    }

    #[test]
    fn connectives_and_equality() {
        let text = to_tptp(&query(&["~((forall x P(x)) <-> (exists x P(x)))", "forall x forall y (x = y -> E(x, f(y)))"]));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "fof(ax0, axiom, ~((! [X0] : p(X0)) <=> (? [X1] : p(X1)))).");
        assert_eq!(lines[1], "fof(ax1, axiom, ! [X0] : (! [X1] : ((X0 = X1) => e_u45(X0,f(X1))))).");
    }

    #[test]
    fn mangling_is_invertible() {
        let m = Mangler::new(&vocab());
        for n in ["P", "E", "e", "f", "_q"] {
            assert_eq!(m.demangle(m.mangle(n)), Some(n));
        }
        assert_eq!(m.mangle("e"), "e");
        assert_eq!(m.mangle("E"), "e_u45");
        assert_eq!(m.mangle("_q"), "s_q");
    }

    #[test]
    fn szs_lines() {
        assert_eq!(parse_szs_status("% SZS status Satisfiable for x"), Some(SzsStatus::Satisfiable));
        assert_eq!(parse_szs_status("junk\n% SZS status Unsatisfiable for x"), Some(SzsStatus::Unsatisfiable));
        assert_eq!(parse_szs_status("% SZS status Timeout for x"), Some(SzsStatus::Timeout));
        assert_eq!(parse_szs_status("nothing"), None);
    }

    #[test]
    fn finite_model_round_trip() {
        let v = vocab();
        let mut s = Structure::new(v.clone(), 3);
        s.set_relation("P", &[1], true).unwrap();
        s.set_relation("E", &[2, 0], true).unwrap();
        s.set_relation("_q", &[], true).unwrap();
        s.set_function("f", &[0], 2).unwrap();
        s.set_constant("e", 1).unwrap();
        let text = format!("% SZS status Satisfiable for input\n{}", render_finite_model(&s));
        assert_eq!(parse_finite_model(&text, &v).unwrap(), s);
    }

    #[test]
    fn vampire_style_block() {
        let v = Arc::new(Vocabulary::new(true).with_relation("P", 1).unwrap());
        let text = "\
% SZS output start FiniteModel for input
% Finite Model Found!
% domain size is 2
tff(declare_$i,type,$i:$tType).
tff(declare_$i1,type,fmb_$i_1:$i).
tff(declare_$i2,type,fmb_$i_2:$i).
tff(finite_domain,axiom,
      ! [X:$i] : (
         X = fmb_$i_1 | X = fmb_$i_2
      ) ).

tff(declare_p,type,p: $i > $o ).
tff(predicate_p,axiom,
           p(fmb_$i_1)
         & ~p(fmb_$i_2)

).
% SZS output end FiniteModel for input
";
        let s = parse_finite_model(text, &v).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.relation_tuples("P").unwrap(), vec![vec![0]]);
        assert_eq!(parse_finite_model("SZS status Satisfiable", &v), Err(ModelParseError::NoModel));
    }
}
