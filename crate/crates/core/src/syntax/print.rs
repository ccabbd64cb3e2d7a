use std::fmt::{self, Write};

use super::ast::{Formula, Quantifier, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => u8::MAX,
    }
}

/// A quantifier body extends to the right as far as possible, so a formula
/// whose printed form ends in one must be wrapped when used as an operand.
fn ends_open(f: &Formula) -> bool {
    match f {
        Formula::Quant(..) => true,
        Formula::Not(inner) => ends_open(inner),
        _ => false,
    }
}

fn write_operand(out: &mut String, f: &Formula, min_prec: u8) {
    if precedence(f) < min_prec || ends_open(f) {
        out.push('(');
        write_formula(out, f);
        out.push(')');
    } else {
        write_formula(out, f);
    }
}

fn write_binary(out: &mut String, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8) {
    write_operand(out, a, lmin);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    write_operand(out, b, rmin);
}

fn write_formula(out: &mut String, f: &Formula) {
    match f {
        Formula::Atom(r, args) => {
            out.push_str(r);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let _ = write!(out, "{a}");
                }
                out.push(')');
            }
        }
        Formula::Eq(a, b) => {
            let _ = write!(out, "{a} = {b}");
        }
        Formula::Not(inner) => {
            out.push('~');
            match inner.as_ref() {
                Formula::Eq(..) => {
                    out.push('(');
                    write_formula(out, inner);
                    out.push(')');
                }
                i if precedence(i) == u8::MAX => write_formula(out, i),
                i => {
                    out.push('(');
                    write_formula(out, i);
                    out.push(')');
                }
            }
        }
        Formula::And(a, b) => write_binary(out, a, "&", b, AND, AND + 1),
        Formula::Or(a, b) => write_binary(out, a, "|", b, OR, OR + 1),
        Formula::Implies(a, b) => write_binary(out, a, "->", b, IMPLIES + 1, IMPLIES),
        Formula::Iff(a, b) => write_binary(out, a, "<->", b, IFF, IFF + 1),
        Formula::Quant(q, v, body) => {
            let _ = write!(out, "{q} {v} ");
            if precedence(body) == u8::MAX {
                write_formula(out, body);
            } else {
                out.push('(');
                write_formula(out, body);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}

/// Mathematical notation (∀, ∃, ¬, ∧, ∨, →, ↔). Display only; not parseable.
pub fn pretty(f: &Formula) -> String {
    fn go(out: &mut String, f: &Formula, top: bool) {
        match f {
            Formula::Atom(..) | Formula::Eq(..) => {
                let mut s = String::new();
                write_formula(&mut s, f);
                out.push_str(&s);
            }
            Formula::Not(i) => {
                out.push('¬');
                go(out, i, false);
            }
            Formula::Quant(q, v, b) => {
                out.push_str(match q {
                    Quantifier::Forall => "∀",
                    Quantifier::Exists => "∃",
                });
                out.push_str(v);
                out.push(' ');
                go(out, b, false);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                let op = match f {
                    Formula::And(..) => "∧",
                    Formula::Or(..) => "∨",
                    Formula::Implies(..) => "→",
                    _ => "↔",
                };
                if !top {
                    out.push('(');
                }
                go(out, a, false);
                let _ = write!(out, " {op} ");
                go(out, b, false);
                if !top {
                    out.push(')');
                }
            }
        }
    }
    let mut s = String::new();
    go(&mut s, f, true);
    s
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::super::vocab::Vocabulary;
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::new(true)
            .with_relation("P", 1)
            .unwrap()
            .with_relation("Q", 1)
            .unwrap()
            .with_relation("R", 2)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
    }

    #[test]
    fn prints_in_input_style() {
        let v = vocab();
        let f = parse("forall x (Q(x) -> P(x))", &v).unwrap();
        assert_eq!(f.to_string(), "forall x (Q(x) -> P(x))");
        let f = parse("~(x = f(x)) & exists y R(x,y)", &v).unwrap();
        assert_eq!(f.to_string(), "~(x = f(x)) & (exists y R(x, y))");
    }

    #[test]
    fn open_operands_get_parenthesized() {
        let v = vocab();
        let f = Formula::and(
            Formula::not(Formula::forall("x", Formula::atom("P", vec![Term::var("x")]))),
            Formula::atom("Q", vec![Term::var("y")]),
        );
        let printed = f.to_string();
        assert_eq!(printed, "(~forall x P(x)) & Q(y)");
        assert_eq!(parse(&printed, &v).unwrap(), f);
    }

    #[test]
    fn associativity_survives_printing() {
        let v = vocab();
        for src in [
            "P(x) & (Q(x) & P(y))",
            "(P(x) -> Q(x)) -> P(y)",
            "P(x) -> Q(x) -> P(y)",
            "P(x) <-> (Q(x) <-> P(y))",
            "~~P(x)",
            "~(P(x) | Q(x))",
        ] {
            let f = parse(src, &v).unwrap();
            assert_eq!(parse(&f.to_string(), &v).unwrap(), f, "{src}");
        }
    }

    #[test]
    fn pretty_uses_math_symbols() {
        let f = parse("forall x (Q(x) -> P(x))", &vocab()).unwrap();
        assert_eq!(pretty(&f), "∀x (Q(x) → P(x))");
    }
}
