//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! formula := ("forall" | "exists") VAR formula | iff
//! iff     := impl ("<->" impl)*            left-associative
//! impl    := disj ("->" impl)?             right-associative
//! disj    := conj ("|" conj)*
//! conj    := unary ("&" unary)*
//! unary   := "~" unary | ("forall" | "exists") VAR formula | "(" formula ")" | atom
//! atom    := REL "(" term ("," term)* ")" | REL | term "=" term
//! term    := VAR | CONST | FUNC "(" term ("," term)* ")"
//! ```
//!
//! A quantifier is also accepted in operand position; its body then extends
//! as far to the right as possible. Whether an identifier is a variable, a
//! constant, a function or a relation is decided by the vocabulary.

use thiserror::Error;

use super::ast::{Formula, Quantifier, Term};
use super::vocab::{is_identifier, SymbolKind, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("`{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("equality is not part of this vocabulary")]
    EqualityNotAllowed,
    #[error("`{0}` is a relation symbol and cannot be used as a term")]
    RelationAsTerm(String),
    #[error("`{0}` is declared as a symbol and cannot be bound by a quantifier")]
    BindsSymbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at line {line}, column {column}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source.
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Equals,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Not => "`~`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::Equals => "`=`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer;

impl Lexer {
    fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, (String, usize)> {
        let bytes = src.as_bytes();
        let mut i = 0;
        let mut out = Vec::new();
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'~' => Tok::Not,
                b'&' => Tok::And,
                b'|' => Tok::Or,
                b'=' => Tok::Equals,
                b'-' if bytes.get(i + 1) == Some(&b'>') => {
                    i += 1;
                    Tok::Implies
                }
                b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                    i += 2;
                    Tok::Iff
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                        i += 1;
                    }
                    out.push((Tok::Ident(src[start..i].to_string()), start));
                    continue;
                }
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err((format!("`{ch}`"), start));
                }
            };
            i += 1;
            out.push((tok, start));
        }
        out.push((Tok::End, src.len()));
        Ok(out)
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: &'a Vocabulary,
}

type PResult<T> = Result<T, ParseError>;

fn locate(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, kind: ParseErrorKind, offset: usize) -> ParseError {
        let (line, column) = locate(self.src, offset);
        ParseError {
            kind,
            offset,
            line,
            column,
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(kind, self.offset())
    }

    fn expected(&self, what: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax {
            expected: what.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.expected(&tok.describe()))
        }
    }

    fn quantifier_here(&self) -> Option<Quantifier> {
        match self.peek() {
            Tok::Ident(s) if s == "forall" => Some(Quantifier::Forall),
            Tok::Ident(s) if s == "exists" => Some(Quantifier::Exists),
            _ => None,
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if self.quantifier_here().is_some() {
            self.quantified()
        } else {
            self.iff()
        }
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let q = self.quantifier_here().expect("caller checked");
        self.bump();
        let at = self.offset();
        let var = match self.bump() {
            Tok::Ident(v) if v != "forall" && v != "exists" => v,
            other => {
                return Err(self.error_at(
                    ParseErrorKind::Syntax {
                        expected: "a variable".into(),
                        found: other.describe(),
                    },
                    at,
                ))
            }
        };
        if self.vocab.contains(&var) {
            return Err(self.error_at(ParseErrorKind::BindsSymbol(var), at));
        }
        let body = self.formula()?;
        Ok(Formula::Quant(q, var, Box::new(body)))
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            _ if self.quantifier_here().is_some() => self.quantified(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        let at = self.offset();
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(SymbolKind::Relation { arity, .. }) = self.vocab.lookup(&name) {
                self.bump();
                let args = if *self.peek() == Tok::LParen {
                    self.arguments()?
                } else {
                    Vec::new()
                };
                if args.len() != arity {
                    return Err(self.error_at(
                        ParseErrorKind::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        },
                        at,
                    ));
                }
                return Ok(Formula::Atom(name, args));
            }
            if self.vocab.lookup(&name).is_none() && *self.peek_at(1) == Tok::LParen {
                return Err(self.error_at(ParseErrorKind::UndeclaredSymbol(name), at));
            }
        }
        let lhs = self.term()?;
        if *self.peek() != Tok::Equals {
            return Err(match &lhs {
                Term::Var(v) => self.error_at(ParseErrorKind::UndeclaredSymbol(v.clone()), at),
                _ => self.expected("`=`"),
            });
        }
        let eq_at = self.offset();
        self.bump();
        if !self.vocab.with_equality() {
            return Err(self.error_at(ParseErrorKind::EqualityNotAllowed, eq_at));
        }
        let rhs = self.term()?;
        Ok(Formula::Eq(lhs, rhs))
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn term(&mut self) -> PResult<Term> {
        let at = self.offset();
        let name = match self.peek().clone() {
            Tok::Ident(n) if n != "forall" && n != "exists" => n,
            _ => return Err(self.expected("a term")),
        };
        self.bump();
        match self.vocab.lookup(&name) {
            Some(SymbolKind::Function { arity, .. }) => {
                let args = if *self.peek() == Tok::LParen {
                    self.arguments()?
                } else {
                    Vec::new()
                };
                if args.len() != arity {
                    return Err(self.error_at(
                        ParseErrorKind::ArityMismatch {
                            name,
                            expected: arity,
                            found: args.len(),
                        },
                        at,
                    ));
                }
                Ok(Term::App(name, args))
            }
            Some(SymbolKind::Constant { .. }) => Ok(Term::Const(name)),
            Some(SymbolKind::Relation { .. }) => Err(self.error_at(ParseErrorKind::RelationAsTerm(name), at)),
            None => {
                if *self.peek() == Tok::LParen {
                    return Err(self.error_at(ParseErrorKind::UndeclaredSymbol(name), at));
                }
                debug_assert!(is_identifier(&name));
                Ok(Term::Var(name))
            }
        }
    }
}

/// Parses one formula over `vocab`.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let toks = Lexer::tokenize(text).map_err(|(found, offset)| {
        let (line, column) = locate(text, offset);
        ParseError {
            kind: ParseErrorKind::Syntax {
                expected: "a token".into(),
                found,
            },
            offset,
            line,
            column,
        }
    })?;
    let mut p = Parser {
        src: text,
        toks,
        pos: 0,
        vocab,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.expected("end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::new(true)
            .with_relation("P", 1)
            .unwrap()
            .with_relation("Q", 1)
            .unwrap()
            .with_relation("S", 1)
            .unwrap()
            .with_relation("T", 3)
            .unwrap()
            .with_relation("R", 2)
            .unwrap()
            .with_relation("A", 0)
            .unwrap()
            .with_function("f", 1)
            .unwrap()
            .with_constant("c")
            .unwrap()
    }

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn guarded_universal() {
        let f = parse("forall x (Q(x) -> P(x))", &vocab()).unwrap();
        assert_eq!(
            f,
            Formula::forall(
                "x",
                Formula::implies(Formula::atom("Q", vec![x()]), Formula::atom("P", vec![x()]))
            )
        );
    }

    #[test]
    fn open_atom() {
        let f = parse("P(x)", &vocab()).unwrap();
        assert_eq!(f, Formula::atom("P", vec![x()]));
        assert_eq!(f.free_variables(), vec!["x"]);
    }

    #[test]
    fn running_example_with_shadowing() {
        let f = parse("exists y (S(y) & forall x ~forall y (T(x,y,x) | S(y)))", &vocab()).unwrap();
        let t = Formula::atom("T", vec![x(), Term::var("y"), x()]);
        let expected = Formula::exists(
            "y",
            Formula::and(
                Formula::atom("S", vec![Term::var("y")]),
                Formula::forall(
                    "x",
                    Formula::not(Formula::forall("y", Formula::or(t, Formula::atom("S", vec![Term::var("y")])))),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn precedence_and_associativity() {
        let v = vocab();
        let f = parse("P(x) & Q(x) | S(x) -> P(x) -> Q(x) <-> A", &v).unwrap();
        let p = Formula::atom("P", vec![x()]);
        let q = Formula::atom("Q", vec![x()]);
        let s = Formula::atom("S", vec![x()]);
        let expected = Formula::iff(
            Formula::implies(
                Formula::or(Formula::and(p.clone(), q.clone()), s),
                Formula::implies(p, q),
            ),
            Formula::atom("A", vec![]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn equality_and_terms() {
        let f = parse("~(x = f(c))", &vocab()).unwrap();
        assert_eq!(
            f,
            Formula::not(Formula::eq(x(), Term::app("f", vec![Term::constant("c")])))
        );
    }

    #[test]
    fn error_kinds() {
        let v = vocab();
        let e = parse("forall x (Z(x))", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol("Z".into()));
        assert_eq!(e.column, 11);
        let e = parse("R(x)", &v).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { expected: 2, found: 1, .. }));
        let e = parse("P(x) &", &v).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax { .. }));
        let no_eq = Vocabulary::new(false).with_relation("P", 1).unwrap();
        let e = parse("x = y", &no_eq).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::EqualityNotAllowed);
        let e = parse("forall c P(c)", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::BindsSymbol("c".into()));
        let e = parse("P(x) # Q(x)", &v).unwrap_err();
        assert_eq!(e.offset, 5);
        let e = parse("x", &v).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UndeclaredSymbol("x".into()));
    }

    #[test]
    fn error_positions_are_line_aware() {
        let e = parse("P(x) &\n  Z(x)", &vocab()).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }
}
