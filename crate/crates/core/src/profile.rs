//! Quantifier profiles of atoms and guard records.
//!
//! Polarity is tracked on the original formula, which gives the same
//! quantifiers and valences as reading them off the negation normal form
//! while keeping addresses into the original syntax tree.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::syntax::{Address, Formula, Quantifier, Term};

pub const EQUALITY_SYMBOL: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("address {0} does not exist in the formula")]
    InvalidAddress(Address),
    #[error("node at {0} is not an atom")]
    NotAnAtom(Address),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixEntry {
    /// The quantifier as it appears in the negation normal form.
    pub quantifier: Quantifier,
    pub variable: String,
    /// The binding quantifier node in the original formula.
    pub binder: Address,
}

/// Closest binders of an atom's bound variables, outermost first.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct QuantPrefix(pub Vec<PrefixEntry>);

impl QuantPrefix {
    pub fn entries(&self) -> &[PrefixEntry] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn find(&self, var: &str) -> Option<(usize, &PrefixEntry)> {
        self.0.iter().enumerate().find(|(_, e)| e.variable == var)
    }

    pub fn last(&self) -> Option<&PrefixEntry> {
        self.0.last()
    }
}

impl fmt::Display for QuantPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| format!("{}{}", e.quantifier.symbol(), e.variable)).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Quantifier kinds with the 1-based argument positions each binder covers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PrefixType(pub Vec<(Quantifier, BTreeSet<usize>)>);

impl PrefixType {
    pub fn of(entries: &[(Quantifier, &[usize])]) -> PrefixType {
        PrefixType(entries.iter().map(|(q, ps)| (*q, ps.iter().copied().collect())).collect())
    }

    pub fn positions(&self) -> BTreeSet<usize> {
        self.0.iter().flat_map(|(_, p)| p.iter().copied()).collect()
    }
}

impl fmt::Display for PrefixType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (q, ps) in &self.0 {
            let ps: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
            write!(f, "{}{{{}}}", q.symbol(), ps.join(","))?;
        }
        Ok(())
    }
}

impl Serialize for PrefixType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valence {
    Positive,
    Negative,
}

impl Valence {
    pub fn of(positive: bool) -> Valence {
        if positive {
            Valence::Positive
        } else {
            Valence::Negative
        }
    }

    pub fn flip(self) -> Valence {
        match self {
            Valence::Positive => Valence::Negative,
            Valence::Negative => Valence::Positive,
        }
    }
}

impl fmt::Display for Valence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Valence::Positive => "+",
            Valence::Negative => "-",
        })
    }
}

impl Serialize for Valence {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Argument term with variables replaced by their role: a bound variable
/// becomes its quantifier and its rank in the atom's prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermSkeleton {
    Bound(Quantifier, usize),
    Free(String),
    Const(String),
    App(String, Vec<TermSkeleton>),
}

impl fmt::Display for TermSkeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermSkeleton::Bound(q, r) => write!(f, "{}{}", q.symbol(), r),
            TermSkeleton::Free(v) => write!(f, "?{v}"),
            TermSkeleton::Const(c) => f.write_str(c),
            TermSkeleton::App(g, args) => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{g}({})", args.join(","))
            }
        }
    }
}

impl Serialize for TermSkeleton {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The comparable part of a profile.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProfileKey {
    pub symbol: String,
    pub valence: Valence,
    pub prefix_type: PrefixType,
    pub fingerprint: Vec<TermSkeleton>,
}

impl fmt::Display for ProfileKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.symbol, self.valence, self.prefix_type)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomProfile {
    pub symbol: String,
    pub valence: Valence,
    pub prefix_type: PrefixType,
    pub address: Address,
    pub fingerprint: Vec<TermSkeleton>,
    pub prefix: QuantPrefix,
    #[serde(serialize_with = "display_str")]
    pub atom: Formula,
}

fn display_str<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl AtomProfile {
    pub fn key(&self) -> ProfileKey {
        ProfileKey {
            symbol: self.symbol.clone(),
            valence: self.valence,
            prefix_type: self.prefix_type.clone(),
            fingerprint: self.fingerprint.clone(),
        }
    }

    /// The (symbol, valence, prefix type) triple.
    pub fn triple(&self) -> (&str, Valence, &PrefixType) {
        (&self.symbol, self.valence, &self.prefix_type)
    }

    pub fn args(&self) -> Vec<&Term> {
        atom_args(&self.atom)
    }
}

impl fmt::Display for AtomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.symbol, self.valence, self.prefix_type)
    }
}

pub fn atom_args(atom: &Formula) -> Vec<&Term> {
    match atom {
        Formula::Atom(_, args) => args.iter().collect(),
        Formula::Eq(a, b) => vec![a, b],
        _ => Vec::new(),
    }
}

fn atom_symbol(atom: &Formula) -> &str {
    match atom {
        Formula::Atom(r, _) => r,
        _ => EQUALITY_SYMBOL,
    }
}

#[derive(Clone)]
struct Binder {
    quantifier: Quantifier,
    variable: String,
    address: Address,
}

fn prefix_of(atom: &Formula, stack: &[Binder]) -> QuantPrefix {
    let mut vars = Vec::new();
    for t in atom_args(atom) {
        t.variables(&mut vars);
    }
    let mut found: Vec<usize> = Vec::new();
    for v in &vars {
        if let Some(i) = stack.iter().rposition(|b| &b.variable == v) {
            if !found.contains(&i) {
                found.push(i);
            }
        }
    }
    found.sort_unstable();
    QuantPrefix(
        found
            .into_iter()
            .map(|i| PrefixEntry {
                quantifier: stack[i].quantifier,
                variable: stack[i].variable.clone(),
                binder: stack[i].address.clone(),
            })
            .collect(),
    )
}

fn skeleton(t: &Term, prefix: &QuantPrefix) -> TermSkeleton {
    match t {
        Term::Var(v) => match prefix.find(v) {
            Some((rank, e)) => TermSkeleton::Bound(e.quantifier, rank),
            None => TermSkeleton::Free(v.clone()),
        },
        Term::Const(c) => TermSkeleton::Const(c.clone()),
        Term::App(g, args) => TermSkeleton::App(g.clone(), args.iter().map(|a| skeleton(a, prefix)).collect()),
    }
}

fn profile_of(atom: &Formula, address: Address, positive: bool, stack: &[Binder]) -> AtomProfile {
    let prefix = prefix_of(atom, stack);
    let args = atom_args(atom);
    let mut prefix_type = Vec::new();
    for e in prefix.entries() {
        let ps: BTreeSet<usize> = args
            .iter()
            .enumerate()
            .filter(|(_, t)| t.as_var() == Some(e.variable.as_str()))
            .map(|(j, _)| j + 1)
            .collect();
        if !ps.is_empty() {
            prefix_type.push((e.quantifier, ps));
        }
    }
    AtomProfile {
        symbol: atom_symbol(atom).to_string(),
        valence: Valence::of(positive),
        prefix_type: PrefixType(prefix_type),
        address,
        fingerprint: args.iter().map(|t| skeleton(t, &prefix)).collect(),
        prefix,
        atom: atom.clone(),
    }
}

fn walk(f: &Formula, addr: Address, positive: bool, stack: &mut Vec<Binder>, out: &mut Vec<AtomProfile>) {
    match f {
        Formula::Atom(..) | Formula::Eq(..) => out.push(profile_of(f, addr, positive, stack)),
        Formula::Not(a) => walk(a, addr.child(0), !positive, stack, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            walk(a, addr.child(0), positive, stack, out);
            walk(b, addr.child(1), positive, stack, out);
        }
        Formula::Implies(a, b) => {
            walk(a, addr.child(0), !positive, stack, out);
            walk(b, addr.child(1), positive, stack, out);
        }
        Formula::Iff(a, b) => {
            for (i, c) in [a, b].into_iter().enumerate() {
                walk(c, addr.child(i), positive, stack, out);
                walk(c, addr.child(i), !positive, stack, out);
            }
        }
        Formula::Quant(q, v, body) => {
            stack.push(Binder {
                quantifier: if positive { *q } else { q.dual() },
                variable: v.clone(),
                address: addr.clone(),
            });
            walk(body, addr.child(0), positive, stack, out);
            stack.pop();
        }
    }
}

/// One profile per atom occurrence, in pre-order; atoms below a
/// biconditional occur with both valences.
pub fn formula_profile(f: &Formula) -> Vec<AtomProfile> {
    let mut out = Vec::new();
    walk(f, Address::root(), true, &mut Vec::new(), &mut out);
    let mut seen = BTreeSet::new();
    out.retain(|p| seen.insert((p.address.clone(), p.valence)));
    out
}

fn path_state(f: &Formula, addr: &Address) -> Result<(bool, Vec<Binder>), ProfileError> {
    let mut positive = true;
    let mut stack = Vec::new();
    let mut cur = f;
    let mut here = Address::root();
    for &i in &addr.0 {
        let next = *cur
            .children()
            .get(i)
            .ok_or_else(|| ProfileError::InvalidAddress(addr.clone()))?;
        match cur {
            Formula::Not(_) => positive = !positive,
            Formula::Implies(..) if i == 0 => positive = !positive,
            Formula::Quant(q, v, _) => stack.push(Binder {
                quantifier: if positive { *q } else { q.dual() },
                variable: v.clone(),
                address: here.clone(),
            }),
            _ => {}
        }
        cur = next;
        here = here.child(i);
    }
    Ok((positive, stack))
}

/// Profile of the atom at `addr`. Below a biconditional the polarity the
/// operand has in the original formula is used.
pub fn profile_at(f: &Formula, addr: &Address) -> Result<AtomProfile, ProfileError> {
    let node = f.at(addr).ok_or_else(|| ProfileError::InvalidAddress(addr.clone()))?;
    if !node.is_atomic() {
        return Err(ProfileError::NotAnAtom(addr.clone()));
    }
    let (positive, stack) = path_state(f, addr)?;
    Ok(profile_of(node, addr.clone(), positive, &stack))
}

pub fn atom_quantifier_prefix(f: &Formula, addr: &Address) -> Result<QuantPrefix, ProfileError> {
    profile_at(f, addr).map(|p| p.prefix)
}

/// The distinct profile keys of a formula.
pub fn profile_set(profiles: &[AtomProfile]) -> BTreeSet<ProfileKey> {
    profiles.iter().map(|p| p.key()).collect()
}

/// Occurrences in `a` whose key occurs more often in `a` than in `b`.
pub fn unmatched<'a>(a: &'a [AtomProfile], b: &[AtomProfile]) -> Vec<&'a AtomProfile> {
    let mut count: HashMap<ProfileKey, isize> = HashMap::new();
    for p in b {
        *count.entry(p.key()).or_insert(0) -= 1;
    }
    for p in a {
        *count.entry(p.key()).or_insert(0) += 1;
    }
    a.iter().filter(|p| count[&p.key()] > 0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GuardKind {
    Guarded,
    WronglyGuarded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuardRecord {
    pub guard: AtomProfile,
    pub guarded: AtomProfile,
    pub variable: String,
    pub kind: GuardKind,
    /// The quantifier node binding the guarded variable.
    pub binder: Address,
    /// The implication or conjunction node realizing the pattern.
    pub witness: Address,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Guards {
    pub guards: Vec<GuardRecord>,
    pub wrong_guards: Vec<GuardRecord>,
}

impl Guards {
    pub fn all(&self) -> impl Iterator<Item = &GuardRecord> {
        self.guards.iter().chain(self.wrong_guards.iter())
    }

    /// Whether `var` in the atom at `atom` is guarded (correctly).
    pub fn is_guarded(&self, atom: &Address, var: &str) -> bool {
        self.guards.iter().any(|g| &g.guarded.address == atom && g.variable == var)
    }
}

fn conjuncts(f: &Formula, addr: Address, out: &mut Vec<(Address, Formula)>) {
    if let Formula::And(a, b) = f {
        conjuncts(a, addr.child(0), out);
        conjuncts(b, addr.child(1), out);
    } else {
        out.push((addr, f.clone()));
    }
}

/// A guard candidate: the atom and the subformulas forming ρ.
struct Pattern {
    implication: bool,
    witness: Address,
    guard: Address,
    rest: Vec<Address>,
}

fn patterns(f: &Formula, addr: &Address) -> Vec<Pattern> {
    let node = f.at(addr).expect("address from traversal");
    let mut out = Vec::new();
    match node {
        Formula::And(..) => {
            let mut cs = Vec::new();
            conjuncts(node, addr.clone(), &mut cs);
            for (ga, g) in &cs {
                if g.is_atomic() {
                    let rest = cs.iter().filter(|(a, _)| a != ga).map(|(a, _)| a.clone()).collect();
                    out.push(Pattern {
                        implication: false,
                        witness: addr.clone(),
                        guard: ga.clone(),
                        rest,
                    });
                }
            }
        }
        Formula::Implies(..) => {
            // (A & G) -> (B -> C): every antecedent conjunct along the chain
            // guards everything else in it.
            let mut levels: Vec<(Address, Vec<(Address, Formula)>)> = Vec::new();
            let mut cur_addr = addr.clone();
            let mut cur = node;
            while let Formula::Implies(a, b) = cur {
                let mut cs = Vec::new();
                conjuncts(a, cur_addr.child(0), &mut cs);
                levels.push((cur_addr.clone(), cs));
                cur_addr = cur_addr.child(1);
                cur = b;
            }
            let all: Vec<Address> = levels
                .iter()
                .flat_map(|(_, cs)| cs.iter().map(|(a, _)| a.clone()))
                .chain(std::iter::once(cur_addr))
                .collect();
            for (w, cs) in &levels {
                for (ga, g) in cs {
                    if g.is_atomic() {
                        out.push(Pattern {
                            implication: true,
                            witness: w.clone(),
                            guard: ga.clone(),
                            rest: all.iter().filter(|a| *a != ga).cloned().collect(),
                        });
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Guard and wrong-guard records. The pattern is matched at the scope of
/// each binder, looking through quantifiers over other variables and
/// negations.
pub fn extract_guards(f: &Formula) -> Guards {
    let mut out = Guards::default();
    for (b, node) in f.nodes() {
        let Formula::Quant(q, z, _) = node else { continue };
        let mut addr = b.child(0);
        let mut negated = false;
        loop {
            match f.at(&addr).expect("address from traversal") {
                Formula::Quant(_, v, _) if v != z => addr = addr.child(0),
                Formula::Not(_) => {
                    negated = !negated;
                    addr = addr.child(0);
                }
                _ => break,
            }
        }
        for pat in patterns(f, &addr) {
            let Ok(guard) = profile_at(f, &pat.guard) else { continue };
            match guard.prefix.last() {
                Some(e) if &e.variable == z && e.binder == b => {}
                _ => continue,
            }
            let implication = pat.implication != negated;
            let kind = match (q, implication) {
                (Quantifier::Forall, true) | (Quantifier::Exists, false) => GuardKind::Guarded,
                _ => GuardKind::WronglyGuarded,
            };
            for r in &pat.rest {
                let sub = f.at(r).expect("address from traversal");
                for (rel, _) in sub.atoms() {
                    let a = Address(r.0.iter().chain(rel.0.iter()).copied().collect());
                    let Ok(guarded) = profile_at(f, &a) else { continue };
                    if !guarded.prefix.entries().iter().any(|e| &e.variable == z && e.binder == b) {
                        continue;
                    }
                    let rec = GuardRecord {
                        guard: guard.clone(),
                        guarded,
                        variable: z.clone(),
                        kind,
                        binder: b.clone(),
                        witness: pat.witness.clone(),
                    };
                    match kind {
                        GuardKind::Guarded => out.guards.push(rec),
                        GuardKind::WronglyGuarded => out.wrong_guards.push(rec),
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_normalize, parse, Vocabulary};
    use Quantifier::{Exists as E, Forall as A};
    use Valence::{Negative as Neg, Positive as Pos};

    fn vocab() -> Vocabulary {
        let mut v = Vocabulary::new(true);
        for (r, k) in [("S", 1), ("T", 3), ("P", 1), ("Q", 1), ("R", 3), ("D", 2), ("G", 2)] {
            v.add_relation(r, k).unwrap();
        }
        v.add_function("f", 1).unwrap();
        v
    }

    fn p(s: &str) -> Formula {
        parse(s, &vocab()).unwrap()
    }

    fn triples(f: &Formula) -> BTreeSet<(String, Valence, String)> {
        formula_profile(f)
            .iter()
            .map(|p| (p.symbol.clone(), p.valence, p.prefix_type.to_string()))
            .collect()
    }

    fn t(s: &str, v: Valence, q: &str) -> (String, Valence, String) {
        (s.to_string(), v, q.to_string())
    }

    const RUNNING: &str = "exists y (S(y) & forall x ~forall y (T(x,y,x) | S(y)))";

    #[test]
    fn running_example_profile() {
        let f = p(RUNNING);
        let expected: BTreeSet<_> = [t("S", Pos, "∃{1}"), t("S", Neg, "∃{1}"), t("T", Neg, "∀{1,3}∃{2}")].into();
        assert_eq!(triples(&f), expected);
        let profiles = formula_profile(&f);
        let tp = profiles.iter().find(|p| p.symbol == "T").unwrap();
        assert_eq!(tp.prefix_type, PrefixType::of(&[(A, &[1, 3]), (E, &[2])]));
    }

    #[test]
    fn running_example_prefix() {
        let f = p(RUNNING);
        let (addr, _) = f.atoms().into_iter().find(|(_, a)| matches!(a, Formula::Atom(r, _) if r == "T")).unwrap();
        let prefix = atom_quantifier_prefix(&f, &addr).unwrap();
        assert_eq!(prefix.to_string(), "∀x ∃y");
        assert_eq!(prefix.entries()[1].binder, Address(vec![0, 1, 0, 0]));
    }

    #[test]
    fn trivial_prefixes() {
        let f = p("forall x P(x)");
        assert_eq!(atom_quantifier_prefix(&f, &Address(vec![0])).unwrap().to_string(), "∀x");
        let g = p("forall x G(x,y)");
        let pr = profile_at(&g, &Address(vec![0])).unwrap();
        assert_eq!(pr.prefix.to_string(), "∀x");
        assert_eq!(pr.prefix_type.to_string(), "∀{1}");
        assert_eq!(pr.fingerprint[1], TermSkeleton::Free("y".into()));
        assert_eq!(
            atom_quantifier_prefix(&f, &Address(vec![1])),
            Err(ProfileError::InvalidAddress(Address(vec![1])))
        );
        assert_eq!(atom_quantifier_prefix(&f, &Address::root()), Err(ProfileError::NotAnAtom(Address::root())));
    }

    #[test]
    fn implication_antecedent_is_negative() {
        let f = p("forall x forall y (D(x,y) -> S(y))");
        let expected: BTreeSet<_> = [t("D", Neg, "∀{1}∀{2}"), t("S", Pos, "∀{1}")].into();
        assert_eq!(triples(&f), expected);
    }

    #[test]
    fn biconditional_gives_both_valences() {
        let f = p("forall x (P(x) <-> Q(x))");
        let ps = formula_profile(&f);
        assert_eq!(ps.len(), 4);
        assert_eq!(ps.iter().filter(|p| p.valence == Neg).count(), 2);
    }

    #[test]
    fn equality_pseudo_symbol() {
        let f = p("forall x exists y ~(x = y)");
        let ps = formula_profile(&f);
        assert_eq!(ps[0].symbol, "=");
        assert_eq!(ps[0].valence, Neg);
        assert_eq!(ps[0].prefix_type.to_string(), "∀{1}∃{2}");
    }

    #[test]
    fn fingerprint_records_terms() {
        let a = formula_profile(&p("exists x P(f(x))"));
        let b = formula_profile(&p("exists x P(x)"));
        assert_eq!(a[0].fingerprint, vec![TermSkeleton::App("f".into(), vec![TermSkeleton::Bound(E, 0)])]);
        assert!(a[0].prefix_type.0.is_empty());
        assert_ne!(a[0].key(), b[0].key());
    }

    #[test]
    fn alpha_invariance_and_double_negation() {
        let f = p(RUNNING);
        assert_eq!(profile_set(&formula_profile(&f)), profile_set(&formula_profile(&alpha_normalize(&f))));
        let nn = Formula::not(Formula::not(f.clone()));
        assert_eq!(profile_set(&formula_profile(&nn)), profile_set(&formula_profile(&f)));
    }

    #[test]
    fn multiset_difference() {
        let a = formula_profile(&p("forall x (P(x) & P(x))"));
        let b = formula_profile(&p("forall x P(x)"));
        assert_eq!(unmatched(&a, &b).len(), 2);
        assert!(unmatched(&b, &a).is_empty());
    }

    #[test]
    fn guard_examples() {
        let g = extract_guards(&p("forall y exists x (S(x) & exists z R(x,y,z))"));
        assert_eq!(g.guards.len(), 1);
        assert!(g.wrong_guards.is_empty());
        let r = &g.guards[0];
        assert_eq!(r.variable, "x");
        assert_eq!(r.guard.symbol, "S");
        assert_eq!(r.guarded.symbol, "R");
        assert_eq!(r.witness, Address(vec![0, 0]));

        let w = extract_guards(&p("forall y exists x (S(x) -> exists z R(x,y,z))"));
        assert!(w.guards.is_empty());
        assert_eq!(w.wrong_guards.len(), 1);
        assert_eq!(w.wrong_guards[0].variable, "x");
        assert_eq!(w.wrong_guards[0].kind, GuardKind::WronglyGuarded);
    }

    #[test]
    fn no_guards_without_shape() {
        let g = extract_guards(&p("exists x Q(x)"));
        assert!(g.guards.is_empty() && g.wrong_guards.is_empty());
    }

    #[test]
    fn curried_antecedent_guards() {
        let g = extract_guards(&p("forall x forall y ((S(x) & D(x,y)) -> S(y))"));
        assert!(g.guards.iter().any(|r| r.guard.symbol == "S" && r.guarded.symbol == "D" && r.variable == "x"));
        assert!(g.guards.iter().any(|r| r.guard.symbol == "D" && r.guarded.symbol == "S" && r.variable == "y"));
        // S(x) in the antecedent does not involve y.
        assert!(!g.guards.iter().any(|r| r.guard.symbol == "S" && r.guarded.symbol == "S"));
    }

    #[test]
    fn negation_swaps_operator_reading() {
        // forall x ~(P(x) & ~Q(x)) is forall x (P(x) -> Q(x))
        let g = extract_guards(&p("forall x ~(P(x) & ~Q(x))"));
        assert_eq!(g.guards.len(), 1);
        assert_eq!(g.guards[0].guard.symbol, "P");
        assert!(g.wrong_guards.is_empty());
        let g = extract_guards(&p("forall x (P(x) & Q(x))"));
        assert_eq!(g.wrong_guards.len(), 2);
    }

    #[test]
    fn shadowed_variable_is_not_guarded() {
        let g = extract_guards(&p("forall x (P(x) -> exists x Q(x))"));
        assert!(g.guards.is_empty());
    }
}
