use super::*;
use crate::prover::{BoundedBackend, BoundedConfig};
use crate::syntax::parse;

fn vocab() -> Vocabulary {
    Vocabulary::new(true)
        .with_relation("P", 1)
        .unwrap()
        .with_relation("Q", 1)
        .unwrap()
        .with_relation("S", 1)
        .unwrap()
        .with_relation("R", 2)
        .unwrap()
        .with_relation("G", 2)
        .unwrap()
        .with_relation("D", 2)
        .unwrap()
        .with_relation("T", 3)
        .unwrap()
        .with_function("f", 1)
        .unwrap()
}

fn p(s: &str) -> Formula {
    parse(s, &vocab()).unwrap()
}

fn backend() -> BoundedBackend {
    BoundedBackend::new(BoundedConfig {
        max_size: 3,
        ..BoundedConfig::default()
    })
}

fn config() -> ExplainConfig {
    ExplainConfig {
        parallel: false,
        random: None,
        necessity: NecessityConfig {
            parallel: false,
            ..NecessityConfig::default()
        },
        ..ExplainConfig::default()
    }
}

fn explain(psi: &str, phi: &str) -> ExplanationBundle {
    let b = backend();
    explain_nonequivalence(&p(psi), &p(phi), &Theory::empty(), &vocab(), &b, None, None, &config())
}

fn find(bundle: &ExplanationBundle, id: StrategyId) -> &Explanation {
    bundle
        .explanations
        .iter()
        .find(|e| e.strategy == id)
        .unwrap_or_else(|| panic!("no {id} explanation in {:?}", bundle.explanations))
}

fn check_sound(psi: &str, bundle: &ExplanationBundle) {
    let b = backend();
    for e in bundle.explanations.iter().filter(|e| e.kind == ExplanationKind::Bugfix) {
        let m = e.modified().unwrap();
        let d = Decider::new(&b);
        assert!(decide_equivalence(&p(psi), m, &Theory::empty(), &vocab(), &d).is_equivalent(), "{e:?}");
    }
}

fn roundtrip(phi: &str, bundle: &ExplanationBundle) {
    for e in bundle.explanations.iter().filter(|e| e.kind == ExplanationKind::Bugfix) {
        assert_eq!(apply_edits(&p(phi), e.edits()).as_ref(), e.modified(), "{e:?}");
    }
}

#[test]
fn strategy_codes_and_display() {
    assert_eq!(StrategyId::Q1G1.to_string(), "Q-1+G-1");
    assert_eq!(StrategyId::S2.to_string(), "S-2");
    assert_eq!(StrategyId::parse("q-1+g-1"), Some(StrategyId::Q1G1));
    assert_eq!(StrategyId::parse("B2"), Some(StrategyId::B2));
    assert_eq!(StrategyId::parse("X9"), None);
}

#[test]
fn missing_symbol_blocker() {
    let b = explain("forall x (Q(x) -> P(x))", "forall x P(x)");
    let e = find(&b, StrategyId::S1);
    assert_eq!(e.kind, ExplanationKind::Blocker);
    assert!(e.verified);
    assert_eq!(e.message, "Q does not occur in φ, but is required");
}

#[test]
fn permuted_arguments() {
    let (psi, phi) = ("forall x exists y R(x, y)", "forall x exists y R(y, x)");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::S2);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert!(e.message.starts_with("Wrong quantification pattern due to permutation"));
    check_sound(psi, &b);
    roundtrip(phi, &b);
}

#[test]
fn renamed_relation() {
    let b = explain("exists x P(x)", "exists x Q(x)");
    let e = find(&b, StrategyId::S3);
    assert_eq!(e.modified(), Some(&p("exists x P(x)")));
    assert!(e.message.starts_with("Wrong relation symbol used"));
}

#[test]
fn different_terms() {
    let (psi, phi) = ("exists x P(f(x))", "exists x P(x)");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::S4);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert!(e.message.starts_with("Terms in P(·) differ"));
    roundtrip(phi, &b);
}

#[test]
fn wrong_prefix() {
    let (psi, phi) = ("forall x exists y (P(x) -> G(x, y))", "forall x forall y (P(x) -> G(x, y))");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::Q1);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert!(e.message.starts_with("Wrong quantifier prefix"));
}

#[test]
fn quantifier_order() {
    let psi = "forall x (S(x) -> exists y forall z T(x, y, z))";
    let phi = "forall x exists y exists z (S(x) -> T(x, y, z))";
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::Q2);
    assert_eq!(e.message, "Wrong quantification pattern for T(x, y, z)");
    check_sound(psi, &b);
    roundtrip(phi, &b);
}

#[test]
fn free_variable_blocker() {
    let b = explain("forall x P(x)", "P(x)");
    let e = find(&b, StrategyId::Q3);
    assert_eq!(e.kind, ExplanationKind::Blocker);
    assert_eq!(e.message, "x is free only in φ");
}

#[test]
fn missing_guard() {
    let (psi, phi) = ("forall x (P(x) -> Q(x))", "forall x Q(x)");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::G1);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert_eq!(e.message, "Missing universal guard for x");
}

#[test]
fn superfluous_guard() {
    let (psi, phi) = ("exists x Q(x)", "exists x (P(x) & Q(x))");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::G1);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert_eq!(e.message, "Superfluous existential guard for x");
}

#[test]
fn wrong_guard_operator() {
    let (psi, phi) = ("forall x (P(x) -> Q(x))", "forall x (P(x) & Q(x))");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::G2);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert_eq!(e.message, "∧ is the wrong guard operator for universally quantified x");
}

#[test]
fn combined_prefix_and_guard() {
    let psi = "forall x exists y (P(y) & G(x, y))";
    let phi = "forall x forall y G(x, y)";
    let b = explain(psi, phi);
    let ids = b.strategies();
    assert!(ids.contains(&StrategyId::Q1G1), "{:?}", b.explanations);
    assert!(!ids.contains(&StrategyId::Q1));
    assert!(!ids.contains(&StrategyId::G1));
    let e = find(&b, StrategyId::Q1G1);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert_eq!(e.edits().len(), 2);
    roundtrip(phi, &b);
}

#[test]
fn negation_prefix() {
    let b = explain("forall x P(x)", "forall x ~P(x)");
    let e = find(&b, StrategyId::B1);
    assert_eq!(e.modified(), Some(&p("forall x P(x)")));
    assert_eq!(e.message, "Wrong negation prefix for P(x)");
}

#[test]
fn negation_along_path() {
    // Toggling directly above either atom does not help; the negation
    // belongs above the conjunction, as on ψ's path.
    let (psi, phi) = ("forall x ~(P(x) & ~Q(x))", "forall x (P(x) & ~Q(x))");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::B1);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert_eq!(e.edits()[0].address, Address(vec![0]));
    check_sound(psi, &b);
    roundtrip(phi, &b);
}

#[test]
fn implication_direction() {
    let (psi, phi) = ("forall x (P(x) -> Q(x))", "forall x (Q(x) -> P(x))");
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::B2);
    assert_eq!(e.modified(), Some(&p(psi)));
    assert!(e.message.starts_with("Implication in wrong direction"));
}

#[test]
fn no_implication_no_swap() {
    let b = explain("forall x P(x)", "forall x ~P(x)");
    assert!(!b.strategies().contains(&StrategyId::B2));
}

#[test]
fn guarding_hint_example() {
    let psi = "forall x forall y ((S(x) & D(x, y)) -> S(y))";
    let phi = "forall x forall y (D(x, y) -> S(y))";
    let b = explain(psi, phi);
    let e = find(&b, StrategyId::G1);
    assert_eq!(e.message, "Missing universal guard for x");
    check_sound(psi, &b);
    roundtrip(phi, &b);
}

#[test]
fn missing_relation_example() {
    let b = explain("forall x forall y ((S(x) & D(x, y)) -> S(y))", "forall x forall y (S(x) -> S(y))");
    let e = find(&b, StrategyId::S1);
    assert_eq!(e.evidence, Evidence::MissingSymbol { symbol: "D".into() });
    assert!(e.verified);
}

#[test]
fn equivalent_pair_gives_empty_bundle() {
    let b = explain("forall x (P(x) -> Q(x))", "forall y (~Q(y) -> ~P(y))");
    assert!(b.verdict.is_equivalent());
    assert!(b.explanations.is_empty());
    assert_eq!(b.candidates_tried, 0);
}

#[test]
fn first_only_stops_early() {
    let b = backend();
    let cfg = ExplainConfig {
        first_only: true,
        ..config()
    };
    let psi = p("forall x (P(x) -> Q(x))");
    let phi = p("forall x (Q(x) -> P(x))");
    let bundle = explain_nonequivalence(&psi, &phi, &Theory::empty(), &vocab(), &b, None, None, &cfg);
    assert_eq!(bundle.explanations.len(), 1);
}

#[test]
fn bundle_json_shape() {
    let b = explain("forall x (P(x) -> Q(x))", "forall x Q(x)");
    let v = serde_json::to_value(&b).unwrap();
    assert_eq!(v["verdict"], "non-equivalent");
    let first = &v["explanations"][0];
    assert!(first["strategy"].is_string());
    assert!(first["kind"].is_string());
    assert!(first["message"].is_string());
}

#[test]
fn parallel_matches_serial() {
    let b = backend();
    let psi = p("forall x forall y ((S(x) & D(x, y)) -> S(y))");
    let phi = p("forall x forall y (D(x, y) -> S(y))");
    let serial = explain_nonequivalence(&psi, &phi, &Theory::empty(), &vocab(), &b, None, None, &config());
    let cfg = ExplainConfig {
        parallel: true,
        ..config()
    };
    let par = explain_nonequivalence(&psi, &phi, &Theory::empty(), &vocab(), &b, None, None, &cfg);
    assert_eq!(serial.explanations, par.explanations);
}
