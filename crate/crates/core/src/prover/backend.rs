use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::query::SatQuery;
use crate::semantics::Structure;

/// How strongly an unsatisfiability (and so an equivalence) is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "certainty", content = "size")]
pub enum Certainty {
    /// Refutation found by a complete prover.
    Proven,
    /// No model exists up to this universe size.
    UpToSize(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "reason", content = "detail")]
pub enum UnknownReason {
    Timeout,
    ProverError(String),
    Resource,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("timeout"),
            UnknownReason::ProverError(e) => write!(f, "prover error: {e}"),
            UnknownReason::Resource => f.write_str("resource limit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Satisfiable(Option<Structure>),
    Unsatisfiable(Certainty),
    Unknown(UnknownReason),
}

impl SatResult {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, SatResult::Unknown(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub timeout: Duration,
    /// Ask for a model when the query is satisfiable.
    pub want_model: bool,
}

impl CheckOptions {
    pub fn new(timeout: Duration) -> CheckOptions {
        CheckOptions {
            timeout,
            want_model: false,
        }
    }

    pub fn with_model(mut self, want_model: bool) -> CheckOptions {
        self.want_model = want_model;
        self
    }
}

/// Something that decides satisfiability of first-order sentences.
pub trait SatBackend: Send + Sync {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult;

    fn name(&self) -> String;
}

impl<B: SatBackend + ?Sized> SatBackend for &B {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        (**self).check_sat(q, opts)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<B: SatBackend + ?Sized> SatBackend for std::sync::Arc<B> {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        (**self).check_sat(q, opts)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

impl<B: SatBackend + ?Sized> SatBackend for Box<B> {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        (**self).check_sat(q, opts)
    }

    fn name(&self) -> String {
        (**self).name()
    }
}

/// Tries `primary`, and asks `fallback` whenever the primary has no answer.
pub struct Cascade<A, B> {
    pub primary: A,
    pub fallback: B,
}

impl<A: SatBackend, B: SatBackend> SatBackend for Cascade<A, B> {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        match self.primary.check_sat(q, opts) {
            SatResult::Unknown(reason) => {
                log::debug!("{} gave no answer ({reason}); asking {}", self.primary.name(), self.fallback.name());
                self.fallback.check_sat(q, opts)
            }
            r => r,
        }
    }

    fn name(&self) -> String {
        format!("{}+{}", self.primary.name(), self.fallback.name())
    }
}

/// Counts calls to the wrapped backend.
pub struct CountingBackend<B> {
    inner: B,
    calls: AtomicUsize,
}

impl<B> CountingBackend<B> {
    pub fn new(inner: B) -> Self {
        CountingBackend {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::SeqCst);
    }

    pub fn inner(&self) -> &B {
        &self.inner
    }
}

impl<B: SatBackend> SatBackend for CountingBackend<B> {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.check_sat(q, opts)
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}
