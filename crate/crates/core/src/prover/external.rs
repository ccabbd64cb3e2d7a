//! Racing an external TPTP prover in several modes.

use std::fs::File;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use tempfile::NamedTempFile;

use super::backend::{Certainty, CheckOptions, SatBackend, SatResult, UnknownReason};
use super::query::SatQuery;
use super::tptp::{parse_finite_model, parse_szs_status, to_tptp, SzsStatus};

pub const DEFAULT_MODES: [&str; 3] = ["vampire", "casc", "casc_sat"];
/// Timeout for top-level equivalence checks.
pub const TOP_LEVEL_TIMEOUT: Duration = Duration::from_secs(20);
/// Timeout for each check made while confirming strategy candidates.
pub const STRATEGY_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProverConfig {
    pub executable: PathBuf,
    /// One process per mode is started, with `--mode <m>`.
    pub modes: Vec<String>,
    /// Arguments for the finite model building run.
    pub model_args: Vec<String>,
    /// Wait for every mode and require all decisive answers to agree.
    pub verify_agreement: bool,
}

impl ProverConfig {
    pub fn new(executable: impl Into<PathBuf>) -> ProverConfig {
        ProverConfig {
            executable: executable.into(),
            modes: DEFAULT_MODES.iter().map(|m| m.to_string()).collect(),
            model_args: vec![
                "--mode".into(),
                "vampire".into(),
                "--saturation_algorithm".into(),
                "fmb".into(),
            ],
            verify_agreement: false,
        }
    }
}

pub struct ExternalProver {
    pub config: ProverConfig,
}

struct Running {
    mode: String,
    child: Child,
    output: NamedTempFile,
}

enum RaceOutcome {
    Decided(SzsStatus, String),
    Unknown(UnknownReason),
}

fn time_limit_arg(timeout: Duration) -> String {
    timeout.as_secs().max(1).to_string()
}

impl ExternalProver {
    pub fn new(config: ProverConfig) -> Self {
        assert!(!config.modes.is_empty(), "at least one prover mode");
        ExternalProver { config }
    }

    fn spawn(&self, problem: &NamedTempFile, args: &[String], mode: &str) -> std::io::Result<Running> {
        let output = NamedTempFile::new()?;
        let child = Command::new(&self.config.executable)
            .args(args)
            .stdin(Stdio::from(File::open(problem.path())?))
            .stdout(Stdio::from(output.reopen()?))
            .stderr(Stdio::null())
            .spawn()?;
        Ok(Running {
            mode: mode.to_string(),
            child,
            output,
        })
    }

    fn read_output(r: &Running) -> String {
        let mut text = String::new();
        if let Ok(mut f) = r.output.reopen() {
            let _ = f.read_to_string(&mut text);
        }
        text
    }

    fn race(&self, problem: &NamedTempFile, runs: Vec<(String, Vec<String>)>, timeout: Duration) -> RaceOutcome {
        let deadline = Instant::now() + timeout;
        let mut running = Vec::new();
        for (mode, args) in &runs {
            match self.spawn(problem, args, mode) {
                Ok(r) => running.push(r),
                Err(e) => log::warn!("cannot start {:?} in mode {mode}: {e}", self.config.executable),
            }
        }
        if running.is_empty() {
            return RaceOutcome::Unknown(UnknownReason::ProverError(format!(
                "cannot start {}",
                self.config.executable.display()
            )));
        }
        let mut decided: Vec<(String, SzsStatus, String)> = Vec::new();
        let mut saw_timeout = false;
        let mut errors = Vec::new();
        let mut poll = Duration::from_millis(2);
        while !running.is_empty() {
            let mut i = 0;
            while i < running.len() {
                match running[i].child.try_wait() {
                    Ok(Some(_)) => {
                        let r = running.swap_remove(i);
                        let text = Self::read_output(&r);
                        match parse_szs_status(&text) {
                            Some(s) if s.is_decisive() => decided.push((r.mode, s, text)),
                            Some(SzsStatus::Timeout) => saw_timeout = true,
                            Some(_) => {}
                            None => {
                                log::debug!("mode {} printed no SZS status:\n{text}", r.mode);
                                errors.push(r.mode);
                            }
                        }
                    }
                    Ok(None) => i += 1,
                    Err(e) => {
                        log::warn!("waiting for prover failed: {e}");
                        let mut r = running.swap_remove(i);
                        let _ = r.child.kill();
                        errors.push(r.mode);
                    }
                }
            }
            if !decided.is_empty() && !self.config.verify_agreement {
                break;
            }
            if Instant::now() >= deadline {
                saw_timeout = true;
                break;
            }
            thread::sleep(poll);
            poll = (poll * 2).min(Duration::from_millis(25));
        }
        for mut r in running {
            let _ = r.child.kill();
            let _ = r.child.wait();
        }
        if let Some((mode, first, text)) = decided.first().cloned() {
            if let Some((other, s, _)) = decided.iter().find(|(_, s, _)| *s != first) {
                return RaceOutcome::Unknown(UnknownReason::ProverError(format!(
                    "modes disagree: {mode} says {first:?}, {other} says {s:?}"
                )));
            }
            log::debug!("mode {mode} answered {first:?}");
            return RaceOutcome::Decided(first, text);
        }
        if saw_timeout {
            RaceOutcome::Unknown(UnknownReason::Timeout)
        } else if errors.is_empty() {
            RaceOutcome::Unknown(UnknownReason::ProverError("no decisive answer".into()))
        } else {
            RaceOutcome::Unknown(UnknownReason::ProverError(format!("no SZS status from {}", errors.join(", "))))
        }
    }
}

impl SatBackend for ExternalProver {
    fn check_sat(&self, q: &SatQuery, opts: &CheckOptions) -> SatResult {
        let problem = match NamedTempFile::new().and_then(|mut f| {
            f.write_all(to_tptp(q).as_bytes())?;
            f.flush()?;
            Ok(f)
        }) {
            Ok(f) => f,
            Err(e) => return SatResult::Unknown(UnknownReason::ProverError(e.to_string())),
        };
        let limit = time_limit_arg(opts.timeout);
        let runs = self
            .config
            .modes
            .iter()
            .map(|m| {
                (
                    m.clone(),
                    vec!["--mode".into(), m.clone(), "--time_limit".into(), limit.clone()],
                )
            })
            .collect();
        match self.race(&problem, runs, opts.timeout) {
            RaceOutcome::Unknown(r) => SatResult::Unknown(r),
            RaceOutcome::Decided(SzsStatus::Unsatisfiable, _) => SatResult::Unsatisfiable(Certainty::Proven),
            RaceOutcome::Decided(_, text) => {
                if !opts.want_model {
                    return SatResult::Satisfiable(None);
                }
                if let Ok(s) = parse_finite_model(&text, &q.vocab) {
                    return SatResult::Satisfiable(Some(s));
                }
                let mut args = self.config.model_args.clone();
                args.extend(["--time_limit".to_string(), limit]);
                match self.race(&problem, vec![("fmb".into(), args)], opts.timeout) {
                    RaceOutcome::Decided(SzsStatus::Satisfiable, text) => match parse_finite_model(&text, &q.vocab) {
                        Ok(s) => SatResult::Satisfiable(Some(s)),
                        Err(e) => {
                            log::warn!("unreadable finite model ({e}); raw output:\n{text}");
                            SatResult::Satisfiable(None)
                        }
                    },
                    _ => SatResult::Satisfiable(None),
                }
            }
        }
    }

    fn name(&self) -> String {
        format!("external({})", self.config.executable.display())
    }
}
