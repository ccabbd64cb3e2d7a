use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::backend::Certainty;
use crate::syntax::{alpha_normalize, Formula, Theory};

/// A decisive verdict as stored in the cache; counter models are not kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum CachedVerdict {
    Equivalent { certainty: Certainty },
    NonEquivalent,
}

#[derive(Serialize, Deserialize)]
struct KeyParts {
    gamma: Vec<String>,
    pair: [String; 2],
}

/// Cache key: the alpha-normalized prints of Γ (sorted) and of the two
/// formulas (as an unordered pair).
pub fn cache_key(psi: &Formula, phi: &Formula, gamma: &Theory) -> String {
    let mut g: Vec<String> = gamma.iter().map(|a| alpha_normalize(a).to_string()).collect();
    g.sort();
    g.dedup();
    let mut pair = [alpha_normalize(psi).to_string(), alpha_normalize(phi).to_string()];
    pair.sort();
    serde_json::to_string(&KeyParts { gamma: g, pair }).expect("strings serialize")
}

#[derive(Serialize, Deserialize)]
struct Line {
    key: String,
    #[serde(flatten)]
    verdict: CachedVerdict,
    timestamp: u64,
}

/// Equivalence decisions shared by all workers of a run, optionally backed
/// by an append-only JSON-lines file.
#[derive(Default)]
pub struct DecisionCache {
    map: RwLock<HashMap<String, CachedVerdict>>,
    log: Option<Mutex<File>>,
}

impl DecisionCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads previous decisions from `path` (if it exists) and appends new
    /// ones to it. Malformed lines are skipped.
    pub fn open(path: &Path) -> io::Result<Self> {
        let mut map = HashMap::new();
        if path.exists() {
            for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<Line>(&line) {
                    Ok(l) => {
                        map.insert(l.key, l.verdict);
                    }
                    Err(e) => log::warn!("{}:{}: skipping cache line: {e}", path.display(), i + 1),
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(DecisionCache {
            map: RwLock::new(map),
            log: Some(Mutex::new(file)),
        })
    }

    pub fn get(&self, key: &str) -> Option<CachedVerdict> {
        self.map.read().expect("cache lock").get(key).copied()
    }

    pub fn insert(&self, key: String, verdict: CachedVerdict) {
        let fresh = self.map.write().expect("cache lock").insert(key.clone(), verdict) != Some(verdict);
        if let (true, Some(log)) = (fresh, &self.log) {
            let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            let line = serde_json::to_string(&Line { key, verdict, timestamp }).expect("serializable");
            let mut f = log.lock().expect("cache file lock");
            if let Err(e) = writeln!(f, "{line}") {
                log::warn!("cannot append to cache file: {e}");
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Vocabulary};

    fn p(s: &str) -> Formula {
        let v = Vocabulary::new(true).with_relation("P", 1).unwrap().with_relation("Q", 1).unwrap();
        parse(s, &v).unwrap()
    }

    #[test]
    fn keys_ignore_order_and_bound_names() {
        let g1 = Theory::new(vec![p("forall x P(x)"), p("exists y Q(y)")]);
        let g2 = Theory::new(vec![p("exists z Q(z)"), p("forall w P(w)")]);
        let a = cache_key(&p("forall x Q(x)"), &p("exists x P(x)"), &g1);
        let b = cache_key(&p("exists u P(u)"), &p("forall y Q(y)"), &g2);
        assert_eq!(a, b);
        assert_ne!(a, cache_key(&p("forall x Q(x)"), &p("exists x Q(x)"), &g1));
    }

    #[test]
    fn persisted_entries_reload() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        {
            let c = DecisionCache::open(&path).unwrap();
            c.insert("k1".into(), CachedVerdict::NonEquivalent);
            c.insert(
                "k2".into(),
                CachedVerdict::Equivalent {
                    certainty: Certainty::UpToSize(4),
                },
            );
        }
        let c = DecisionCache::open(&path).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("k1"), Some(CachedVerdict::NonEquivalent));
        assert_eq!(
            c.get("k2"),
            Some(CachedVerdict::Equivalent {
                certainty: Certainty::UpToSize(4)
            })
        );
    }
}
