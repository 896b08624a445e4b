//! What produced an output: command line, settings, seed and input hashes.

use std::path::Path;

use quartet_core::cost::{Scorer, ScorerKind};
use quartet_core::mutation::mutation_path_bound;
use quartet_core::search::{default_temperature, select_r, SearchConfig, SearchMode, Termination};
use quartet_core::CostFunction;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn digest_bytes(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let data = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest { path: path.display().to_string(), bytes: data.len() as u64, sha256: digest_bytes(&data) })
}

/// Search settings with every default resolved for a concrete problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSnapshot {
    pub termination: &'static str,
    pub mode: &'static str,
    pub scorer: &'static str,
    pub seed: u64,
    pub patience: u64,
    pub max_trees: Option<u64>,
    pub runs: usize,
    pub trial_length: usize,
    pub temperature: f64,
    pub max_k: u64,
}

impl ConfigSnapshot {
    pub fn resolve(config: &SearchConfig, cf: &CostFunction) -> Result<ConfigSnapshot> {
        let n = cf.size();
        let runs = match (config.termination, config.runs_r) {
            (Termination::Simple, _) => 1,
            (Termination::Agreement, Some(r)) => r,
            (Termination::Agreement, None) => select_r(n)?,
        };
        let scorer = Scorer::new(cf, config.scorer);
        Ok(ConfigSnapshot {
            termination: match config.termination {
                Termination::Simple => "simple",
                Termination::Agreement => "agreement",
            },
            mode: match config.mode {
                SearchMode::HillClimb => "hill",
                SearchMode::Metropolis => "metropolis",
            },
            scorer: match scorer.kind() {
                ScorerKind::Naive => "naive",
                ScorerKind::Fast => "fast",
            },
            seed: config.seed,
            patience: config.patience,
            max_trees: config.max_trees,
            runs,
            trial_length: config.trial_length.unwrap_or(n),
            temperature: config.temperature.unwrap_or_else(|| default_temperature(&scorer)),
            max_k: config.max_k.unwrap_or((mutation_path_bound(n) as u64).max(4)),
        })
    }

    /// One-line form for file headers.
    pub fn line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub master_seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
}

impl RunManifest {
    pub fn new(command: Vec<String>, master_seed: Option<u64>, config: serde_json::Value, inputs: Vec<InputDigest>) -> Self {
        RunManifest { schema: "qtree-manifest/1", tool_version: env!("CARGO_PKG_VERSION"), command, master_seed, config, inputs }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(digest_bytes(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn defaults_are_resolved() {
        let cf = CostFunction::Distance(quartet_core::DistanceMatrix::zeros(12));
        let cfg = SearchConfig { termination: Termination::Agreement, ..Default::default() };
        let snap = ConfigSnapshot::resolve(&cfg, &cf).unwrap();
        assert_eq!((snap.runs, snap.trial_length, snap.max_k), (4, 12, 44));
        assert!(snap.temperature > 0.0);
        assert!(snap.line().starts_with("{\"termination\":\"agreement\""));
    }
}
