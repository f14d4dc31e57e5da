use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub passed: bool,
    pub detail: String,
}

/// What a run did, how long each stage took, and which checks passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub experiment: String,
    pub config_hash: String,
    pub tool_version: String,
    pub seed: u64,
    pub stages: Vec<StageTime>,
    /// Finite fitted values only; unbounded ones are listed in `notes`.
    pub fitted_constants: BTreeMap<String, f64>,
    pub checks: BTreeMap<String, CheckEntry>,
    pub params: BTreeMap<String, serde_json::Value>,
    pub notes: Vec<String>,
    pub artifacts: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            command: command.into(),
            experiment: cfg.experiment.clone(),
            config_hash: cfg.hash(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.seed,
            stages: Vec::new(),
            fitted_constants: BTreeMap::new(),
            checks: BTreeMap::new(),
            params: BTreeMap::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    /// Runs `f` and records its wall time under `name`.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        self.stages.push(StageTime {
            name: name.into(),
            seconds: t0.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn check(&mut self, id: &str, passed: bool, detail: impl Into<String>) {
        self.checks.insert(
            id.into(),
            CheckEntry {
                passed,
                detail: detail.into(),
            },
        );
    }

    pub fn fit(&mut self, name: &str, v: f64) {
        if v.is_finite() {
            self.fitted_constants.insert(name.into(), v);
        } else {
            self.notes.push(format!("{name} = {v}"));
        }
    }

    pub fn param(&mut self, name: &str, v: impl Serialize) {
        self.params.insert(name.into(), serde_json::to_value(v).expect("plain data"));
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|c| c.passed)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("manifest-{}.json", self.command));
        write_json(&path, self)?;
        Ok(path)
    }
}

pub(crate) fn write_json(path: &Path, v: &impl Serialize) -> Result<()> {
    let s = serde_json::to_string_pretty(v).expect("plain data");
    write_bytes(path, format!("{s}\n").as_bytes())
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| crate::Error::Io(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| crate::Error::Io(format!("{}: {e}", path.display())))
}
