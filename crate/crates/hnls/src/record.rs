//! Run summaries and the error type shared by all experiments.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::checkpoint::CheckpointError;
use crate::config::{ConfigError, ExperimentKind};
use crate::fit::FitError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] hnls_core::Error),
    #[error(transparent)]
    Checkpoint(#[from] CheckpointError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot resume: {0}")]
    Resume(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// A named quantitative check: `value` compared against `limit`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Check {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value <= limit,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Check {
        Check {
            name: name.into(),
            value,
            limit,
            pass: value >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub experiment: String,
    pub config_hash: String,
    /// Simulated time of the first and last record.
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub checkpoints: Vec<String>,
    pub csv: Vec<String>,
    pub exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
    pub bound_exponent: Option<f64>,
    /// Growth verdict; present only for simulations with growth tracking.
    pub verdict: Option<Verdict>,
    pub pointwise_verdict: Option<Verdict>,
    pub truncated: Option<String>,
    pub checks: Vec<Check>,
    pub failures: Vec<String>,
    pub summary: BTreeMap<String, f64>,
}

impl RunRecord {
    pub fn new(kind: ExperimentKind, hash: u64) -> RunRecord {
        RunRecord {
            experiment: kind.to_string(),
            config_hash: format!("{hash:#018x}"),
            t_start: None,
            t_end: None,
            checkpoints: Vec::new(),
            csv: Vec::new(),
            exponent: None,
            exponent_stderr: None,
            bound_exponent: None,
            verdict: None,
            pointwise_verdict: None,
            truncated: None,
            checks: Vec::new(),
            failures: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    /// False when the growth verdict or any check failed.
    pub fn passed(&self) -> bool {
        self.verdict != Some(Verdict::Fail) && self.checks.iter().all(|c| c.pass)
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(std::io::Error::other)?;
        bytes.push(b'\n');
        std::fs::write(dir.join("record.json"), bytes)
    }
}
