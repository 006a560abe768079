//! The JSON run report every experiment emits.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::Result;
use crate::gen::RNG_SCHEME;

/// Everything a finished experiment reports: the effective configuration,
/// a fixed set of metrics, and the wall clock.
///
/// `wall_clock_seconds` is the only field allowed to differ between two
/// runs of the same config and seed; [`RunReport::same_results`] compares
/// everything else.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    /// Experiment name as used on the command line.
    pub experiment: String,
    /// Echo of the effective configuration, seed override applied.
    pub config: Value,
    /// Description of the randomness scheme the run used.
    pub rng: String,
    /// Per-experiment metrics; the key set is fixed per experiment.
    pub metrics: BTreeMap<String, Value>,
    /// Wall-clock duration of the run.
    pub wall_clock_seconds: f64,
}

impl RunReport {
    /// A fresh report with empty metrics and zero wall clock.
    pub fn new(experiment: &str, config: Value) -> Self {
        Self {
            experiment: experiment.to_string(),
            config,
            rng: RNG_SCHEME.to_string(),
            metrics: BTreeMap::new(),
            wall_clock_seconds: 0.0,
        }
    }

    /// Inserts one metric, serializing the value to JSON.
    pub fn insert(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.metrics.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    /// Whether two reports agree on everything except the wall clock.
    pub fn same_results(&self, other: &Self) -> bool {
        self.experiment == other.experiment
            && self.config == other.config
            && self.rng == other.rng
            && self.metrics == other.metrics
    }

    /// Pretty-printed JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes the pretty-printed JSON to `path`.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
