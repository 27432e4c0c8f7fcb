//! JSON configuration: arrival profile, service model, scenarios and
//! experiment settings.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "description": "optional free text",
//!   "arrival_profile": { "rates_per_minute": [8 numbers], "horizon_minutes": 480 },
//!   "service_model": { "distribution": "exponential", "job1_mean": 0.6, "job2_mean": 2.0,
//!                      "job3_mean": 0.6, "dwell_mean": 6.0, "help_probability": 0.1, "rooms": 8 },
//!   "scenarios": [ { "id": "1", "assignment": { "job1": "staff1", "job2": "staff1", "job3": "staff1" },
//!                    "abs_queue_discipline": "random_pick" } ],
//!   "experiment": { "replications": 100, "master_seed": 42, "alpha": 0.05 }
//! }
//! ```
//!
//! Unknown keys are rejected. Semantic checks report every problem found,
//! not just the first.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arrivals::{build_arrival_profile, ArrivalProfile};
use crate::error::{Error, Result};
use crate::model::{Scenario, ServiceModel};
use crate::stats::DEFAULT_EXACT_THRESHOLD;

pub const SCHEMA_VERSION: u32 = 1;

const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalProfileConfig {
    /// One rate per hour of the day, customers per minute.
    pub rates_per_minute: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon_minutes: f64,
}

fn default_horizon() -> f64 {
    crate::model::DEFAULT_HORIZON
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default = "default_seed")]
    pub master_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Largest relative variance difference still counted as similar.
    #[serde(default = "default_variance_threshold")]
    pub variance_similarity_threshold: f64,
    #[serde(default = "default_bin_width")]
    pub histogram_bin_width: f64,
    /// Compare models against observed data at customer level instead of
    /// per-replication means.
    #[serde(default)]
    pub pool_customer_waits: bool,
    #[serde(default = "default_exact_threshold")]
    pub exact_threshold: usize,
}

fn default_replications() -> usize {
    100
}
fn default_seed() -> u64 {
    42
}
fn default_alpha() -> f64 {
    0.05
}
fn default_variance_threshold() -> f64 {
    0.20
}
fn default_bin_width() -> f64 {
    0.5
}
fn default_exact_threshold() -> usize {
    DEFAULT_EXACT_THRESHOLD
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            replications: default_replications(),
            master_seed: default_seed(),
            alpha: default_alpha(),
            variance_similarity_threshold: default_variance_threshold(),
            histogram_bin_width: default_bin_width(),
            pool_customer_waits: false,
            exact_threshold: default_exact_threshold(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub arrival_profile: ArrivalProfileConfig,
    pub service_model: ServiceModel,
    pub scenarios: Vec<Scenario>,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

impl Config {
    /// The configuration shipped with the crate.
    pub fn default_config() -> Config {
        Config::from_json_str(DEFAULT_CONFIG).expect("embedded default config is valid")
    }

    pub fn from_json_str(text: &str) -> Result<Config> {
        let config: Config = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "configuration".into(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            problems.push(format!(
                "schema_version must be {SCHEMA_VERSION}, got {}",
                self.schema_version
            ));
        }
        if let Err(Error::Validation(p)) = build_arrival_profile(
            &self.arrival_profile.rates_per_minute,
            self.arrival_profile.horizon_minutes,
        ) {
            problems.extend(p.into_iter().map(|m| format!("arrival_profile: {m}")));
        }
        problems.extend(self.service_model.problems("service_model"));
        if self.scenarios.is_empty() {
            problems.push("scenarios: at least one scenario is required".into());
        }
        let mut seen = BTreeSet::new();
        for s in &self.scenarios {
            problems.extend(s.problems().into_iter().map(|m| format!("scenarios: {m}")));
            if !seen.insert(s.id.as_str()) {
                problems.push(format!("scenarios: duplicate scenario id {}", s.id));
            }
        }
        let e = &self.experiment;
        if e.replications == 0 {
            problems.push("experiment.replications must be at least 1".into());
        }
        if !(e.alpha > 0.0 && e.alpha < 1.0) {
            problems.push(format!(
                "experiment.alpha must be in (0, 1), got {}",
                e.alpha
            ));
        }
        if !(e.variance_similarity_threshold >= 0.0) {
            problems.push("experiment.variance_similarity_threshold must be non-negative".into());
        }
        if !(e.histogram_bin_width > 0.0) {
            problems.push("experiment.histogram_bin_width must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub fn profile(&self) -> ArrivalProfile {
        build_arrival_profile(
            &self.arrival_profile.rates_per_minute,
            self.arrival_profile.horizon_minutes,
        )
        .expect("validated on load")
    }

    pub fn scenario(&self, id: &str) -> Option<&Scenario> {
        self.scenarios.iter().find(|s| s.id == id)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Reads and validates a configuration file.
pub fn load_config(path: impl AsRef<Path>) -> Result<Config> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Config::from_json_str(&text)
}
