//! Multi-scenario comparison against a reference scenario with paired-t
//! intervals and a Bonferroni split of the overall significance level.
//!
//! - Ho_G: both engines give the same verdict pattern.
//! - Ho_H: adding staff never raises the mean waiting time or time in
//!   system (point estimates, scenarios in configured order).

use serde::{Deserialize, Serialize};

use super::replication::{run_replications, ReplicationSet};
use super::validation::Verdict;
use crate::arrivals::ArrivalProfile;
use crate::error::{Error, Result};
use crate::model::{Engine, Scenario, ServiceModel};
use crate::stats::{
    bonferroni_level, classify_ci, descriptive, mean_ci, paired_t_ci_of, CiConclusion,
};

/// Confidence level of the per-scenario mean intervals.
pub const SCENARIO_CI_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    WaitingTime,
    TimeInSystem,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::WaitingTime, Measure::TimeInSystem];

    pub fn label(self) -> &'static str {
        match self {
            Measure::WaitingTime => "Waiting time",
            Measure::TimeInSystem => "Time in system",
        }
    }

    pub fn values(self, set: &ReplicationSet) -> Vec<f64> {
        match self {
            Measure::WaitingTime => set.mean_waits(),
            Measure::TimeInSystem => set.mean_times_in_system(),
        }
    }
}

/// Mean, SD and 95% interval of one measure in one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub scenario_id: String,
    pub measure: Measure,
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Paired interval for `reference − other`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedComparison {
    pub reference_id: String,
    pub other_id: String,
    pub measure: Measure,
    pub mean_difference: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence_level: f64,
    pub verdict: CiConclusion,
}

impl PairedComparison {
    /// Short conclusion label such as `S1 > S3`.
    pub fn conclusion(&self) -> String {
        match self.verdict {
            CiConclusion::NoDifference => "No difference".into(),
            CiConclusion::FirstGreater => format!("S{} > S{}", self.reference_id, self.other_id),
            CiConclusion::SecondGreater => format!("S{} < S{}", self.reference_id, self.other_id),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioComparisonReport {
    pub engine: Engine,
    pub master_seed: u64,
    pub replications: usize,
    pub alpha: f64,
    pub comparisons: usize,
    pub per_comparison_alpha: f64,
    pub confidence_level: f64,
    pub scenario_ids: Vec<String>,
    pub rows: Vec<ScenarioRow>,
    pub pairwise: Vec<PairedComparison>,
    pub ho_h: Verdict,
}

impl ScenarioComparisonReport {
    pub fn row(&self, scenario_id: &str, measure: Measure) -> Option<&ScenarioRow> {
        self.rows
            .iter()
            .find(|r| r.scenario_id == scenario_id && r.measure == measure)
    }

    pub fn comparison(&self, other_id: &str, measure: Measure) -> Option<&PairedComparison> {
        self.pairwise
            .iter()
            .find(|c| c.other_id == other_id && c.measure == measure)
    }

    fn pattern(&self) -> Vec<(String, Measure, CiConclusion)> {
        self.pairwise
            .iter()
            .map(|c| (c.other_id.clone(), c.measure, c.verdict))
            .collect()
    }
}

/// Builds the report from replication sets, reference first.
pub fn compare_replication_sets(
    sets: &[ReplicationSet],
    alpha: f64,
) -> Result<ScenarioComparisonReport> {
    if sets.len() < 2 {
        return Err(Error::validation(
            "scenario comparison needs at least two scenarios",
        ));
    }
    let reference = &sets[0];
    for s in &sets[1..] {
        if s.n() != reference.n() {
            return Err(Error::Stats(format!(
                "scenario {} has {} replications but reference {} has {}",
                s.scenario_id,
                s.n(),
                reference.scenario_id,
                reference.n()
            )));
        }
        if s.engine != reference.engine {
            return Err(Error::Stats(
                "scenario sets come from different engines".into(),
            ));
        }
    }
    if reference.n() < 2 {
        return Err(Error::Stats(
            "scenario comparison needs at least two replications".into(),
        ));
    }
    let comparisons = sets.len() - 1;
    let per_comparison_alpha = bonferroni_level(alpha, comparisons)?;
    let confidence_level = 1.0 - per_comparison_alpha;

    let mut rows = Vec::new();
    for set in sets {
        for m in Measure::ALL {
            let v = m.values(set);
            let d = descriptive(&v)?;
            let ci = mean_ci(&v, SCENARIO_CI_LEVEL)?;
            rows.push(ScenarioRow {
                scenario_id: set.scenario_id.clone(),
                measure: m,
                n: d.n,
                mean: d.mean,
                std_dev: d.std_dev.unwrap_or(0.0),
                ci_lower: ci.ci_lower,
                ci_upper: ci.ci_upper,
            });
        }
    }

    let mut pairwise = Vec::new();
    for m in Measure::ALL {
        let base = m.values(reference);
        for other in &sets[1..] {
            let ci = paired_t_ci_of(&base, &m.values(other), confidence_level)?;
            pairwise.push(PairedComparison {
                reference_id: reference.scenario_id.clone(),
                other_id: other.scenario_id.clone(),
                measure: m,
                mean_difference: ci.mean_difference,
                ci_lower: ci.ci_lower,
                ci_upper: ci.ci_upper,
                confidence_level,
                verdict: classify_ci(&ci),
            });
        }
    }

    let ho_h = Verdict::from_bool(Measure::ALL.iter().all(|&m| {
        let means: Vec<f64> = sets
            .iter()
            .map(|s| {
                rows.iter()
                    .find(|r| r.scenario_id == s.scenario_id && r.measure == m)
                    .unwrap()
                    .mean
            })
            .collect();
        means.windows(2).all(|w| w[0] >= w[1])
    }));

    Ok(ScenarioComparisonReport {
        engine: reference.engine,
        master_seed: reference.master_seed,
        replications: reference.n(),
        alpha,
        comparisons,
        per_comparison_alpha,
        confidence_level,
        scenario_ids: sets.iter().map(|s| s.scenario_id.clone()).collect(),
        rows,
        pairwise,
        ho_h,
    })
}

/// Runs every scenario with the same master seed (so replication `i` is
/// paired across scenarios) and compares them with the first.
pub fn multi_scenario_experiment(
    engine: Engine,
    scenarios: &[Scenario],
    service: &ServiceModel,
    profile: &ArrivalProfile,
    n: usize,
    master_seed: u64,
    alpha: f64,
) -> Result<ScenarioComparisonReport> {
    if scenarios.len() < 2 {
        return Err(Error::validation(
            "scenario comparison needs at least two scenarios",
        ));
    }
    let sets = scenarios
        .iter()
        .map(|s| run_replications(engine, s, service, profile, n, master_seed))
        .collect::<Result<Vec<_>>>()?;
    compare_replication_sets(&sets, alpha)
}

/// Ho_G: the two reports reach the same verdict on every comparison.
pub fn ho_g(des: &ScenarioComparisonReport, abs: &ScenarioComparisonReport) -> Verdict {
    Verdict::from_bool(des.pattern() == abs.pattern())
}
