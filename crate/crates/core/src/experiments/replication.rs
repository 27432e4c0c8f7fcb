use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abs::{run_abs, AbsSimulation};
use crate::arrivals::sample_arrivals;
use crate::arrivals::ArrivalProfile;
use crate::des::{run_des, DesSimulation};
use crate::error::{Error, Result};
use crate::model::{Engine, RunOutput, Scenario, ServiceModel};
use crate::rng::{StreamPurpose, StreamSet};
use crate::trace::TraceRecord;

/// Runs one replication of `engine`.
pub fn run_engine(
    engine: Engine,
    scenario: &Scenario,
    service: &ServiceModel,
    profile: &ArrivalProfile,
    streams: &StreamSet,
) -> Result<RunOutput> {
    match engine {
        Engine::Des => run_des(scenario, service, profile, streams),
        Engine::Abs => run_abs(scenario, service, profile, streams),
    }
}

/// Runs one replication with event tracing on.
pub fn run_engine_traced(
    engine: Engine,
    scenario: &Scenario,
    service: &ServiceModel,
    profile: &ArrivalProfile,
    streams: &StreamSet,
) -> Result<(RunOutput, Vec<TraceRecord>)> {
    let arrivals = sample_arrivals(profile, &mut streams.stream(StreamPurpose::Arrivals))?;
    match engine {
        Engine::Des => DesSimulation::new(scenario, service, arrivals, profile.horizon(), streams)?
            .run_traced(),
        Engine::Abs => {
            let run = AbsSimulation::new(scenario, service, arrivals, profile.horizon(), streams)?
                .with_trace()
                .run_detailed()?;
            Ok((run.output, run.trace))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub index: u64,
    pub customers: usize,
    pub mean_wait: f64,
    pub mean_time_in_system: f64,
    pub utilisation: Vec<f64>,
}

impl ReplicationSummary {
    fn of(index: u64, run: &RunOutput) -> Self {
        ReplicationSummary {
            index,
            customers: run.customers.len(),
            mean_wait: run.mean_wait(),
            mean_time_in_system: run.mean_time_in_system(),
            utilisation: run.staff.iter().map(|s| s.utilisation).collect(),
        }
    }
}

/// Replications `0..n` of one engine and scenario. Replication `i` always
/// uses the streams of `(master_seed, i)`, so sets built from the same seed
/// are paired.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplicationSet {
    pub engine: Engine,
    pub scenario_id: String,
    pub master_seed: u64,
    pub staff_ids: Vec<String>,
    pub summaries: Vec<ReplicationSummary>,
    #[serde(skip)]
    pub runs: Vec<RunOutput>,
}

impl ReplicationSet {
    pub fn n(&self) -> usize {
        self.summaries.len()
    }

    pub fn mean_waits(&self) -> Vec<f64> {
        self.summaries.iter().map(|s| s.mean_wait).collect()
    }

    pub fn mean_times_in_system(&self) -> Vec<f64> {
        self.summaries
            .iter()
            .map(|s| s.mean_time_in_system)
            .collect()
    }

    /// Every customer's total wait across all replications.
    pub fn pooled_waits(&self) -> Vec<f64> {
        self.runs.iter().flat_map(|r| r.waits()).collect()
    }

    /// CSV with one row per replication.
    pub fn summary_csv(&self) -> String {
        let mut out =
            String::from("replication,master_seed,customers,mean_wait,mean_time_in_system");
        for id in &self.staff_ids {
            out.push_str(&format!(",utilisation_{id}"));
        }
        out.push('\n');
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{},{},{}",
                s.index, self.master_seed, s.customers, s.mean_wait, s.mean_time_in_system
            ));
            for u in &s.utilisation {
                out.push_str(&format!(",{u}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Runs `n` replications, in parallel, ordered by replication index.
pub fn run_replications(
    engine: Engine,
    scenario: &Scenario,
    service: &ServiceModel,
    profile: &ArrivalProfile,
    n: usize,
    master_seed: u64,
) -> Result<ReplicationSet> {
    if n == 0 {
        return Err(Error::validation("replication count must be at least 1"));
    }
    scenario.validate()?;
    let runs = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            run_engine(
                engine,
                scenario,
                service,
                profile,
                &StreamSet::new(master_seed, i),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = runs
        .iter()
        .enumerate()
        .map(|(i, r)| ReplicationSummary::of(i as u64, r))
        .collect();
    Ok(ReplicationSet {
        engine,
        scenario_id: scenario.id.clone(),
        master_seed,
        staff_ids: scenario.staff_ids(),
        summaries,
        runs,
    })
}
