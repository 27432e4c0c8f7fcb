//! Domain types shared by both engines and the experiment harness.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default business-day length in minutes (8 hours).
pub const DEFAULT_HORIZON: f64 = 480.0;

/// Minutes since the fitting room opened.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimTime(pub f64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0.0);

    pub fn minutes(self) -> f64 {
        self.0
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// The three staff jobs of the fitting room.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Job {
    /// Count garments on entry and hand out the room card.
    #[serde(rename = "job1")]
    CountIn,
    /// Help a customer who is trying clothes on.
    #[serde(rename = "job2")]
    Help,
    /// Take back the card and unwanted garments on exit.
    #[serde(rename = "job3")]
    CountOut,
}

impl Job {
    pub const ALL: [Job; 3] = [Job::CountIn, Job::Help, Job::CountOut];

    pub fn number(self) -> u8 {
        match self {
            Job::CountIn => 1,
            Job::Help => 2,
            Job::CountOut => 3,
        }
    }
}

impl fmt::Display for Job {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "job{}", self.number())
    }
}

/// How an idle staff member picks the next customer to serve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QueueDiscipline {
    /// Longest-waiting request first.
    StrictFifo,
    /// Uniformly random among all outstanding requests.
    #[default]
    RandomPick,
}

/// Which simulation paradigm produced (or should produce) an output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Engine {
    Des,
    Abs,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Des => "DES",
            Engine::Abs => "ABS",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A staffing plan: who does which job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub assignment: BTreeMap<Job, String>,
    #[serde(default)]
    pub abs_queue_discipline: QueueDiscipline,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        assignment: [(Job, &str); 3],
        abs_queue_discipline: QueueDiscipline,
    ) -> Result<Self> {
        let scenario = Scenario {
            id: id.into(),
            assignment: assignment
                .iter()
                .map(|(job, staff)| (*job, staff.to_string()))
                .collect(),
            abs_queue_discipline,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// A single staff member doing every job.
    pub fn single_staff(id: impl Into<String>, discipline: QueueDiscipline) -> Self {
        Scenario::new(
            id,
            [
                (Job::CountIn, "staff1"),
                (Job::Help, "staff1"),
                (Job::CountOut, "staff1"),
            ],
            discipline,
        )
        .expect("static scenario is valid")
    }

    /// The three staffing plans compared in the scenario study.
    pub fn standard_set(discipline: QueueDiscipline) -> Vec<Scenario> {
        let plan = |id: &str, a: &str, b: &str, c: &str| {
            Scenario::new(
                id,
                [(Job::CountIn, a), (Job::Help, b), (Job::CountOut, c)],
                discipline,
            )
            .expect("static scenario is valid")
        };
        vec![
            plan("1", "staff1", "staff1", "staff1"),
            plan("2", "staff1", "staff2", "staff1"),
            plan("3", "staff1", "staff2", "staff3"),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Setup(problems.join("; ")))
        }
    }

    pub(crate) fn problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.id.trim().is_empty() {
            problems.push("scenario id must not be empty".to_string());
        }
        for job in Job::ALL {
            match self.assignment.get(&job) {
                None => problems.push(format!("scenario {}: {job} has no assigned staff", self.id)),
                Some(s) if s.trim().is_empty() => {
                    problems.push(format!("scenario {}: {job} has an empty staff id", self.id))
                }
                Some(_) => {}
            }
        }
        problems
    }

    /// Distinct staff ids in sorted order; a staff member's position in this
    /// list is their index in engine state and outputs.
    pub fn staff_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.assignment.values().cloned().collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn staff_count(&self) -> usize {
        self.staff_ids().len()
    }

    /// Jobs assigned to each staff member, indexed like [`Scenario::staff_ids`].
    pub fn jobs_by_staff(&self) -> Vec<Vec<Job>> {
        self.staff_ids()
            .iter()
            .map(|id| {
                Job::ALL
                    .into_iter()
                    .filter(|job| self.assignment.get(job) == Some(id))
                    .collect()
            })
            .collect()
    }
}

/// Distribution family used for service, dwell and help durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ServiceDistribution {
    #[default]
    Exponential,
    /// Every duration equals its mean. Used for hand-traceable fixtures.
    Deterministic,
}

/// Service-time parameters (minutes) and room capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceModel {
    #[serde(default)]
    pub distribution: ServiceDistribution,
    pub job1_mean: f64,
    pub job2_mean: f64,
    pub job3_mean: f64,
    pub dwell_mean: f64,
    pub help_probability: f64,
    pub rooms: u32,
}

impl ServiceModel {
    pub fn mean_for(&self, job: Job) -> f64 {
        match job {
            Job::CountIn => self.job1_mean,
            Job::Help => self.job2_mean,
            Job::CountOut => self.job3_mean,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems("service_model");
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    pub(crate) fn problems(&self, prefix: &str) -> Vec<String> {
        let mut problems = Vec::new();
        for (name, value) in [
            ("job1_mean", self.job1_mean),
            ("job2_mean", self.job2_mean),
            ("job3_mean", self.job3_mean),
            ("dwell_mean", self.dwell_mean),
        ] {
            if !(value.is_finite() && value > 0.0) {
                problems.push(format!(
                    "{prefix}.{name} must be a positive number, got {value}"
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.help_probability) {
            problems.push(format!(
                "{prefix}.help_probability must lie in [0, 1], got {}",
                self.help_probability
            ));
        }
        if self.rooms == 0 {
            problems.push(format!("{prefix}.rooms must be at least 1"));
        }
        problems
    }
}

impl Default for ServiceModel {
    fn default() -> Self {
        crate::config::Config::default_config().service_model
    }
}

/// Everything measured about one customer's visit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomerRecord {
    pub id: usize,
    pub arrival: f64,
    pub entry_wait: f64,
    pub help_wait: f64,
    pub return_wait: f64,
    /// Time spent waiting for a free room. Not part of `total_wait`.
    pub room_wait: f64,
    pub dwell: f64,
    pub needs_help: bool,
    pub departure: f64,
    pub total_wait: f64,
    pub time_in_system: f64,
}

impl CustomerRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: usize,
        arrival: f64,
        entry_wait: f64,
        help_wait: f64,
        return_wait: f64,
        room_wait: f64,
        dwell: f64,
        needs_help: bool,
        departure: f64,
    ) -> Self {
        CustomerRecord {
            id,
            arrival,
            entry_wait,
            help_wait,
            return_wait,
            room_wait,
            dwell,
            needs_help,
            departure,
            total_wait: entry_wait + help_wait + return_wait,
            time_in_system: departure - arrival,
        }
    }
}

/// Busy-time accounting for one staff member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaffUsage {
    pub staff_id: String,
    pub jobs: Vec<Job>,
    pub busy_time: f64,
    pub utilisation: f64,
}

/// Result of a single simulated business day.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutput {
    pub customers: Vec<CustomerRecord>,
    pub staff: Vec<StaffUsage>,
    /// `max(horizon, last departure)`.
    pub end_time: f64,
}

impl RunOutput {
    /// Mean total wait over customers; 0 for a day with no customers.
    pub fn mean_wait(&self) -> f64 {
        mean_of(self.customers.iter().map(|c| c.total_wait))
    }

    pub fn mean_time_in_system(&self) -> f64 {
        mean_of(self.customers.iter().map(|c| c.time_in_system))
    }

    pub fn waits(&self) -> Vec<f64> {
        self.customers.iter().map(|c| c.total_wait).collect()
    }
}

fn mean_of(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len();
    if n == 0 {
        0.0
    } else {
        values.sum::<f64>() / n as f64
    }
}
