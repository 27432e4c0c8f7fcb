//! Dual-paradigm simulation of a staffed fitting-room operation.
//!
//! Two engines model the same system: [`des`] is a process-flow,
//! event-calendar simulator and [`abs`] is an agent-based simulator built
//! from customer, staff and fitting-room state charts. Both consume the
//! same [`arrivals`] and [`rng`] streams and emit the same [`RunOutput`],
//! so the [`experiments`] harness can compare them with the procedures in
//! [`stats`] (Mann-Whitney U, variance comparison, paired-t confidence
//! intervals with Bonferroni adjustment).

pub mod abs;
pub mod arrivals;
pub mod config;
pub mod des;
pub mod error;
pub mod experiments;
pub mod model;
pub mod report;
pub mod rng;
pub mod stats;
pub mod trace;

pub mod calendar;
mod customer;

pub use arrivals::{build_arrival_profile, sample_arrivals, ArrivalProfile, Segment};
pub use config::{load_config, Config, ExperimentConfig};
pub use error::{Error, Result};
pub use model::{
    CustomerRecord, Engine, Job, QueueDiscipline, RunOutput, Scenario, ServiceDistribution,
    ServiceModel, SimTime, StaffUsage,
};
pub use rng::{derive_stream, RngStream, StreamPurpose, StreamSet};
