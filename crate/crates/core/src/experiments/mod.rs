//! Replication runs, the validation and scenario experiments, calibration
//! and arrival-process checks.

pub mod arrivals_check;
pub mod calibrate;
pub mod observed;
pub mod replication;
pub mod scenarios;
pub mod validation;

pub use arrivals_check::{arrivals_check, ArrivalBucket, ArrivalsCheck};
pub use calibrate::{
    calibrate, CalibrationOptions, CalibrationResult, CalibrationTargets, SearchSpace,
};
pub use observed::{parse_observed_csv, read_observed_csv, OBSERVED_HEADER};
pub use replication::{
    run_engine, run_engine_traced, run_replications, ReplicationSet, ReplicationSummary,
};
pub use scenarios::{
    compare_replication_sets, ho_g, multi_scenario_experiment, Measure, PairedComparison,
    ScenarioComparisonReport, ScenarioRow,
};
pub use validation::{
    validation_experiment, Hypotheses, SampleComparison, ValidationOptions, ValidationReport,
    VarianceComparison, Verdict,
};
