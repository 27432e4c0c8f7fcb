#![allow(dead_code)]

use dualsim::{Job, QueueDiscipline, Scenario, ServiceDistribution, ServiceModel};

pub fn deterministic_model(
    job1: f64,
    job2: f64,
    job3: f64,
    dwell: f64,
    help: f64,
    rooms: u32,
) -> ServiceModel {
    ServiceModel {
        distribution: ServiceDistribution::Deterministic,
        job1_mean: job1,
        job2_mean: job2,
        job3_mean: job3,
        dwell_mean: dwell,
        help_probability: help,
        rooms,
    }
}

/// Scenario from a staff index (0..3) per job.
pub fn scenario_from(staff: [usize; 3], discipline: QueueDiscipline) -> Scenario {
    let names = ["staff1", "staff2", "staff3"];
    Scenario::new(
        "t",
        [
            (Job::CountIn, names[staff[0]]),
            (Job::Help, names[staff[1]]),
            (Job::CountOut, names[staff[2]]),
        ],
        discipline,
    )
    .unwrap()
}

pub fn standard_scenarios(discipline: QueueDiscipline) -> Vec<Scenario> {
    Scenario::standard_set(discipline)
}
