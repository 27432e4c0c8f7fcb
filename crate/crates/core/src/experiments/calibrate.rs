//! Fits the service model to target scenario outputs.
//!
//! Two parameters are searched: a common scale on the three staff service
//! means and the fitting-room dwell mean. Waiting time responds mostly to
//! the scale, time in system to both. The search is a compass search with
//! step halving over the bounded box; each evaluation runs the same
//! replications (same master seed), so the objective is a deterministic
//! function of the parameters.

use serde::{Deserialize, Serialize};

use super::replication::run_replications;
use crate::arrivals::ArrivalProfile;
use crate::error::{Error, Result};
use crate::model::{Engine, Scenario, ServiceModel};

pub const MIN_CALIBRATION_REPLICATIONS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTargets {
    pub mean_wait: f64,
    pub mean_time_in_system: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    /// Bounds on the multiplier applied to job1, job2 and job3 means.
    pub service_scale: (f64, f64),
    pub dwell_mean: (f64, f64),
}

impl Default for SearchSpace {
    fn default() -> Self {
        SearchSpace {
            service_scale: (0.1, 5.0),
            dwell_mean: (0.5, 30.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    pub engine: Engine,
    pub replications: usize,
    pub master_seed: u64,
    /// Maximum number of model evaluations.
    pub budget: usize,
    /// Stop once every relative error is at most this.
    pub tolerance: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            engine: Engine::Des,
            replications: MIN_CALIBRATION_REPLICATIONS,
            master_seed: 42,
            budget: 80,
            tolerance: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub service_model: ServiceModel,
    pub service_scale: f64,
    pub targets: CalibrationTargets,
    pub achieved_wait: f64,
    pub achieved_time_in_system: f64,
    pub wait_error: f64,
    pub time_in_system_error: f64,
    /// Sum of squared errors, the search objective.
    pub residual: f64,
    pub evaluations: usize,
    pub within_tolerance: bool,
}

/// Relative error, or absolute error for a zero target.
fn error_of(achieved: f64, target: f64) -> f64 {
    if target == 0.0 {
        achieved.abs()
    } else {
        (achieved - target).abs() / target
    }
}

fn scaled(base: &ServiceModel, scale: f64, dwell: f64) -> ServiceModel {
    ServiceModel {
        job1_mean: base.job1_mean * scale,
        job2_mean: base.job2_mean * scale,
        job3_mean: base.job3_mean * scale,
        dwell_mean: dwell,
        ..base.clone()
    }
}

struct Evaluator<'a> {
    scenario: &'a Scenario,
    base: &'a ServiceModel,
    profile: &'a ArrivalProfile,
    targets: CalibrationTargets,
    opts: CalibrationOptions,
    evaluations: usize,
    best: Option<CalibrationResult>,
}

impl Evaluator<'_> {
    fn eval(&mut self, scale: f64, dwell: f64) -> Result<Option<f64>> {
        if self.evaluations >= self.opts.budget {
            return Ok(None);
        }
        self.evaluations += 1;
        let model = scaled(self.base, scale, dwell);
        let set = run_replications(
            self.opts.engine,
            self.scenario,
            &model,
            self.profile,
            self.opts.replications,
            self.opts.master_seed,
        )?;
        let n = set.n() as f64;
        let wait = set.mean_waits().iter().sum::<f64>() / n;
        let tis = set.mean_times_in_system().iter().sum::<f64>() / n;
        let we = error_of(wait, self.targets.mean_wait);
        let te = error_of(tis, self.targets.mean_time_in_system);
        let residual = we * we + te * te;
        if self.best.as_ref().is_none_or(|b| residual < b.residual) {
            self.best = Some(CalibrationResult {
                service_model: model,
                service_scale: scale,
                targets: self.targets,
                achieved_wait: wait,
                achieved_time_in_system: tis,
                wait_error: we,
                time_in_system_error: te,
                residual,
                evaluations: 0,
                within_tolerance: we <= self.opts.tolerance && te <= self.opts.tolerance,
            });
        }
        Ok(Some(residual))
    }

    fn done(&self) -> bool {
        self.best.as_ref().is_some_and(|b| b.within_tolerance)
    }
}

fn check_bounds(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi {
        Ok(())
    } else {
        Err(Error::Calibration(format!(
            "{name} bounds must satisfy 0 < lower <= upper, got ({lo}, {hi})"
        )))
    }
}

/// Searches for the service model whose `scenario` output best matches
/// `targets`. Never fails silently: the result always carries the errors
/// reached, and `within_tolerance` says whether they meet the tolerance.
pub fn calibrate(
    targets: CalibrationTargets,
    scenario: &Scenario,
    base: &ServiceModel,
    profile: &ArrivalProfile,
    space: SearchSpace,
    opts: CalibrationOptions,
) -> Result<CalibrationResult> {
    if !(targets.mean_wait >= 0.0 && targets.mean_time_in_system > 0.0) {
        return Err(Error::Calibration(format!(
            "targets must be non-negative with positive time in system, got wait {} and time in system {}",
            targets.mean_wait, targets.mean_time_in_system
        )));
    }
    if opts.budget == 0 {
        return Err(Error::Calibration("budget allows no evaluation".into()));
    }
    if opts.replications < MIN_CALIBRATION_REPLICATIONS {
        return Err(Error::Calibration(format!(
            "calibration needs at least {MIN_CALIBRATION_REPLICATIONS} replications per evaluation, got {}",
            opts.replications
        )));
    }
    check_bounds("service_scale", space.service_scale)?;
    check_bounds("dwell_mean", space.dwell_mean)?;
    base.validate()?;
    scenario.validate()?;

    let clamp = |v: f64, (lo, hi): (f64, f64)| v.clamp(lo, hi);
    let mut ev = Evaluator {
        scenario,
        base,
        profile,
        targets,
        opts,
        evaluations: 0,
        best: None,
    };

    let mut x = [
        clamp(1.0, space.service_scale),
        clamp(base.dwell_mean, space.dwell_mean),
    ];
    let bounds = [space.service_scale, space.dwell_mean];
    let mut fx = ev.eval(x[0], x[1])?.expect("budget checked above");
    let mut step = [
        (bounds[0].1 - bounds[0].0) / 4.0,
        (bounds[1].1 - bounds[1].0) / 4.0,
    ];
    let min_step = [1e-4 * bounds[0].1, 1e-4 * bounds[1].1];

    'search: while !ev.done() && (step[0] > min_step[0] || step[1] > min_step[1]) {
        let mut improved = false;
        for d in 0..2 {
            if step[d] <= min_step[d] {
                continue;
            }
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[d] = clamp(x[d] + sign * step[d], bounds[d]);
                if y[d] == x[d] {
                    continue;
                }
                match ev.eval(y[0], y[1])? {
                    None => break 'search,
                    Some(fy) if fy < fx => {
                        x = y;
                        fx = fy;
                        improved = true;
                        break;
                    }
                    Some(_) => {}
                }
                if ev.done() {
                    break 'search;
                }
            }
        }
        if !improved {
            step[0] /= 2.0;
            step[1] /= 2.0;
        }
    }

    let evaluations = ev.evaluations;
    let mut best = ev.best.expect("at least one evaluation");
    best.evaluations = evaluations;
    Ok(best)
}
