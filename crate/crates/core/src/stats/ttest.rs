//! t-based confidence intervals, Bonferroni levels and interval verdicts.

use serde::{Deserialize, Serialize};

use super::special::student_t_quantile;
use crate::error::{Error, Result};

/// Confidence interval for the mean of paired differences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedTCIResult {
    pub n: usize,
    pub mean_difference: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub level: f64,
    pub df: usize,
}

/// Confidence interval for a sample mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub level: f64,
}

/// What a difference interval says about `first − second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiConclusion {
    NoDifference,
    FirstGreater,
    SecondGreater,
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Stats(format!(
            "confidence level must be in (0, 1), got {level}"
        )))
    }
}

/// `(mean, half_width)` of the two-sided t interval. A sample with zero
/// spread (or a single value) has zero half-width.
fn t_interval(sample: &[f64], level: f64) -> (f64, f64) {
    let n = sample.len();
    let mean = sample.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = sample.iter().map(|x| (x - mean).powi(2)).sum();
    if ss == 0.0 {
        return (mean, 0.0);
    }
    let sd = (ss / (n - 1) as f64).sqrt();
    let t = student_t_quantile(1.0 - (1.0 - level) / 2.0, (n - 1) as f64);
    (mean, t * sd / (n as f64).sqrt())
}

pub fn paired_t_ci(differences: &[f64], level: f64) -> Result<PairedTCIResult> {
    check_level(level)?;
    let n = differences.len();
    if n == 0 {
        return Err(Error::Stats("paired-t interval of zero differences".into()));
    }
    let (mean, half) = t_interval(differences, level);
    Ok(PairedTCIResult {
        n,
        mean_difference: mean,
        ci_lower: mean - half,
        ci_upper: mean + half,
        level,
        df: n.saturating_sub(1),
    })
}

/// Pairs `first[i] − second[i]` and builds the interval.
pub fn paired_t_ci_of(first: &[f64], second: &[f64], level: f64) -> Result<PairedTCIResult> {
    if first.len() != second.len() {
        return Err(Error::Stats(format!(
            "paired samples differ in length ({} vs {})",
            first.len(),
            second.len()
        )));
    }
    let diffs: Vec<f64> = first.iter().zip(second).map(|(a, b)| a - b).collect();
    paired_t_ci(&diffs, level)
}

pub fn mean_ci(sample: &[f64], level: f64) -> Result<MeanCi> {
    check_level(level)?;
    if sample.len() < 2 {
        return Err(Error::Stats(
            "mean interval needs at least two values".into(),
        ));
    }
    let (mean, half) = t_interval(sample, level);
    Ok(MeanCi {
        n: sample.len(),
        mean,
        ci_lower: mean - half,
        ci_upper: mean + half,
        level,
    })
}

/// Per-comparison significance for `comparisons` simultaneous intervals.
pub fn bonferroni_level(alpha: f64, comparisons: usize) -> Result<f64> {
    if comparisons == 0 {
        return Err(Error::Stats(
            "Bonferroni adjustment needs at least one comparison".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Stats(format!(
            "alpha must be in (0, 1), got {alpha}"
        )));
    }
    Ok(alpha / comparisons as f64)
}

/// Verdict from the sign pattern of an interval. A bound exactly at zero
/// counts as containing zero.
pub fn classify_interval(lower: f64, upper: f64) -> CiConclusion {
    if lower > 0.0 {
        CiConclusion::FirstGreater
    } else if upper < 0.0 {
        CiConclusion::SecondGreater
    } else {
        CiConclusion::NoDifference
    }
}

pub fn classify_ci(ci: &PairedTCIResult) -> CiConclusion {
    classify_interval(ci.ci_lower, ci.ci_upper)
}
