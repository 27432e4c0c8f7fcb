//! Black-box validation: models against an observed day, and DES against
//! ABS.
//!
//! Hypotheses (null form):
//! - Ho_C / Ho_D: DES / ABS waits are not significantly different from the
//!   observed waits (Mann-Whitney, `p > alpha`).
//! - Ho_E / Ho_F: DES / ABS waits show similar variability to the observed
//!   waits (relative variance difference within the threshold).
//! - Ho_A = Ho_C ∧ Ho_E, Ho_B = Ho_D ∧ Ho_F.

use serde::{Deserialize, Serialize};

use super::replication::ReplicationSet;
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::stats::{
    descriptive, histogram, mann_whitney, DescriptiveStats, FrequencyHistogram, MannWhitneyResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NotRejected,
    Rejected,
    NotEvaluable,
}

impl Verdict {
    pub fn from_bool(holds: bool) -> Verdict {
        if holds {
            Verdict::NotRejected
        } else {
            Verdict::Rejected
        }
    }

    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::NotEvaluable, _) | (_, Verdict::NotEvaluable) => Verdict::NotEvaluable,
            (Verdict::NotRejected, Verdict::NotRejected) => Verdict::NotRejected,
            _ => Verdict::Rejected,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::NotRejected => "not rejected",
            Verdict::Rejected => "rejected",
            Verdict::NotEvaluable => "not evaluable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub alpha: f64,
    pub variance_similarity_threshold: f64,
    pub histogram_bin_width: f64,
    pub pool_customer_waits: bool,
    pub exact_threshold: usize,
}

impl From<&ExperimentConfig> for ValidationOptions {
    fn from(e: &ExperimentConfig) -> Self {
        ValidationOptions {
            alpha: e.alpha,
            variance_similarity_threshold: e.variance_similarity_threshold,
            histogram_bin_width: e.histogram_bin_width,
            pool_customer_waits: e.pool_customer_waits,
            exact_threshold: e.exact_threshold,
        }
    }
}

impl Default for ValidationOptions {
    fn default() -> Self {
        (&ExperimentConfig::default()).into()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceComparison {
    pub variance: f64,
    pub reference_variance: f64,
    /// `|variance − reference| / reference`.
    pub relative_difference: f64,
    pub ratio: f64,
    pub similar: bool,
}

impl VarianceComparison {
    fn new(variance: f64, reference_variance: f64, threshold: f64) -> Self {
        let relative_difference = if reference_variance > 0.0 {
            (variance - reference_variance).abs() / reference_variance
        } else if variance == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let ratio = if reference_variance > 0.0 {
            variance / reference_variance
        } else if variance == 0.0 {
            1.0
        } else {
            f64::INFINITY
        };
        VarianceComparison {
            variance,
            reference_variance,
            relative_difference,
            ratio,
            similar: relative_difference <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleComparison {
    pub mann_whitney: MannWhitneyResult,
    pub variance: VarianceComparison,
    pub medians_similar: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub ho_a: Verdict,
    pub ho_b: Verdict,
    pub ho_c: Verdict,
    pub ho_d: Verdict,
    pub ho_e: Verdict,
    pub ho_f: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histograms {
    pub des: FrequencyHistogram,
    pub abs: FrequencyHistogram,
    pub observed: Option<FrequencyHistogram>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub alpha: f64,
    pub variance_similarity_threshold: f64,
    pub replications: usize,
    /// Unit of the model samples compared with observations:
    /// `replication_mean` or `customer`.
    pub observed_comparison_unit: String,
    /// Per-replication mean waits.
    pub des: DescriptiveStats,
    pub abs: DescriptiveStats,
    pub observed: Option<DescriptiveStats>,
    /// Every customer's wait, pooled over replications.
    pub des_customers: DescriptiveStats,
    pub abs_customers: DescriptiveStats,
    pub des_vs_observed: Option<SampleComparison>,
    pub abs_vs_observed: Option<SampleComparison>,
    pub des_vs_abs: SampleComparison,
    /// Customer-level variance of DES relative to ABS.
    pub customer_variance_ratio_des_abs: f64,
    pub histograms: Histograms,
    pub hypotheses: Hypotheses,
}

fn compare(x: &[f64], reference: &[f64], opts: &ValidationOptions) -> Result<SampleComparison> {
    let mw = mann_whitney(x, reference, opts.exact_threshold)?;
    let var = |s: &[f64]| descriptive(s).map(|d| d.variance.unwrap_or(0.0));
    let variance =
        VarianceComparison::new(var(x)?, var(reference)?, opts.variance_similarity_threshold);
    Ok(SampleComparison {
        medians_similar: mw.p_value > opts.alpha,
        mann_whitney: mw,
        variance,
    })
}

pub fn validation_experiment(
    des: &ReplicationSet,
    abs: &ReplicationSet,
    observed: Option<&[f64]>,
    opts: &ValidationOptions,
) -> Result<ValidationReport> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::Stats(format!(
            "alpha must be in (0, 1), got {}",
            opts.alpha
        )));
    }
    if des.n() == 0 || abs.n() == 0 {
        return Err(Error::Stats(
            "validation needs non-empty replication sets".into(),
        ));
    }
    let des_means = des.mean_waits();
    let abs_means = abs.mean_waits();
    let des_pooled = des.pooled_waits();
    let abs_pooled = abs.pooled_waits();

    let des_vs_abs = compare(&des_means, &abs_means, opts)?;
    let des_customers = descriptive_or_zero(&des_pooled)?;
    let abs_customers = descriptive_or_zero(&abs_pooled)?;
    let customer_variance_ratio_des_abs = match (des_customers.variance, abs_customers.variance) {
        (Some(d), Some(a)) if a > 0.0 => d / a,
        _ => f64::NAN,
    };

    let (des_model, abs_model) = if opts.pool_customer_waits {
        (des_pooled.as_slice(), abs_pooled.as_slice())
    } else {
        (des_means.as_slice(), abs_means.as_slice())
    };
    let (des_vs_observed, abs_vs_observed) = match observed {
        Some(obs) if !obs.is_empty() => (
            Some(compare(des_model, obs, opts)?),
            Some(compare(abs_model, obs, opts)?),
        ),
        Some(_) => return Err(Error::Stats("observed sample is empty".into())),
        None => (None, None),
    };

    let verdicts = |cmp: &Option<SampleComparison>| match cmp {
        Some(c) => (
            Verdict::from_bool(c.medians_similar),
            Verdict::from_bool(c.variance.similar),
        ),
        None => (Verdict::NotEvaluable, Verdict::NotEvaluable),
    };
    let (ho_c, ho_e) = verdicts(&des_vs_observed);
    let (ho_d, ho_f) = verdicts(&abs_vs_observed);

    let first_day = |set: &ReplicationSet| set.runs.first().map(|r| r.waits()).unwrap_or_default();
    let histograms = Histograms {
        des: histogram(&first_day(des), opts.histogram_bin_width)?,
        abs: histogram(&first_day(abs), opts.histogram_bin_width)?,
        observed: observed
            .map(|o| histogram(o, opts.histogram_bin_width))
            .transpose()?,
    };

    Ok(ValidationReport {
        alpha: opts.alpha,
        variance_similarity_threshold: opts.variance_similarity_threshold,
        replications: des.n(),
        observed_comparison_unit: if opts.pool_customer_waits {
            "customer"
        } else {
            "replication_mean"
        }
        .into(),
        des: descriptive(des_model)?,
        abs: descriptive(abs_model)?,
        observed: observed.map(descriptive).transpose()?,
        des_customers,
        abs_customers,
        des_vs_observed,
        abs_vs_observed,
        des_vs_abs,
        customer_variance_ratio_des_abs,
        histograms,
        hypotheses: Hypotheses {
            ho_a: ho_c.and(ho_e),
            ho_b: ho_d.and(ho_f),
            ho_c,
            ho_d,
            ho_e,
            ho_f,
        },
    })
}

fn descriptive_or_zero(sample: &[f64]) -> Result<DescriptiveStats> {
    if sample.is_empty() {
        descriptive(&[0.0])
    } else {
        descriptive(sample)
    }
}
