use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arrivals::{sample_arrivals, ArrivalProfile};
use crate::error::{Error, Result};
use crate::rng::{StreamPurpose, StreamSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalBucket {
    pub start: f64,
    pub end: f64,
    pub configured_rate: f64,
    pub expected_count: f64,
    pub mean_count: f64,
    /// Standard error of `mean_count` over replications.
    pub std_error: f64,
    pub empirical_rate: f64,
    /// `|mean_count − expected_count| ≤ 3·std_error`.
    pub within_3se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalsCheck {
    pub replications: usize,
    pub master_seed: u64,
    pub bucket_width: f64,
    pub expected_total: f64,
    pub mean_total: f64,
    pub total_std_error: f64,
    pub total_within_3se: bool,
    pub buckets: Vec<ArrivalBucket>,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn within(mean: f64, expected: f64, se: f64) -> bool {
    (mean - expected).abs() <= 3.0 * se
}

/// Samples `n` arrival days and compares counts per bucket with the
/// profile's expectation.
pub fn arrivals_check(
    profile: &ArrivalProfile,
    n: usize,
    master_seed: u64,
    bucket_width: f64,
) -> Result<ArrivalsCheck> {
    if n == 0 {
        return Err(Error::validation("replication count must be at least 1"));
    }
    if !(bucket_width.is_finite() && bucket_width > 0.0) {
        return Err(Error::validation(format!(
            "bucket width must be positive, got {bucket_width}"
        )));
    }
    let horizon = profile.horizon();
    let n_buckets = (horizon / bucket_width).ceil().max(1.0) as usize;
    let counts: Vec<Vec<f64>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = StreamSet::new(master_seed, i).stream(StreamPurpose::Arrivals);
            let times = sample_arrivals(profile, &mut stream)?;
            let mut c = vec![0.0; n_buckets];
            for t in times {
                c[((t / bucket_width) as usize).min(n_buckets - 1)] += 1.0;
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;

    let buckets = (0..n_buckets)
        .map(|k| {
            let start = k as f64 * bucket_width;
            let end = (start + bucket_width).min(horizon);
            let per_rep: Vec<f64> = counts.iter().map(|c| c[k]).collect();
            let (mean_count, std_error) = mean_and_se(&per_rep);
            let expected_count = profile.expected_between(start, end);
            let len = end - start;
            ArrivalBucket {
                start,
                end,
                configured_rate: expected_count / len,
                expected_count,
                mean_count,
                std_error,
                empirical_rate: mean_count / len,
                within_3se: within(mean_count, expected_count, std_error),
            }
        })
        .collect();
    let totals: Vec<f64> = counts.iter().map(|c| c.iter().sum()).collect();
    let (mean_total, total_std_error) = mean_and_se(&totals);
    let expected_total = profile.expected_total();
    Ok(ArrivalsCheck {
        replications: n,
        master_seed,
        bucket_width,
        expected_total,
        mean_total,
        total_std_error,
        total_within_3se: within(mean_total, expected_total, total_std_error),
        buckets,
    })
}
