//! Two-sample Mann-Whitney U test.
//!
//! With no ties and a small enough sample the null distribution of U is
//! computed exactly: the number of rank arrangements giving each U is the
//! coefficient list of the Gaussian binomial `[n+m choose n]_q`. Otherwise
//! the normal approximation with tie-corrected variance and a 0.5
//! continuity correction is used. Ties get midranks.

use serde::{Deserialize, Serialize};

use super::special::normal_cdf;
use crate::error::{Error, Result};

/// Default cut-off: exact when the smaller sample has at most 8 values.
pub const DEFAULT_EXACT_THRESHOLD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MwMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MannWhitneyResult {
    /// U for the first sample: pairs with `x > y`, ties counting one half.
    pub u_statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub method: MwMethod,
    pub n_x: usize,
    pub n_y: usize,
}

/// Counts of rank arrangements for each U in `0..=n·m`, over all
/// `C(n+m, n)` equally likely splits.
pub fn exact_u_counts(n: usize, m: usize) -> Vec<f64> {
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let top = n * m;
    let mut poly = vec![0.0; top + 1];
    poly[0] = 1.0;
    for i in 1..=n {
        // multiply by (1 - q^(m+i))
        let k = m + i;
        for j in (k..=top).rev() {
            poly[j] -= poly[j - k];
        }
        // divide by (1 - q^i)
        for j in i..=top {
            poly[j] += poly[j - i];
        }
    }
    poly
}

/// Two-sided exact p-value for an observed `u` (no ties).
pub fn exact_p_value(u: f64, n: usize, m: usize) -> f64 {
    let counts = exact_u_counts(n, m);
    let total: f64 = counts.iter().sum();
    let u = u.round() as usize;
    let lower: f64 = counts[..=u].iter().sum::<f64>() / total;
    let upper: f64 = counts[u..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn midranks(x: &[f64], y: &[f64]) -> (f64, Vec<usize>) {
    let mut pooled: Vec<(f64, bool)> = x
        .iter()
        .map(|&v| (v, true))
        .chain(y.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut rank_sum_x = 0.0;
    let mut tie_groups = Vec::new();
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for item in &pooled[i..=j] {
            if item.1 {
                rank_sum_x += rank;
            }
        }
        if j > i {
            tie_groups.push(j - i + 1);
        }
        i = j + 1;
    }
    (rank_sum_x, tie_groups)
}

pub fn mann_whitney(x: &[f64], y: &[f64], exact_threshold: usize) -> Result<MannWhitneyResult> {
    let (n, m) = (x.len(), y.len());
    if n == 0 || m == 0 {
        return Err(Error::Stats(
            "Mann-Whitney needs two non-empty samples".into(),
        ));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Stats("Mann-Whitney samples contain NaN".into()));
    }
    let (rank_sum_x, ties) = midranks(x, y);
    let u = rank_sum_x - (n * (n + 1)) as f64 / 2.0;
    let nm = (n * m) as f64;

    if ties.is_empty() && n.min(m) <= exact_threshold {
        return Ok(MannWhitneyResult {
            u_statistic: u,
            p_value: exact_p_value(u, n, m),
            method: MwMethod::Exact,
            n_x: n,
            n_y: m,
        });
    }

    let total = (n + m) as f64;
    let tie_term: f64 = ties
        .iter()
        .map(|&t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum();
    let variance = nm / 12.0 * ((total + 1.0) - tie_term / (total * (total - 1.0)));
    let p = if variance <= 0.0 {
        1.0
    } else {
        let z = ((u - nm / 2.0).abs() - 0.5).max(0.0) / variance.sqrt();
        (2.0 * normal_cdf(-z)).min(1.0)
    };
    Ok(MannWhitneyResult {
        u_statistic: u,
        p_value: p.max(f64::MIN_POSITIVE),
        method: MwMethod::NormalApproximation,
        n_x: n,
        n_y: m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_fixture() {
        let r = mann_whitney(&[1.0, 2.0], &[3.0, 4.0], DEFAULT_EXACT_THRESHOLD).unwrap();
        assert_eq!(r.u_statistic, 0.0);
        assert_eq!(r.method, MwMethod::Exact);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn three_by_three_fixture() {
        let r = mann_whitney(&[1.0, 3.0, 5.0], &[2.0, 4.0, 6.0], DEFAULT_EXACT_THRESHOLD).unwrap();
        assert_eq!(r.u_statistic, 3.0);
        assert!((r.p_value - 0.70).abs() < 1e-15);
    }

    #[test]
    fn identical_samples_give_p_one() {
        let x = [1.2, 3.4, 0.5, 2.2];
        let r = mann_whitney(&x, &x, DEFAULT_EXACT_THRESHOLD).unwrap();
        assert_eq!(r.u_statistic, 8.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn counts_are_gaussian_binomial() {
        // [4 choose 2]_q = 1 + q + 2q^2 + q^3 + q^4
        assert_eq!(exact_u_counts(2, 2), vec![1.0, 1.0, 2.0, 1.0, 1.0]);
        let c = exact_u_counts(5, 7);
        assert_eq!(c.iter().sum::<f64>(), 792.0);
        assert_eq!(c, exact_u_counts(7, 5));
    }

    #[test]
    fn ties_use_normal_approximation() {
        let r = mann_whitney(&[1.0, 2.0, 2.0], &[2.0, 3.0], DEFAULT_EXACT_THRESHOLD).unwrap();
        assert_eq!(r.method, MwMethod::NormalApproximation);
        // x > y pairs: none; ties: two (2,2) pairs at one half each
        assert_eq!(r.u_statistic, 1.0);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(mann_whitney(&[], &[1.0], 8).is_err());
        assert!(mann_whitney(&[1.0], &[], 8).is_err());
    }

    #[test]
    fn large_samples_use_approximation() {
        let x: Vec<f64> = (0..30).map(f64::from).collect();
        let y: Vec<f64> = (0..30).map(|i| f64::from(i) + 0.5).collect();
        let r = mann_whitney(&x, &y, 8).unwrap();
        assert_eq!(r.method, MwMethod::NormalApproximation);
        assert!(r.p_value > 0.5);
    }
}
