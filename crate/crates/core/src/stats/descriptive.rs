use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Location and spread of a sample. Spread fields need at least two values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Sample standard deviation (n − 1 divisor).
    pub std_dev: Option<f64>,
    /// Always exactly `std_dev²`.
    pub variance: Option<f64>,
}

pub fn descriptive(sample: &[f64]) -> Result<DescriptiveStats> {
    let n = sample.len();
    if n == 0 {
        return Err(Error::Stats(
            "descriptive statistics of an empty sample".into(),
        ));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let std_dev = (n >= 2).then(|| {
        let ss: f64 = sample.iter().map(|x| (x - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    });
    Ok(DescriptiveStats {
        n,
        mean,
        median,
        std_dev,
        variance: std_dev.map(|s| s * s),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_samples() {
        let d = descriptive(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((d.mean, d.median), (2.0, 2.0));
        assert!((d.std_dev.unwrap() - 1.0).abs() < 1e-15);
        assert!((d.variance.unwrap() - 1.0).abs() < 1e-15);

        let d = descriptive(&[5.0; 4]).unwrap();
        assert_eq!((d.std_dev, d.variance), (Some(0.0), Some(0.0)));

        let d = descriptive(&[8.0, 2.0, 6.0, 4.0]).unwrap();
        assert_eq!((d.mean, d.median), (5.0, 5.0));
        assert!((d.variance.unwrap() - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn single_value_has_no_spread() {
        let d = descriptive(&[3.5]).unwrap();
        assert_eq!((d.mean, d.median, d.std_dev), (3.5, 3.5, None));
    }

    #[test]
    fn empty_is_error() {
        assert!(descriptive(&[]).is_err());
    }

    #[test]
    fn variance_is_sd_squared() {
        let d = descriptive(&[0.3, 1.7, 2.2, 9.1, 4.4]).unwrap();
        let sd = d.std_dev.unwrap();
        assert_eq!(d.variance.unwrap(), sd * sd);
    }
}
