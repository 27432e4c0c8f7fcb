use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts over half-open bins `[k·w, (k+1)·w)` starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyHistogram {
    pub bin_width: f64,
    pub counts: Vec<usize>,
    pub n: usize,
}

impl FrequencyHistogram {
    pub fn bin_start(&self, k: usize) -> f64 {
        k as f64 * self.bin_width
    }

    /// CSV with columns `bin_start,bin_end,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start,bin_end,count\n");
        for (k, count) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                self.bin_start(k),
                self.bin_start(k + 1),
                count
            ));
        }
        out
    }
}

/// Bins a sample of non-negative values. An empty sample gives a single
/// empty bin.
pub fn histogram(sample: &[f64], bin_width: f64) -> Result<FrequencyHistogram> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::Stats(format!(
            "bin width must be positive, got {bin_width}"
        )));
    }
    if let Some(bad) = sample.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(Error::Stats(format!(
            "histogram values must be non-negative, got {bad}"
        )));
    }
    let bin_of = |x: f64| (x / bin_width).floor() as usize;
    let bins = sample.iter().map(|&x| bin_of(x) + 1).max().unwrap_or(1);
    let mut counts = vec![0; bins];
    for &x in sample {
        counts[bin_of(x)] += 1;
    }
    Ok(FrequencyHistogram {
        bin_width,
        counts,
        n: sample.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fixture_counts() {
        let h = histogram(&[0.1, 0.9, 1.5], 1.0).unwrap();
        assert_eq!(h.counts, vec![2, 1]);
        assert_eq!(h.n, 3);
    }

    #[test]
    fn empty_sample() {
        let h = histogram(&[], 0.5).unwrap();
        assert!(h.counts.iter().all(|&c| c == 0));
        assert_eq!(h.n, 0);
    }

    #[test]
    fn bad_width() {
        assert!(histogram(&[1.0], 0.0).is_err());
        assert!(histogram(&[1.0], -1.0).is_err());
    }

    #[test]
    fn boundary_goes_to_upper_bin() {
        assert_eq!(histogram(&[1.0], 1.0).unwrap().counts, vec![0, 1]);
    }

    proptest! {
        #[test]
        fn counts_conserve_n(sample in proptest::collection::vec(0.0f64..50.0, 0..300), w in 0.05f64..5.0) {
            let h = histogram(&sample, w).unwrap();
            prop_assert_eq!(h.counts.iter().sum::<usize>(), sample.len());
            // direct count oracle for each bin
            for (k, &c) in h.counts.iter().enumerate() {
                let direct = sample.iter().filter(|&&x| (x / w).floor() as usize == k).count();
                prop_assert_eq!(c, direct);
            }
        }
    }
}
