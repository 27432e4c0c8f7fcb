//! Piecewise-constant non-homogeneous Poisson arrivals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamPurpose};

/// One constant-rate interval `[start, end)` of the business day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    /// Customers per minute.
    pub rate: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn expected_count(&self) -> f64 {
        self.rate * self.length()
    }
}

/// Arrival-rate schedule covering `[0, horizon)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalProfile {
    segments: Vec<Segment>,
    horizon: f64,
}

impl ArrivalProfile {
    /// Checks that `segments` are contiguous, start at 0, end at `horizon`
    /// and carry non-negative rates.
    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn new(segments: Vec<Segment>, horizon: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if !(horizon.is_finite() && horizon > 0.0) {
            problems.push(format!("horizon must be positive, got {horizon}"));
        }
        if segments.is_empty() {
            problems.push("profile needs at least one segment".to_string());
        }
        let mut cursor = 0.0;
        for (i, seg) in segments.iter().enumerate() {
            if seg.start != cursor {
                problems.push(format!(
                    "segment {i} starts at {} but previous segment ended at {cursor}",
                    seg.start
                ));
            }
            if !(seg.end > seg.start) {
                problems.push(format!("segment {i} is empty or reversed"));
            }
            if !(seg.rate.is_finite() && seg.rate >= 0.0) {
                problems.push(format!("segment {i} has invalid rate {}", seg.rate));
            }
            cursor = seg.end;
        }
        if !segments.is_empty() && cursor != horizon {
            problems.push(format!(
                "segments end at {cursor}, expected horizon {horizon}"
            ));
        }
        if problems.is_empty() {
            Ok(ArrivalProfile { segments, horizon })
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// A single-rate profile over `[0, horizon)`.
    pub fn constant(rate: f64, horizon: f64) -> Result<Self> {
        ArrivalProfile::new(
            vec![Segment {
                start: 0.0,
                end: horizon,
                rate,
            }],
            horizon,
        )
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn expected_total(&self) -> f64 {
        self.segments.iter().map(Segment::expected_count).sum()
    }

    /// Expected number of arrivals in `[from, to)`.
    pub fn expected_between(&self, from: f64, to: f64) -> f64 {
        self.segments
            .iter()
            .map(|s| (to.min(s.end) - from.max(s.start)).max(0.0) * s.rate)
            .sum()
    }

    pub fn rate_at(&self, t: f64) -> f64 {
        self.segments
            .iter()
            .find(|s| s.start <= t && t < s.end)
            .map_or(0.0, |s| s.rate)
    }
}

/// Builds an hourly profile from one rate (customers per minute) per hour.
pub fn build_arrival_profile(hourly_rates: &[f64], horizon: f64) -> Result<ArrivalProfile> {
    let mut problems = Vec::new();
    if hourly_rates.len() as f64 * 60.0 != horizon {
        problems.push(format!(
            "{} hourly rates cover {} minutes but horizon is {horizon}",
            hourly_rates.len(),
            hourly_rates.len() * 60
        ));
    }
    for (hour, rate) in hourly_rates.iter().enumerate() {
        if !(rate.is_finite() && *rate >= 0.0) {
            problems.push(format!(
                "hour {hour} has negative or non-finite rate {rate}"
            ));
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let segments = hourly_rates
        .iter()
        .enumerate()
        .map(|(hour, &rate)| Segment {
            start: hour as f64 * 60.0,
            end: (hour + 1) as f64 * 60.0,
            rate,
        })
        .collect();
    ArrivalProfile::new(segments, horizon)
}

/// Samples arrival times on `[0, horizon)`.
///
/// Inside each segment gaps are exponential with the segment's rate. The
/// gap in progress at a segment boundary is discarded and sampling restarts
/// at the boundary, which is exact for piecewise-constant rates because the
/// exponential is memoryless.
pub fn sample_arrivals(profile: &ArrivalProfile, stream: &mut RngStream) -> Result<Vec<f64>> {
    if stream.purpose() != StreamPurpose::Arrivals {
        return Err(Error::validation(format!(
            "arrival sampling needs an arrivals stream, got {}",
            stream.purpose()
        )));
    }
    let mut times = Vec::with_capacity(profile.expected_total().ceil() as usize + 8);
    for seg in &profile.segments {
        if seg.rate == 0.0 {
            continue;
        }
        let mean_gap = 1.0 / seg.rate;
        let mut t = seg.start;
        loop {
            t += stream.exponential(mean_gap);
            if t >= seg.end {
                break;
            }
            if times.last().is_none_or(|&last| t > last) {
                times.push(t);
            }
        }
    }
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use proptest::prelude::*;

    #[test]
    fn constant_hourly_profile() {
        let p = build_arrival_profile(&[1.0; 8], 480.0).unwrap();
        assert_eq!(p.segments().len(), 8);
        assert!(p
            .segments()
            .iter()
            .all(|s| s.rate == 1.0 && s.length() == 60.0));
        assert_eq!(p.segments()[7].end, 480.0);
    }

    #[test]
    fn zero_profile_generates_nothing() {
        let p = build_arrival_profile(&[0.0; 8], 480.0).unwrap();
        let mut s = derive_stream(1, 0, StreamPurpose::Arrivals);
        assert!(sample_arrivals(&p, &mut s).unwrap().is_empty());
    }

    #[test]
    fn negative_rate_rejected() {
        let mut rates = [1.0; 8];
        rates[0] = -1.0;
        assert!(matches!(
            build_arrival_profile(&rates, 480.0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(build_arrival_profile(&[1.0; 7], 480.0).is_err());
    }

    #[test]
    fn gap_in_segments_rejected() {
        let segs = vec![
            Segment {
                start: 0.0,
                end: 10.0,
                rate: 1.0,
            },
            Segment {
                start: 11.0,
                end: 20.0,
                rate: 1.0,
            },
        ];
        assert!(ArrivalProfile::new(segs, 20.0).is_err());
    }

    #[test]
    fn wrong_stream_purpose_rejected() {
        let p = ArrivalProfile::constant(1.0, 60.0).unwrap();
        let mut s = derive_stream(1, 0, StreamPurpose::Services);
        assert!(sample_arrivals(&p, &mut s).is_err());
    }

    #[test]
    fn same_stream_same_arrivals() {
        let p = build_arrival_profile(&[0.2, 0.4, 0.6, 0.6, 0.5, 0.4, 0.3, 0.2], 480.0).unwrap();
        let a = sample_arrivals(&p, &mut derive_stream(5, 2, StreamPurpose::Arrivals)).unwrap();
        let b = sample_arrivals(&p, &mut derive_stream(5, 2, StreamPurpose::Arrivals)).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn arrivals_sorted_and_in_range(
            rates in proptest::collection::vec(0.0f64..2.0, 8),
            seed in any::<u64>(),
            rep in 0u64..1000,
        ) {
            let p = build_arrival_profile(&rates, 480.0).unwrap();
            let times = sample_arrivals(&p, &mut derive_stream(seed, rep, StreamPurpose::Arrivals)).unwrap();
            prop_assert!(times.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(times.iter().all(|&t| (0.0..480.0).contains(&t)));
            for t in &times {
                prop_assert!(p.rate_at(*t) > 0.0);
            }
        }
    }
}
