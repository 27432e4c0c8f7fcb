//! Deterministic, purpose-separated random-number streams.
//!
//! Every draw in a run comes from a stream keyed by
//! `(master_seed, replication_index, purpose)`. Keeping purposes apart lets
//! two engines, or two staffing scenarios, see the same arrivals and
//! customer attributes for replication `i` even when one of them consumes a
//! different number of service or choice draws (common random numbers).

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::model::ServiceDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StreamPurpose {
    Arrivals,
    Services,
    HelpFlags,
    Dwell,
    AbsChoice,
}

impl StreamPurpose {
    pub const ALL: [StreamPurpose; 5] = [
        StreamPurpose::Arrivals,
        StreamPurpose::Services,
        StreamPurpose::HelpFlags,
        StreamPurpose::Dwell,
        StreamPurpose::AbsChoice,
    ];

    fn code(self) -> u64 {
        match self {
            StreamPurpose::Arrivals => 0,
            StreamPurpose::Services => 1,
            StreamPurpose::HelpFlags => 2,
            StreamPurpose::Dwell => 3,
            StreamPurpose::AbsChoice => 4,
        }
    }
}

impl fmt::Display for StreamPurpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StreamPurpose::Arrivals => "arrivals",
            StreamPurpose::Services => "services",
            StreamPurpose::HelpFlags => "help_flags",
            StreamPurpose::Dwell => "dwell",
            StreamPurpose::AbsChoice => "abs_choice",
        };
        f.write_str(s)
    }
}

// Reserve 8 stream ids per replication so new purposes can be added without
// reshuffling existing sequences.
const PURPOSE_SLOTS: u64 = 8;

/// A single reproducible random sequence.
#[derive(Clone)]
pub struct RngStream {
    master_seed: u64,
    replication_index: u64,
    purpose: StreamPurpose,
    rng: ChaCha8Rng,
}

impl fmt::Debug for RngStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RngStream")
            .field("master_seed", &self.master_seed)
            .field("replication_index", &self.replication_index)
            .field("purpose", &self.purpose)
            .finish()
    }
}

/// Builds the stream for `(master_seed, replication_index, purpose)`.
///
/// The seed selects the ChaCha key; replication and purpose select one of
/// the cipher's independent 64-bit stream ids.
pub fn derive_stream(
    master_seed: u64,
    replication_index: u64,
    purpose: StreamPurpose,
) -> RngStream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(replication_index * PURPOSE_SLOTS + purpose.code());
    RngStream {
        master_seed,
        replication_index,
        purpose,
        rng,
    }
}

impl RngStream {
    pub fn purpose(&self) -> StreamPurpose {
        self.purpose
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replication_index(&self) -> u64 {
        self.replication_index
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponential draw with the given mean.
    pub fn exponential(&mut self, mean: f64) -> f64 {
        let unit: f64 = Exp1.sample(&mut self.rng);
        unit * mean
    }

    /// A duration with the given mean under `dist`. Deterministic durations
    /// consume no randomness.
    pub fn duration(&mut self, dist: ServiceDistribution, mean: f64) -> f64 {
        match dist {
            ServiceDistribution::Exponential => self.exponential(mean),
            ServiceDistribution::Deterministic => mean,
        }
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        self.rng.random_range(0..n)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// The full set of streams needed by one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSet {
    pub master_seed: u64,
    pub replication_index: u64,
}

impl StreamSet {
    pub fn new(master_seed: u64, replication_index: u64) -> Self {
        StreamSet {
            master_seed,
            replication_index,
        }
    }

    pub fn stream(&self, purpose: StreamPurpose) -> RngStream {
        derive_stream(self.master_seed, self.replication_index, purpose)
    }
}
