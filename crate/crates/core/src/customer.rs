//! Per-customer attributes and timestamps shared by both engines.

use crate::error::{Error, Result};
use crate::model::{CustomerRecord, ServiceModel};
use crate::rng::RngStream;

/// Attributes fixed when a customer arrives. They are drawn in arrival
/// order from their own streams, so they are identical across engines and
/// staffing scenarios for the same replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CustomerTraits {
    pub dwell: f64,
    pub needs_help: bool,
    /// Dwell elapsed before the help request.
    pub help_after: f64,
    /// Dwell remaining once help completes.
    pub dwell_after_help: f64,
}

impl CustomerTraits {
    pub fn draw(service: &ServiceModel, help_flags: &mut RngStream, dwell: &mut RngStream) -> Self {
        // Always two help draws per customer so the stream stays aligned.
        let flag = help_flags.uniform();
        let split = help_flags.uniform();
        let dwell = dwell.duration(service.distribution, service.dwell_mean);
        let needs_help = flag < service.help_probability;
        let help_after = if needs_help { split * dwell } else { dwell };
        CustomerTraits {
            dwell,
            needs_help,
            help_after,
            dwell_after_help: dwell - help_after,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Timeline {
    pub arrival: f64,
    pub job1_start: Option<f64>,
    pub job1_end: Option<f64>,
    pub room_enter: Option<f64>,
    pub help_request: Option<f64>,
    pub help_start: Option<f64>,
    pub help_end: Option<f64>,
    pub return_join: Option<f64>,
    pub job3_start: Option<f64>,
    pub departure: Option<f64>,
}

impl Timeline {
    pub fn new(arrival: f64) -> Self {
        Timeline {
            arrival,
            ..Timeline::default()
        }
    }

    pub fn into_record(self, id: usize, traits: &CustomerTraits) -> Result<CustomerRecord> {
        let need = |v: Option<f64>, what: &str| {
            v.ok_or_else(|| Error::Consistency(format!("customer {id} never reached {what}")))
        };
        let job1_start = need(self.job1_start, "count-in")?;
        let job1_end = need(self.job1_end, "count-in completion")?;
        let room_enter = need(self.room_enter, "a fitting room")?;
        let return_join = need(self.return_join, "the return queue")?;
        let job3_start = need(self.job3_start, "count-out")?;
        let departure = need(self.departure, "departure")?;
        let help_wait = if traits.needs_help {
            need(self.help_start, "help")? - need(self.help_request, "a help request")?
        } else {
            0.0
        };
        Ok(CustomerRecord::new(
            id,
            self.arrival,
            job1_start - self.arrival,
            help_wait,
            job3_start - return_join,
            room_enter - job1_end,
            traits.dwell,
            traits.needs_help,
            departure,
        ))
    }
}
