//! Optional per-event trace output for debugging and oracle comparison.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CustomerRecord;

/// One processed event. `queue_lengths` are (entry, help, return) after
/// the event and any service starts it triggered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub time: f64,
    pub event: String,
    pub customer_id: Option<usize>,
    pub staff_id: Option<String>,
    pub queue_lengths: [usize; 3],
    /// Agent state after the transition (agent-based engine only).
    pub agent_state: Option<String>,
}

/// Writes `records` as CSV. The `agent_state` column is included only when
/// `with_agent_state` is set.
pub fn write_trace_csv<W: Write>(
    records: &[TraceRecord],
    out: W,
    with_agent_state: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| Error::Parse {
        what: "trace csv".into(),
        message: e.to_string(),
    };
    let mut header = vec!["time", "event", "customer_id", "staff_id", "queue_lengths"];
    if with_agent_state {
        header.push("agent_state");
    }
    w.write_record(&header).map_err(to_err)?;
    for r in records {
        let mut row = vec![
            r.time.to_string(),
            r.event.clone(),
            r.customer_id.map(|c| c.to_string()).unwrap_or_default(),
            r.staff_id.clone().unwrap_or_default(),
            format!(
                "{}/{}/{}",
                r.queue_lengths[0], r.queue_lengths[1], r.queue_lengths[2]
            ),
        ];
        if with_agent_state {
            row.push(r.agent_state.clone().unwrap_or_default());
        }
        w.write_record(&row).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io("trace csv", e))?;
    Ok(())
}

/// Writes one CSV row per customer record.
pub fn write_customers_csv<W: Write>(customers: &[CustomerRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for c in customers {
        w.serialize(c).map_err(|e| Error::Parse {
            what: "customer csv".into(),
            message: e.to_string(),
        })?;
    }
    w.flush().map_err(|e| Error::io("customer csv", e))?;
    Ok(())
}
