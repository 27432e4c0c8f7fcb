use crate::error::{Error, Result};
use crate::model::Job;

/// A customer's outstanding request for staff attention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Request {
    pub customer: usize,
    pub job: Job,
    pub posted_at: f64,
    pub seq: u64,
}

/// Holds outstanding requests until a staff agent accepts them.
#[derive(Debug, Default)]
pub struct Mediator {
    // Kept in posting order, i.e. sorted by `seq`.
    requests: Vec<Request>,
    next_seq: u64,
}

impl Mediator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post(&mut self, customer: usize, job: Job, now: f64) -> Result<()> {
        if self.requests.iter().any(|r| r.customer == customer) {
            return Err(Error::Consistency(format!(
                "customer {customer} already has an outstanding request"
            )));
        }
        self.requests.push(Request {
            customer,
            job,
            posted_at: now,
            seq: self.next_seq,
        });
        self.next_seq += 1;
        Ok(())
    }

    /// Outstanding requests for any of `jobs`, oldest first.
    pub fn candidates(&self, jobs: &[Job]) -> Vec<Request> {
        self.requests
            .iter()
            .filter(|r| jobs.contains(&r.job))
            .copied()
            .collect()
    }

    /// Removes the request with sequence number `seq`.
    pub fn accept(&mut self, seq: u64) -> Result<Request> {
        let pos = self
            .requests
            .iter()
            .position(|r| r.seq == seq)
            .ok_or_else(|| Error::Consistency(format!("no outstanding request #{seq}")))?;
        Ok(self.requests.remove(pos))
    }

    pub fn outstanding(&self, job: Job) -> usize {
        self.requests.iter().filter(|r| r.job == job).count()
    }

    pub fn is_empty(&self) -> bool {
        self.requests.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_request_per_customer() {
        let mut m = Mediator::new();
        m.post(1, Job::CountIn, 0.0).unwrap();
        assert!(m.post(1, Job::Help, 0.5).is_err());
    }

    #[test]
    fn candidates_filtered_and_ordered() {
        let mut m = Mediator::new();
        m.post(1, Job::CountOut, 0.0).unwrap();
        m.post(2, Job::Help, 0.1).unwrap();
        m.post(3, Job::CountIn, 0.2).unwrap();
        let c: Vec<usize> = m
            .candidates(&[Job::CountIn, Job::CountOut])
            .iter()
            .map(|r| r.customer)
            .collect();
        assert_eq!(c, vec![1, 3]);
        let taken = m.accept(0).unwrap();
        assert_eq!(taken.customer, 1);
        assert_eq!(m.outstanding(Job::CountOut), 0);
        assert!(m.accept(0).is_err());
    }
}
