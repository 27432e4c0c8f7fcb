//! Future-event list shared by both engines.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tie-break class for events at the same timestamp. Completions run before
/// arrivals so resources are freed before new demand shows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Priority {
    Completion = 0,
    Arrival = 1,
}

#[derive(Debug)]
struct Entry<T> {
    time: f64,
    priority: Priority,
    seq: u64,
    payload: T,
}

impl<T> Entry<T> {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.priority.cmp(&other.priority))
            .then(self.seq.cmp(&other.seq))
    }
}

impl<T> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<T> Eq for Entry<T> {}

impl<T> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Entry<T> {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Pending events ordered by `(time, priority, insertion sequence)`.
#[derive(Debug)]
pub struct Calendar<T> {
    heap: BinaryHeap<Entry<T>>,
    next_seq: u64,
}

impl<T> Default for Calendar<T> {
    fn default() -> Self {
        Calendar {
            heap: BinaryHeap::new(),
            next_seq: 0,
        }
    }
}

impl<T> Calendar<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, priority: Priority, payload: T) -> u64 {
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Entry {
            time,
            priority,
            seq,
            payload,
        });
        seq
    }

    /// Removes the earliest event, returning `(time, payload)`.
    pub fn pop(&mut self) -> Option<(f64, T)> {
        self.heap.pop().map(|e| (e.time, e.payload))
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_by_time_then_priority_then_insertion() {
        let mut cal = Calendar::new();
        cal.schedule(2.0, Priority::Completion, "late");
        cal.schedule(1.0, Priority::Arrival, "arrival");
        cal.schedule(1.0, Priority::Completion, "first-completion");
        cal.schedule(1.0, Priority::Completion, "second-completion");
        let order: Vec<_> = std::iter::from_fn(|| cal.pop().map(|(_, p)| p)).collect();
        assert_eq!(
            order,
            vec!["first-completion", "second-completion", "arrival", "late"]
        );
    }
}
