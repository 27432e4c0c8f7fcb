//! Process-flow discrete-event engine.
//!
//! Customers flow arrival → entry queue (job 1) → fitting room → optional
//! help queue (job 2) → return queue (job 3) → departure. All state changes
//! happen at events popped from a single [`EventCalendar`]. Arrivals stop at
//! the horizon and the system drains, so every waiting time is observed.

use std::collections::VecDeque;

use crate::arrivals::{sample_arrivals, ArrivalProfile};
use crate::calendar::{Calendar, Priority};
use crate::customer::{CustomerTraits, Timeline};
use crate::error::{Error, Result};
use crate::model::{Job, RunOutput, Scenario, ServiceModel, StaffUsage};
use crate::rng::{RngStream, StreamPurpose, StreamSet};
use crate::trace::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival,
    ServiceEnd(Job),
    DwellEnd,
    HelpRequest,
    Departure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesEvent {
    pub kind: EventKind,
    pub customer: usize,
    pub staff: Option<usize>,
}

pub type EventCalendar = Calendar<DesEvent>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueEntry {
    pub customer: usize,
    pub joined: f64,
    seq: u64,
}

/// The three customer queues plus room occupancy.
#[derive(Debug, Clone)]
pub struct QueueState {
    pub entry: VecDeque<QueueEntry>,
    pub help: VecDeque<QueueEntry>,
    pub ret: VecDeque<QueueEntry>,
    /// Customers done with count-in who found every room taken.
    pub room_waiting: VecDeque<usize>,
    pub room_occupancy: u32,
    pub rooms: u32,
}

impl QueueState {
    fn new(rooms: u32) -> Self {
        QueueState {
            entry: VecDeque::new(),
            help: VecDeque::new(),
            ret: VecDeque::new(),
            room_waiting: VecDeque::new(),
            room_occupancy: 0,
            rooms,
        }
    }

    pub fn queue(&self, job: Job) -> &VecDeque<QueueEntry> {
        match job {
            Job::CountIn => &self.entry,
            Job::Help => &self.help,
            Job::CountOut => &self.ret,
        }
    }

    fn queue_mut(&mut self, job: Job) -> &mut VecDeque<QueueEntry> {
        match job {
            Job::CountIn => &mut self.entry,
            Job::Help => &mut self.help,
            Job::CountOut => &mut self.ret,
        }
    }

    pub fn lengths(&self) -> [usize; 3] {
        [self.entry.len(), self.help.len(), self.ret.len()]
    }

    pub fn is_empty(&self) -> bool {
        self.entry.is_empty()
            && self.help.is_empty()
            && self.ret.is_empty()
            && self.room_waiting.is_empty()
            && self.room_occupancy == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaffStatus {
    Idle,
    Busy {
        job: Job,
        customer: usize,
        since: f64,
    },
}

#[derive(Debug, Clone)]
pub struct StaffMember {
    pub id: String,
    pub jobs: Vec<Job>,
    pub status: StaffStatus,
    pub busy_time: f64,
}

#[derive(Debug)]
struct CustomerSlot {
    traits: CustomerTraits,
    timeline: Timeline,
    departed: bool,
}

/// A DES run that can be advanced one event at a time.
#[derive(Debug)]
pub struct DesSimulation {
    service: ServiceModel,
    horizon: f64,
    arrivals: Vec<f64>,
    calendar: EventCalendar,
    queues: QueueState,
    staff: Vec<StaffMember>,
    customers: Vec<CustomerSlot>,
    services: RngStream,
    help_flags: RngStream,
    dwell: RngStream,
    now: f64,
    join_seq: u64,
    trace: Option<Vec<TraceRecord>>,
}

impl DesSimulation {
    /// Prepares a run over pre-sampled arrival times. Only the services,
    /// help-flag and dwell streams of `streams` are used.
    pub fn new(
        scenario: &Scenario,
        service: &ServiceModel,
        arrivals: Vec<f64>,
        horizon: f64,
        streams: &StreamSet,
    ) -> Result<Self> {
        scenario.validate()?;
        service.validate()?;
        if arrivals.windows(2).any(|w| w[1] < w[0])
            || arrivals.iter().any(|&t| !(0.0..horizon).contains(&t))
        {
            return Err(Error::validation(
                "arrival times must be sorted and lie in [0, horizon)",
            ));
        }
        let staff = scenario
            .staff_ids()
            .into_iter()
            .zip(scenario.jobs_by_staff())
            .map(|(id, jobs)| StaffMember {
                id,
                jobs,
                status: StaffStatus::Idle,
                busy_time: 0.0,
            })
            .collect();
        let mut calendar = EventCalendar::new();
        if let Some(&first) = arrivals.first() {
            calendar.schedule(
                first,
                Priority::Arrival,
                DesEvent {
                    kind: EventKind::Arrival,
                    customer: 0,
                    staff: None,
                },
            );
        }
        Ok(DesSimulation {
            service: service.clone(),
            horizon,
            customers: Vec::with_capacity(arrivals.len()),
            arrivals,
            calendar,
            queues: QueueState::new(service.rooms),
            staff,
            services: streams.stream(StreamPurpose::Services),
            help_flags: streams.stream(StreamPurpose::HelpFlags),
            dwell: streams.stream(StreamPurpose::Dwell),
            now: 0.0,
            join_seq: 0,
            trace: None,
        })
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn calendar(&self) -> &EventCalendar {
        &self.calendar
    }

    pub fn queues(&self) -> &QueueState {
        &self.queues
    }

    pub fn staff(&self) -> &[StaffMember] {
        &self.staff
    }

    pub fn trace(&self) -> Option<&[TraceRecord]> {
        self.trace.as_deref()
    }

    /// Consumes exactly one event and performs any service starts it
    /// enables. Returns the event, or `None` when the calendar is empty.
    pub fn step(&mut self) -> Result<Option<DesEvent>> {
        let Some((time, event)) = self.calendar.pop() else {
            return Ok(None);
        };
        if time < self.now {
            return Err(Error::Consistency(format!(
                "event at {time} popped after clock reached {}",
                self.now
            )));
        }
        if event.kind != EventKind::Arrival && event.customer >= self.customers.len() {
            return Err(Error::Consistency(format!(
                "event {:?} references unknown customer {}",
                event.kind, event.customer
            )));
        }
        self.now = time;
        match event.kind {
            EventKind::Arrival => self.on_arrival(event.customer)?,
            EventKind::ServiceEnd(job) => self.on_service_end(job, event)?,
            EventKind::HelpRequest => {
                self.customers[event.customer].timeline.help_request = Some(time);
                self.join(Job::Help, event.customer);
            }
            EventKind::DwellEnd => self.on_dwell_end(event.customer)?,
            EventKind::Departure => {
                let slot = &mut self.customers[event.customer];
                slot.timeline.departure = Some(time);
                slot.departed = true;
            }
        }
        self.record(event_name(event.kind), Some(event.customer), event.staff);
        self.dispatch();
        Ok(Some(event))
    }

    /// Runs to completion and returns the day's output.
    pub fn run(mut self) -> Result<RunOutput> {
        while self.step()?.is_some() {}
        self.finish()
    }

    /// Like [`DesSimulation::run`] but also returns the event trace.
    pub fn run_traced(mut self) -> Result<(RunOutput, Vec<TraceRecord>)> {
        if self.trace.is_none() {
            self.trace = Some(Vec::new());
        }
        while self.step()?.is_some() {}
        let trace = self.trace.take().unwrap_or_default();
        Ok((self.finish()?, trace))
    }

    fn finish(self) -> Result<RunOutput> {
        if !self.calendar.is_empty() {
            return Err(Error::Consistency(
                "run finished with pending events".into(),
            ));
        }
        if !self.queues.is_empty() {
            return Err(Error::Consistency(
                "run finished with customers in the system".into(),
            ));
        }
        if self.customers.len() != self.arrivals.len() {
            return Err(Error::Consistency(format!(
                "{} of {} arrivals were generated",
                self.customers.len(),
                self.arrivals.len()
            )));
        }
        let end_time = self.now.max(self.horizon);
        let staff = self
            .staff
            .into_iter()
            .map(|s| StaffUsage {
                utilisation: if end_time > 0.0 {
                    s.busy_time / end_time
                } else {
                    0.0
                },
                staff_id: s.id,
                jobs: s.jobs,
                busy_time: s.busy_time,
            })
            .collect();
        let customers = self
            .customers
            .into_iter()
            .enumerate()
            .map(|(id, slot)| {
                if !slot.departed {
                    return Err(Error::Consistency(format!("customer {id} never departed")));
                }
                slot.timeline.into_record(id, &slot.traits)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RunOutput {
            customers,
            staff,
            end_time,
        })
    }

    fn on_arrival(&mut self, index: usize) -> Result<()> {
        if index != self.customers.len() || index >= self.arrivals.len() {
            return Err(Error::Consistency(format!(
                "unexpected arrival index {index}"
            )));
        }
        let traits = CustomerTraits::draw(&self.service, &mut self.help_flags, &mut self.dwell);
        self.customers.push(CustomerSlot {
            traits,
            timeline: Timeline::new(self.now),
            departed: false,
        });
        self.join(Job::CountIn, index);
        if let Some(&next) = self.arrivals.get(index + 1) {
            self.calendar.schedule(
                next,
                Priority::Arrival,
                DesEvent {
                    kind: EventKind::Arrival,
                    customer: index + 1,
                    staff: None,
                },
            );
        }
        Ok(())
    }

    fn on_service_end(&mut self, job: Job, event: DesEvent) -> Result<()> {
        let staff_idx = event
            .staff
            .ok_or_else(|| Error::Consistency("service end without staff".into()))?;
        let member = self
            .staff
            .get_mut(staff_idx)
            .ok_or_else(|| Error::Consistency(format!("unknown staff index {staff_idx}")))?;
        match member.status {
            StaffStatus::Busy {
                job: j,
                customer,
                since,
            } if j == job && customer == event.customer => {
                member.busy_time += self.now - since;
                member.status = StaffStatus::Idle;
            }
            other => {
                return Err(Error::Consistency(format!(
                    "staff {} ended {job} for customer {} while {other:?}",
                    member.id, event.customer
                )))
            }
        }
        let c = event.customer;
        match job {
            Job::CountIn => {
                self.customers[c].timeline.job1_end = Some(self.now);
                if self.queues.room_occupancy < self.queues.rooms {
                    self.enter_room(c);
                } else {
                    self.queues.room_waiting.push_back(c);
                    self.record("room_wait", Some(c), None);
                }
            }
            Job::Help => {
                let slot = &mut self.customers[c];
                slot.timeline.help_end = Some(self.now);
                let at = self.now + slot.traits.dwell_after_help;
                self.schedule(at, EventKind::DwellEnd, c, None);
            }
            Job::CountOut => self.schedule(self.now, EventKind::Departure, c, None),
        }
        Ok(())
    }

    fn on_dwell_end(&mut self, c: usize) -> Result<()> {
        if self.queues.room_occupancy == 0 {
            return Err(Error::Consistency(format!(
                "customer {c} left a room while none was occupied"
            )));
        }
        self.queues.room_occupancy -= 1;
        if let Some(next) = self.queues.room_waiting.pop_front() {
            self.enter_room(next);
        }
        self.customers[c].timeline.return_join = Some(self.now);
        self.join(Job::CountOut, c);
        Ok(())
    }

    fn enter_room(&mut self, c: usize) {
        self.queues.room_occupancy += 1;
        let slot = &mut self.customers[c];
        slot.timeline.room_enter = Some(self.now);
        let traits = slot.traits;
        if traits.needs_help {
            self.schedule(
                self.now + traits.help_after,
                EventKind::HelpRequest,
                c,
                None,
            );
        } else {
            self.schedule(self.now + traits.dwell, EventKind::DwellEnd, c, None);
        }
        self.record("room_enter", Some(c), None);
    }

    fn join(&mut self, job: Job, customer: usize) {
        let entry = QueueEntry {
            customer,
            joined: self.now,
            seq: self.join_seq,
        };
        self.join_seq += 1;
        self.queues.queue_mut(job).push_back(entry);
    }

    fn schedule(&mut self, time: f64, kind: EventKind, customer: usize, staff: Option<usize>) {
        self.calendar.schedule(
            time,
            Priority::Completion,
            DesEvent {
                kind,
                customer,
                staff,
            },
        );
    }

    /// Idle staff, in index order, each take the longest-waiting customer
    /// across the queues of their assigned jobs.
    fn dispatch(&mut self) {
        for s in 0..self.staff.len() {
            if self.staff[s].status != StaffStatus::Idle {
                continue;
            }
            let next = self.staff[s]
                .jobs
                .iter()
                .filter_map(|&job| self.queues.queue(job).front().map(|e| (job, e.seq)))
                .min_by_key(|&(_, seq)| seq);
            if let Some((job, _)) = next {
                let entry = self
                    .queues
                    .queue_mut(job)
                    .pop_front()
                    .expect("front checked above");
                self.start_service(s, job, entry.customer);
            }
        }
    }

    fn start_service(&mut self, s: usize, job: Job, c: usize) {
        let duration = self
            .services
            .duration(self.service.distribution, self.service.mean_for(job));
        self.staff[s].status = StaffStatus::Busy {
            job,
            customer: c,
            since: self.now,
        };
        let timeline = &mut self.customers[c].timeline;
        match job {
            Job::CountIn => timeline.job1_start = Some(self.now),
            Job::Help => timeline.help_start = Some(self.now),
            Job::CountOut => timeline.job3_start = Some(self.now),
        }
        self.schedule(self.now + duration, EventKind::ServiceEnd(job), c, Some(s));
        let name = match job {
            Job::CountIn => "service_start:job1",
            Job::Help => "service_start:job2",
            Job::CountOut => "service_start:job3",
        };
        self.record(name, Some(c), Some(s));
    }

    fn record(&mut self, event: &str, customer: Option<usize>, staff: Option<usize>) {
        if let Some(trace) = self.trace.as_mut() {
            trace.push(TraceRecord {
                time: self.now,
                event: event.to_string(),
                customer_id: customer,
                staff_id: staff.map(|s| self.staff[s].id.clone()),
                queue_lengths: self.queues.lengths(),
                agent_state: None,
            });
        }
    }

    #[cfg(test)]
    fn inject(&mut self, time: f64, event: DesEvent) {
        self.calendar.schedule(time, Priority::Completion, event);
    }
}

fn event_name(kind: EventKind) -> &'static str {
    match kind {
        EventKind::Arrival => "arrival",
        EventKind::ServiceEnd(Job::CountIn) => "service_end:job1",
        EventKind::ServiceEnd(Job::Help) => "service_end:job2",
        EventKind::ServiceEnd(Job::CountOut) => "service_end:job3",
        EventKind::DwellEnd => "dwell_end",
        EventKind::HelpRequest => "help_request",
        EventKind::Departure => "departure",
    }
}

/// Simulates one business day with the discrete-event engine.
pub fn run_des(
    scenario: &Scenario,
    service: &ServiceModel,
    profile: &ArrivalProfile,
    streams: &StreamSet,
) -> Result<RunOutput> {
    let arrivals = sample_arrivals(profile, &mut streams.stream(StreamPurpose::Arrivals))?;
    DesSimulation::new(scenario, service, arrivals, profile.horizon(), streams)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{QueueDiscipline, ServiceDistribution};

    fn fixed_service(
        job1: f64,
        dwell: f64,
        job3: f64,
        help_probability: f64,
        rooms: u32,
    ) -> ServiceModel {
        ServiceModel {
            distribution: ServiceDistribution::Deterministic,
            job1_mean: job1,
            job2_mean: 1.0,
            job3_mean: job3,
            dwell_mean: dwell,
            help_probability,
            rooms,
        }
    }

    fn one_staff() -> Scenario {
        Scenario::single_staff("1", QueueDiscipline::StrictFifo)
    }

    #[test]
    fn scripted_fixture() {
        // Traced by hand: C1 counted in 0-1, room 1-3, counted out 3-4.
        // C2 waits 0.5 for count-in (1-2), room 2-4, counted out 4-5.
        let sim = DesSimulation::new(
            &one_staff(),
            &fixed_service(1.0, 2.0, 1.0, 0.0, 2),
            vec![0.0, 0.5],
            480.0,
            &StreamSet::new(1, 0),
        )
        .unwrap();
        let out = sim.run().unwrap();
        let c = &out.customers;
        assert_eq!((c[0].entry_wait, c[0].return_wait), (0.0, 0.0));
        assert_eq!((c[1].entry_wait, c[1].return_wait), (0.5, 0.0));
        assert_eq!(c[0].time_in_system, 4.0);
        assert_eq!(c[1].time_in_system, 4.5);
        assert_eq!(out.staff[0].busy_time, 4.0);
        assert_eq!(out.end_time, 480.0);
    }

    #[test]
    fn room_capacity_forces_room_wait() {
        let out = DesSimulation::new(
            &one_staff(),
            &fixed_service(1.0, 5.0, 1.0, 0.0, 1),
            vec![0.0, 0.1],
            480.0,
            &StreamSet::new(1, 0),
        )
        .unwrap()
        .run()
        .unwrap();
        let c2 = &out.customers[1];
        assert_eq!(c2.room_wait, 4.0);
        assert!((c2.entry_wait - 0.9).abs() < 1e-12);
        assert_eq!(c2.return_wait, 0.0);
        // room waits are excluded from the total
        assert!((c2.total_wait - 0.9).abs() < 1e-12);
        assert_eq!(c2.departure, 12.0);
    }

    #[test]
    fn arrival_with_idle_staff_starts_job1_immediately() {
        let mut sim = DesSimulation::new(
            &one_staff(),
            &fixed_service(1.0, 2.0, 1.0, 0.0, 2),
            vec![3.0],
            480.0,
            &StreamSet::new(1, 0),
        )
        .unwrap();
        let ev = sim.step().unwrap().unwrap();
        assert_eq!(ev.kind, EventKind::Arrival);
        assert_eq!(sim.now(), 3.0);
        assert_eq!(
            sim.staff()[0].status,
            StaffStatus::Busy {
                job: Job::CountIn,
                customer: 0,
                since: 3.0
            }
        );
        assert!(sim.queues().entry.is_empty());
        assert_eq!(sim.calendar().peek_time(), Some(4.0));
    }

    #[test]
    fn count_in_end_enters_room_and_schedules_dwell_end() {
        let mut sim = DesSimulation::new(
            &one_staff(),
            &fixed_service(1.0, 2.0, 1.0, 0.0, 2),
            vec![0.0],
            480.0,
            &StreamSet::new(1, 0),
        )
        .unwrap();
        sim.step().unwrap();
        let ev = sim.step().unwrap().unwrap();
        assert_eq!(ev.kind, EventKind::ServiceEnd(Job::CountIn));
        assert_eq!(sim.queues().room_occupancy, 1);
        assert_eq!(sim.calendar().peek_time(), Some(3.0));
        let ev = sim.step().unwrap().unwrap();
        assert_eq!(ev.kind, EventKind::DwellEnd);
    }

    #[test]
    fn help_request_with_busy_helper_joins_help_queue() {
        // Everyone needs help. The second arrival keeps the single staff
        // member busy counting in when the first help request fires.
        let service = ServiceModel {
            job1_mean: 50.0,
            ..fixed_service(0.1, 2.0, 1.0, 1.0, 2)
        };
        let mut sim = DesSimulation::new(
            &one_staff(),
            &service,
            vec![0.0, 0.0001],
            480.0,
            &StreamSet::new(3, 0),
        )
        .unwrap();
        loop {
            let before = sim.now();
            let ev = sim.step().unwrap().unwrap();
            if ev.kind == EventKind::HelpRequest {
                assert!(sim.now() >= before);
                assert_eq!(sim.queues().help.len(), 1);
                assert_eq!(sim.queues().help[0].joined, sim.now());
                assert!(matches!(
                    sim.staff()[0].status,
                    StaffStatus::Busy {
                        job: Job::CountIn,
                        ..
                    }
                ));
                break;
            }
        }
    }

    #[test]
    fn unknown_customer_is_consistency_fault() {
        let mut sim = DesSimulation::new(
            &one_staff(),
            &fixed_service(1.0, 2.0, 1.0, 0.0, 2),
            vec![],
            480.0,
            &StreamSet::new(1, 0),
        )
        .unwrap();
        sim.inject(
            1.0,
            DesEvent {
                kind: EventKind::DwellEnd,
                customer: 7,
                staff: None,
            },
        );
        assert!(matches!(sim.step(), Err(Error::Consistency(_))));
    }

    #[test]
    fn zero_arrivals_give_empty_output() {
        let profile = ArrivalProfile::constant(0.0, 480.0).unwrap();
        let out = run_des(
            &one_staff(),
            &ServiceModel::default(),
            &profile,
            &StreamSet::new(1, 0),
        )
        .unwrap();
        assert!(out.customers.is_empty());
        assert!(out.staff.iter().all(|s| s.utilisation == 0.0));
    }
}
