//! Agent-based engine.
//!
//! Customers, staff and the fitting-room pool are agents with their own
//! state charts ([`agents`]). Customers post requests to a [`Mediator`];
//! idle staff agents pick requests for the jobs they are assigned, either
//! oldest-first or uniformly at random depending on the scenario's
//! [`QueueDiscipline`]. Time advances through a shared calendar of agent
//! timers, so both engines run in exact continuous time.

pub mod agents;
pub mod mediator;

pub use agents::{
    agent_transition, CustomerAgent, CustomerMessage, CustomerState, CustomerTrigger,
    FittingRoomAgent, RoomMessage, RoomState, RoomTrigger, StaffAgent, StaffMessage, StaffState,
    StaffTrigger, StateChart,
};
pub use mediator::{Mediator, Request};

use crate::arrivals::{sample_arrivals, ArrivalProfile};
use crate::calendar::{Calendar, Priority};
use crate::customer::CustomerTraits;
use crate::error::{Error, Result};
use crate::model::{Job, QueueDiscipline, RunOutput, Scenario, ServiceModel, StaffUsage};
use crate::rng::{RngStream, StreamPurpose, StreamSet};
use crate::trace::TraceRecord;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Timer {
    Arrival(usize),
    Customer(usize, CustomerTrigger),
    StaffDone(usize),
}

/// Output of a run together with the per-agent state histories.
#[derive(Debug, Clone)]
pub struct AbsRun {
    pub output: RunOutput,
    pub trace: Vec<TraceRecord>,
    pub customer_paths: Vec<Vec<(f64, CustomerState)>>,
    pub staff_paths: Vec<Vec<(f64, StaffState)>>,
}

#[derive(Debug)]
pub struct AbsSimulation {
    service: ServiceModel,
    discipline: QueueDiscipline,
    horizon: f64,
    arrivals: Vec<f64>,
    calendar: Calendar<Timer>,
    customers: Vec<CustomerAgent>,
    staff: Vec<StaffAgent>,
    staff_paths: Vec<Vec<(f64, StaffState)>>,
    room: FittingRoomAgent,
    mediator: Mediator,
    services: RngStream,
    help_flags: RngStream,
    dwell: RngStream,
    choice: RngStream,
    now: f64,
    departed: usize,
    trace: Option<Vec<TraceRecord>>,
}

impl AbsSimulation {
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
        let staff: Vec<StaffAgent> = scenario
            .staff_ids()
            .into_iter()
            .zip(scenario.jobs_by_staff())
            .map(|(id, jobs)| StaffAgent::new(id, jobs))
            .collect();
        let mut calendar = Calendar::new();
        if let Some(&first) = arrivals.first() {
            calendar.schedule(first, Priority::Arrival, Timer::Arrival(0));
        }
        Ok(AbsSimulation {
            service: service.clone(),
            discipline: scenario.abs_queue_discipline,
            horizon,
            customers: Vec::with_capacity(arrivals.len()),
            arrivals,
            calendar,
            staff_paths: vec![vec![(0.0, StaffState::Idle)]; staff.len()],
            staff,
            room: FittingRoomAgent::new(service.rooms),
            mediator: Mediator::new(),
            services: streams.stream(StreamPurpose::Services),
            help_flags: streams.stream(StreamPurpose::HelpFlags),
            dwell: streams.stream(StreamPurpose::Dwell),
            choice: streams.stream(StreamPurpose::AbsChoice),
            now: 0.0,
            departed: 0,
            trace: None,
        })
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn run(self) -> Result<RunOutput> {
        self.run_detailed().map(|r| r.output)
    }

    pub fn run_detailed(mut self) -> Result<AbsRun> {
        while let Some((time, timer)) = self.calendar.pop() {
            if time < self.now {
                return Err(Error::Consistency(format!(
                    "timer at {time} fired after clock reached {}",
                    self.now
                )));
            }
            self.now = time;
            self.fire(timer)?;
            self.match_requests()?;
        }
        self.finish()
    }

    fn fire(&mut self, timer: Timer) -> Result<()> {
        match timer {
            Timer::Arrival(k) => {
                if k != self.customers.len() {
                    return Err(Error::Consistency(format!("unexpected arrival index {k}")));
                }
                let traits =
                    CustomerTraits::draw(&self.service, &mut self.help_flags, &mut self.dwell);
                self.customers
                    .push(CustomerAgent::from_traits(k, self.now, traits));
                self.deliver(k, CustomerTrigger::EnterArea)?;
                if let Some(&next) = self.arrivals.get(k + 1) {
                    self.calendar
                        .schedule(next, Priority::Arrival, Timer::Arrival(k + 1));
                }
            }
            Timer::Customer(id, trigger) => self.deliver(id, trigger)?,
            Timer::StaffDone(s) => {
                for msg in self.staff[s].transition(StaffTrigger::Finish, self.now)? {
                    if let StaffMessage::Completed { job, customer } = msg {
                        self.staff_paths[s].push((self.now, StaffState::Idle));
                        self.record_staff(s, job, customer, "finish");
                        let done = match job {
                            Job::CountIn => CustomerTrigger::CountInDone,
                            Job::Help => CustomerTrigger::HelpDone,
                            Job::CountOut => CustomerTrigger::CountOutDone,
                        };
                        self.deliver(customer, done)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Hands `trigger` to customer `id` and acts on the emitted messages in
    /// order, depth first.
    fn deliver(&mut self, id: usize, trigger: CustomerTrigger) -> Result<()> {
        let agent = self
            .customers
            .get_mut(id)
            .ok_or_else(|| Error::Consistency(format!("unknown customer {id}")))?;
        let messages = agent.transition(trigger, self.now)?;
        let state = agent.state();
        self.record(format!("{trigger:?}"), Some(id), None, format!("{state:?}"));
        for msg in messages {
            match msg {
                CustomerMessage::PostRequest(job) => self.mediator.post(id, job, self.now)?,
                CustomerMessage::RequestRoom => {
                    let grants = self.room.transition(RoomTrigger::Request(id), self.now)?;
                    self.grant_rooms(grants)?;
                }
                CustomerMessage::ReleaseRoom => {
                    let grants = self.room.transition(RoomTrigger::Release, self.now)?;
                    self.grant_rooms(grants)?;
                }
                CustomerMessage::StartTimer { after, trigger } => {
                    self.calendar.schedule(
                        self.now + after,
                        Priority::Completion,
                        Timer::Customer(id, trigger),
                    );
                }
                CustomerMessage::Departed => self.departed += 1,
            }
        }
        Ok(())
    }

    fn grant_rooms(&mut self, grants: Vec<RoomMessage>) -> Result<()> {
        for RoomMessage::Grant(c) in grants {
            self.deliver(c, CustomerTrigger::RoomGranted)?;
        }
        Ok(())
    }

    /// Each idle staff agent, in index order, accepts at most one request.
    fn match_requests(&mut self) -> Result<()> {
        for s in 0..self.staff.len() {
            if self.staff[s].state() != StaffState::Idle {
                continue;
            }
            let candidates = self.mediator.candidates(&self.staff[s].jobs);
            let pick = match (self.discipline, candidates.len()) {
                (_, 0) => continue,
                (QueueDiscipline::StrictFifo, _) | (_, 1) => candidates[0],
                (QueueDiscipline::RandomPick, n) => candidates[self.choice.index(n)],
            };
            let request = self.mediator.accept(pick.seq)?;
            let duration = self.services.duration(
                self.service.distribution,
                self.service.mean_for(request.job),
            );
            let trigger = StaffTrigger::Accept {
                job: request.job,
                customer: request.customer,
                duration,
            };
            for msg in self.staff[s].transition(trigger, self.now)? {
                if let StaffMessage::StartTimer { after } = msg {
                    self.calendar.schedule(
                        self.now + after,
                        Priority::Completion,
                        Timer::StaffDone(s),
                    );
                }
            }
            let state = self.staff[s].state();
            self.staff_paths[s].push((self.now, state));
            self.record_staff(s, request.job, request.customer, "accept");
            let accepted = match request.job {
                Job::CountIn => CustomerTrigger::EntryAccepted,
                Job::Help => CustomerTrigger::HelpAccepted,
                Job::CountOut => CustomerTrigger::ReturnAccepted,
            };
            self.deliver(request.customer, accepted)?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<AbsRun> {
        if self.departed != self.arrivals.len() || self.customers.len() != self.arrivals.len() {
            return Err(Error::Consistency(format!(
                "{} of {} customers departed",
                self.departed,
                self.arrivals.len()
            )));
        }
        if !self.mediator.is_empty() || self.room.occupied() != 0 || self.room.waiting() != 0 {
            return Err(Error::Consistency(
                "run finished with customers in the system".into(),
            ));
        }
        if let Some(s) = self.staff.iter().find(|s| s.state() != StaffState::Idle) {
            return Err(Error::Consistency(format!(
                "staff {} still busy at end",
                s.id
            )));
        }
        let end_time = self.now.max(self.horizon);
        let customer_paths = self.customers.iter().map(|c| c.path().to_vec()).collect();
        let customers = self
            .customers
            .into_iter()
            .map(|c| c.timeline.into_record(c.id, &c.traits))
            .collect::<Result<Vec<_>>>()?;
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
        Ok(AbsRun {
            output: RunOutput {
                customers,
                staff,
                end_time,
            },
            trace: self.trace.take().unwrap_or_default(),
            customer_paths,
            staff_paths: self.staff_paths,
        })
    }

    fn queue_lengths(&self) -> [usize; 3] {
        [
            self.mediator.outstanding(Job::CountIn),
            self.mediator.outstanding(Job::Help),
            self.mediator.outstanding(Job::CountOut),
        ]
    }

    fn record(
        &mut self,
        event: String,
        customer: Option<usize>,
        staff: Option<usize>,
        state: String,
    ) {
        if self.trace.is_none() {
            return;
        }
        let record = TraceRecord {
            time: self.now,
            event,
            customer_id: customer,
            staff_id: staff.map(|s| self.staff[s].id.clone()),
            queue_lengths: self.queue_lengths(),
            agent_state: Some(state),
        };
        if let Some(trace) = self.trace.as_mut() {
            trace.push(record);
        }
    }

    fn record_staff(&mut self, s: usize, job: Job, customer: usize, what: &str) {
        if self.trace.is_some() {
            let state = format!("{:?}", self.staff[s].state());
            self.record(format!("{what}:{job}"), Some(customer), Some(s), state);
        }
    }
}

/// Simulates one business day with the agent-based engine.
pub fn run_abs(
    scenario: &Scenario,
    service: &ServiceModel,
    profile: &ArrivalProfile,
    streams: &StreamSet,
) -> Result<RunOutput> {
    let arrivals = sample_arrivals(profile, &mut streams.stream(StreamPurpose::Arrivals))?;
    AbsSimulation::new(scenario, service, arrivals, profile.horizon(), streams)?.run()
}
