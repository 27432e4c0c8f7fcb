//! Customer, staff and fitting-room state charts.

use std::collections::VecDeque;
use std::fmt;

use crate::customer::{CustomerTraits, Timeline};
use crate::error::{Error, Result};
use crate::model::Job;

/// An agent driven by discrete triggers. Each accepted trigger takes
/// exactly one edge of the chart and may emit messages for the scheduler.
pub trait StateChart {
    type State: Copy + fmt::Debug;
    type Trigger: Copy + fmt::Debug;
    type Message;

    fn state(&self) -> Self::State;

    fn transition(&mut self, trigger: Self::Trigger, now: f64) -> Result<Vec<Self::Message>>;
}

/// Applies `trigger` to `agent` and reports the state reached together with
/// the emitted messages.
pub fn agent_transition<A: StateChart>(
    agent: &mut A,
    trigger: A::Trigger,
    now: f64,
) -> Result<(A::State, Vec<A::Message>)> {
    let messages = agent.transition(trigger, now)?;
    Ok((agent.state(), messages))
}

fn violation(agent: String, state: impl fmt::Debug, trigger: impl fmt::Debug) -> Error {
    Error::StateChart {
        agent,
        state: format!("{state:?}"),
        trigger: format!("{trigger:?}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CustomerState {
    Arrived,
    WaitingEntry,
    BeingCountedIn,
    WaitingRoom,
    TryingOn,
    WaitingHelp,
    ReceivingHelp,
    WaitingReturn,
    BeingCountedOut,
    Departed,
}

impl CustomerState {
    /// The customer chart's edge set.
    pub const EDGES: [(CustomerState, CustomerState); 10] = [
        (CustomerState::Arrived, CustomerState::WaitingEntry),
        (CustomerState::WaitingEntry, CustomerState::BeingCountedIn),
        (CustomerState::BeingCountedIn, CustomerState::WaitingRoom),
        (CustomerState::WaitingRoom, CustomerState::TryingOn),
        (CustomerState::TryingOn, CustomerState::WaitingHelp),
        (CustomerState::WaitingHelp, CustomerState::ReceivingHelp),
        (CustomerState::ReceivingHelp, CustomerState::TryingOn),
        (CustomerState::TryingOn, CustomerState::WaitingReturn),
        (CustomerState::WaitingReturn, CustomerState::BeingCountedOut),
        (CustomerState::BeingCountedOut, CustomerState::Departed),
    ];

    pub fn is_edge(from: CustomerState, to: CustomerState) -> bool {
        Self::EDGES.contains(&(from, to))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CustomerTrigger {
    EnterArea,
    EntryAccepted,
    CountInDone,
    RoomGranted,
    /// The help-request point of the dwell has been reached.
    HelpDue,
    HelpAccepted,
    HelpDone,
    DwellDone,
    ReturnAccepted,
    CountOutDone,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CustomerMessage {
    PostRequest(Job),
    RequestRoom,
    ReleaseRoom,
    StartTimer {
        after: f64,
        trigger: CustomerTrigger,
    },
    Departed,
}

#[derive(Debug, Clone)]
pub struct CustomerAgent {
    pub id: usize,
    state: CustomerState,
    pub(crate) traits: CustomerTraits,
    helped: bool,
    pub(crate) timeline: Timeline,
    path: Vec<(f64, CustomerState)>,
}

impl CustomerAgent {
    /// A customer who has just arrived. `help_after` is the dwell elapsed
    /// before asking for help and is ignored when `needs_help` is false.
    pub fn new(id: usize, arrival: f64, dwell: f64, needs_help: bool, help_after: f64) -> Self {
        let help_after = if needs_help {
            help_after.clamp(0.0, dwell)
        } else {
            dwell
        };
        Self::from_traits(
            id,
            arrival,
            CustomerTraits {
                dwell,
                needs_help,
                help_after,
                dwell_after_help: dwell - help_after,
            },
        )
    }

    pub(crate) fn from_traits(id: usize, arrival: f64, traits: CustomerTraits) -> Self {
        CustomerAgent {
            id,
            state: CustomerState::Arrived,
            traits,
            helped: false,
            timeline: Timeline::new(arrival),
            path: vec![(arrival, CustomerState::Arrived)],
        }
    }

    pub fn needs_help(&self) -> bool {
        self.traits.needs_help
    }

    /// Every state visited with its entry time.
    pub fn path(&self) -> &[(f64, CustomerState)] {
        &self.path
    }

    fn enter_room(&mut self) -> CustomerMessage {
        if self.traits.needs_help && !self.helped {
            CustomerMessage::StartTimer {
                after: self.traits.help_after,
                trigger: CustomerTrigger::HelpDue,
            }
        } else {
            CustomerMessage::StartTimer {
                after: self.traits.dwell,
                trigger: CustomerTrigger::DwellDone,
            }
        }
    }
}

impl StateChart for CustomerAgent {
    type State = CustomerState;
    type Trigger = CustomerTrigger;
    type Message = CustomerMessage;

    fn state(&self) -> CustomerState {
        self.state
    }

    fn transition(&mut self, trigger: CustomerTrigger, now: f64) -> Result<Vec<CustomerMessage>> {
        use CustomerState as S;
        use CustomerTrigger as T;
        let t = &mut self.timeline;
        let (next, messages) = match (self.state, trigger) {
            (S::Arrived, T::EnterArea) => (
                S::WaitingEntry,
                vec![CustomerMessage::PostRequest(Job::CountIn)],
            ),
            (S::WaitingEntry, T::EntryAccepted) => {
                t.job1_start = Some(now);
                (S::BeingCountedIn, vec![])
            }
            (S::BeingCountedIn, T::CountInDone) => {
                t.job1_end = Some(now);
                (S::WaitingRoom, vec![CustomerMessage::RequestRoom])
            }
            (S::WaitingRoom, T::RoomGranted) => {
                t.room_enter = Some(now);
                (S::TryingOn, vec![self.enter_room()])
            }
            (S::TryingOn, T::HelpDue) if self.traits.needs_help && !self.helped => {
                t.help_request = Some(now);
                (
                    S::WaitingHelp,
                    vec![CustomerMessage::PostRequest(Job::Help)],
                )
            }
            (S::WaitingHelp, T::HelpAccepted) => {
                t.help_start = Some(now);
                (S::ReceivingHelp, vec![])
            }
            (S::ReceivingHelp, T::HelpDone) => {
                t.help_end = Some(now);
                self.helped = true;
                (
                    S::TryingOn,
                    vec![CustomerMessage::StartTimer {
                        after: self.traits.dwell_after_help,
                        trigger: T::DwellDone,
                    }],
                )
            }
            (S::TryingOn, T::DwellDone) if !self.traits.needs_help || self.helped => {
                t.return_join = Some(now);
                (
                    S::WaitingReturn,
                    vec![
                        CustomerMessage::ReleaseRoom,
                        CustomerMessage::PostRequest(Job::CountOut),
                    ],
                )
            }
            (S::WaitingReturn, T::ReturnAccepted) => {
                t.job3_start = Some(now);
                (S::BeingCountedOut, vec![])
            }
            (S::BeingCountedOut, T::CountOutDone) => {
                t.departure = Some(now);
                (S::Departed, vec![CustomerMessage::Departed])
            }
            (state, trigger) => {
                return Err(violation(format!("customer {}", self.id), state, trigger))
            }
        };
        debug_assert!(CustomerState::is_edge(self.state, next));
        self.state = next;
        self.path.push((now, next));
        Ok(messages)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StaffState {
    Idle,
    CountingIn,
    Helping,
    CountingOut,
}

impl StaffState {
    pub fn is_edge(from: StaffState, to: StaffState) -> bool {
        matches!(
            (from, to),
            (
                StaffState::Idle,
                StaffState::CountingIn | StaffState::Helping | StaffState::CountingOut
            ) | (
                StaffState::CountingIn | StaffState::Helping | StaffState::CountingOut,
                StaffState::Idle
            )
        )
    }

    fn for_job(job: Job) -> StaffState {
        match job {
            Job::CountIn => StaffState::CountingIn,
            Job::Help => StaffState::Helping,
            Job::CountOut => StaffState::CountingOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaffTrigger {
    /// Take on a request; `duration` is the already-drawn service time.
    Accept {
        job: Job,
        customer: usize,
        duration: f64,
    },
    Finish,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaffMessage {
    StartTimer { after: f64 },
    Completed { job: Job, customer: usize },
}

#[derive(Debug, Clone)]
pub struct StaffAgent {
    pub id: String,
    pub jobs: Vec<Job>,
    state: StaffState,
    current: Option<(Job, usize)>,
    busy_since: f64,
    pub busy_time: f64,
}

impl StaffAgent {
    pub fn new(id: impl Into<String>, jobs: Vec<Job>) -> Self {
        StaffAgent {
            id: id.into(),
            jobs,
            state: StaffState::Idle,
            current: None,
            busy_since: 0.0,
            busy_time: 0.0,
        }
    }

    pub fn current(&self) -> Option<(Job, usize)> {
        self.current
    }
}

impl StateChart for StaffAgent {
    type State = StaffState;
    type Trigger = StaffTrigger;
    type Message = StaffMessage;

    fn state(&self) -> StaffState {
        self.state
    }

    fn transition(&mut self, trigger: StaffTrigger, now: f64) -> Result<Vec<StaffMessage>> {
        match (self.state, trigger) {
            (
                StaffState::Idle,
                StaffTrigger::Accept {
                    job,
                    customer,
                    duration,
                },
            ) if self.jobs.contains(&job) => {
                self.state = StaffState::for_job(job);
                self.current = Some((job, customer));
                self.busy_since = now;
                Ok(vec![StaffMessage::StartTimer { after: duration }])
            }
            (
                StaffState::CountingIn | StaffState::Helping | StaffState::CountingOut,
                StaffTrigger::Finish,
            ) => {
                let (job, customer) = self.current.take().expect("busy staff has a customer");
                self.busy_time += now - self.busy_since;
                self.state = StaffState::Idle;
                Ok(vec![StaffMessage::Completed { job, customer }])
            }
            (state, trigger) => Err(violation(format!("staff {}", self.id), state, trigger)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomState {
    Available,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomTrigger {
    Request(usize),
    Release,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoomMessage {
    Grant(usize),
}

/// The pool of fitting rooms, modelled as one capacity-limited agent.
#[derive(Debug, Clone)]
pub struct FittingRoomAgent {
    pub capacity: u32,
    occupied: u32,
    waiting: VecDeque<usize>,
}

impl FittingRoomAgent {
    pub fn new(capacity: u32) -> Self {
        FittingRoomAgent {
            capacity,
            occupied: 0,
            waiting: VecDeque::new(),
        }
    }

    pub fn occupied(&self) -> u32 {
        self.occupied
    }

    pub fn waiting(&self) -> usize {
        self.waiting.len()
    }
}

impl StateChart for FittingRoomAgent {
    type State = RoomState;
    type Trigger = RoomTrigger;
    type Message = RoomMessage;

    fn state(&self) -> RoomState {
        if self.occupied < self.capacity {
            RoomState::Available
        } else {
            RoomState::Full
        }
    }

    fn transition(&mut self, trigger: RoomTrigger, _now: f64) -> Result<Vec<RoomMessage>> {
        match trigger {
            RoomTrigger::Request(customer) => {
                if self.occupied < self.capacity {
                    self.occupied += 1;
                    Ok(vec![RoomMessage::Grant(customer)])
                } else {
                    self.waiting.push_back(customer);
                    Ok(vec![])
                }
            }
            RoomTrigger::Release if self.occupied > 0 => {
                self.occupied -= 1;
                Ok(self
                    .waiting
                    .pop_front()
                    .map(|next| {
                        self.occupied += 1;
                        vec![RoomMessage::Grant(next)]
                    })
                    .unwrap_or_default())
            }
            RoomTrigger::Release => Err(violation("fitting room".into(), self.state(), trigger)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trying_on_with_help_needed_posts_help_request() {
        let mut c = CustomerAgent::new(0, 0.0, 4.0, true, 1.0);
        for trig in [
            CustomerTrigger::EnterArea,
            CustomerTrigger::EntryAccepted,
            CustomerTrigger::CountInDone,
            CustomerTrigger::RoomGranted,
        ] {
            c.transition(trig, 0.0).unwrap();
        }
        assert_eq!(c.state(), CustomerState::TryingOn);
        let (state, msgs) = agent_transition(&mut c, CustomerTrigger::HelpDue, 1.0).unwrap();
        assert_eq!(state, CustomerState::WaitingHelp);
        assert_eq!(msgs, vec![CustomerMessage::PostRequest(Job::Help)]);
    }

    #[test]
    fn room_grant_schedules_help_point_then_remaining_dwell() {
        let mut c = CustomerAgent::new(0, 0.0, 4.0, true, 1.5);
        c.transition(CustomerTrigger::EnterArea, 0.0).unwrap();
        c.transition(CustomerTrigger::EntryAccepted, 0.0).unwrap();
        c.transition(CustomerTrigger::CountInDone, 1.0).unwrap();
        let msgs = c.transition(CustomerTrigger::RoomGranted, 1.0).unwrap();
        assert_eq!(
            msgs,
            vec![CustomerMessage::StartTimer {
                after: 1.5,
                trigger: CustomerTrigger::HelpDue
            }]
        );
        c.transition(CustomerTrigger::HelpDue, 2.5).unwrap();
        c.transition(CustomerTrigger::HelpAccepted, 3.0).unwrap();
        let msgs = c.transition(CustomerTrigger::HelpDone, 4.0).unwrap();
        assert_eq!(
            msgs,
            vec![CustomerMessage::StartTimer {
                after: 2.5,
                trigger: CustomerTrigger::DwellDone
            }]
        );
    }

    #[test]
    fn staff_idle_accepting_entry_request_counts_in() {
        let mut s = StaffAgent::new("staff1", vec![Job::CountIn, Job::CountOut]);
        let (state, msgs) = agent_transition(
            &mut s,
            StaffTrigger::Accept {
                job: Job::CountIn,
                customer: 4,
                duration: 0.7,
            },
            2.0,
        )
        .unwrap();
        assert_eq!(state, StaffState::CountingIn);
        assert_eq!(msgs, vec![StaffMessage::StartTimer { after: 0.7 }]);
        let (state, msgs) = agent_transition(&mut s, StaffTrigger::Finish, 2.7).unwrap();
        assert_eq!(state, StaffState::Idle);
        assert_eq!(
            msgs,
            vec![StaffMessage::Completed {
                job: Job::CountIn,
                customer: 4
            }]
        );
        assert!((s.busy_time - 0.7).abs() < 1e-12);
    }

    #[test]
    fn waiting_entry_cannot_finish_dwell() {
        let mut c = CustomerAgent::new(0, 0.0, 4.0, false, 0.0);
        c.transition(CustomerTrigger::EnterArea, 0.0).unwrap();
        let err = agent_transition(&mut c, CustomerTrigger::DwellDone, 1.0).unwrap_err();
        assert!(matches!(err, Error::StateChart { .. }));
        assert_eq!(c.state(), CustomerState::WaitingEntry);
    }

    #[test]
    fn staff_rejects_unassigned_job_and_double_booking() {
        let mut s = StaffAgent::new("staff2", vec![Job::Help]);
        let accept = |job| StaffTrigger::Accept {
            job,
            customer: 0,
            duration: 1.0,
        };
        assert!(s.transition(accept(Job::CountIn), 0.0).is_err());
        s.transition(accept(Job::Help), 0.0).unwrap();
        assert!(s.transition(accept(Job::Help), 0.0).is_err());
    }

    #[test]
    fn room_capacity_and_release_order() {
        let mut r = FittingRoomAgent::new(1);
        assert_eq!(
            r.transition(RoomTrigger::Request(1), 0.0).unwrap(),
            vec![RoomMessage::Grant(1)]
        );
        assert_eq!(r.state(), RoomState::Full);
        assert!(r
            .transition(RoomTrigger::Request(2), 0.0)
            .unwrap()
            .is_empty());
        assert!(r
            .transition(RoomTrigger::Request(3), 0.0)
            .unwrap()
            .is_empty());
        assert_eq!(
            r.transition(RoomTrigger::Release, 1.0).unwrap(),
            vec![RoomMessage::Grant(2)]
        );
        assert_eq!(r.occupied(), 1);
        assert_eq!(r.waiting(), 1);
        let mut empty = FittingRoomAgent::new(2);
        assert!(empty.transition(RoomTrigger::Release, 0.0).is_err());
    }

    #[test]
    fn staff_edges() {
        assert!(StaffState::is_edge(StaffState::Idle, StaffState::Helping));
        assert!(!StaffState::is_edge(
            StaffState::CountingIn,
            StaffState::Helping
        ));
    }
}
