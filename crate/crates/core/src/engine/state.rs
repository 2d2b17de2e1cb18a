//! Session state machine.

use super::config::EngineConfig;
use crate::dialogue::{build_prompt, BackendError, LlmResponse, PromptBundle, PromptInputs, ToolCall};
use crate::geometry::Pose;
use crate::museum::{AreaId, ArtworkId, MuseumMap};
use crate::nav::{plan_path, NavState, Notification};
use crate::transcript::{ChatMessage, EndReason, Role, TimedToolCall, TranscriptRecord, TranscriptTurn, TurnLabel};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum TourPhase {
    Idle,
    Greeting,
    AwaitConsent,
    Navigating { target: AreaId },
    AtArea { area: AreaId },
    FreeExploration,
    Ending,
    Done,
}

impl TourPhase {
    pub fn name(&self) -> &'static str {
        match self {
            TourPhase::Idle => "idle",
            TourPhase::Greeting => "greeting",
            TourPhase::AwaitConsent => "await_consent",
            TourPhase::Navigating { .. } => "navigating",
            TourPhase::AtArea { .. } => "at_area",
            TourPhase::FreeExploration => "free_exploration",
            TourPhase::Ending => "ending",
            TourPhase::Done => "done",
        }
    }

    /// Phases in which visitor silence counts toward the timeout.
    pub fn timer_active(&self) -> bool {
        matches!(
            self,
            TourPhase::Greeting | TourPhase::AwaitConsent | TourPhase::AtArea { .. } | TourPhase::FreeExploration
        )
    }
}

impl fmt::Display for TourPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TourPhase::Navigating { target } => write!(f, "navigating({target})"),
            TourPhase::AtArea { area } => write!(f, "at_area({area})"),
            other => f.write_str(other.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    VisitorDetected,
    Consent {
        yes: bool,
    },
    VisitorUtterance {
        text: String,
    },
    /// Explicit stop request (e.g. an end button), bypassing the backend.
    EndRequest,
    /// Externally reported arrival; snaps the robot onto the area waypoint.
    Arrived {
        area: AreaId,
    },
    Tick {
        dt: f64,
    },
    BackendReply {
        request_id: u64,
        result: Result<LlmResponse, BackendError>,
    },
    /// Externally triggered passing utterance.
    Notification {
        artwork: ArtworkId,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::VisitorDetected => "visitor_detected",
            EventKind::Consent { .. } => "consent",
            EventKind::VisitorUtterance { .. } => "visitor_utterance",
            EventKind::EndRequest => "end_request",
            EventKind::Arrived { .. } => "arrived",
            EventKind::Tick { .. } => "tick",
            EventKind::BackendReply { .. } => "backend_reply",
            EventKind::Notification { .. } => "notification",
        }
    }
}

/// An event stamped with the logical time at which it occurs.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionEvent {
    pub at: f64,
    pub kind: EventKind,
}

impl SessionEvent {
    pub fn new(at: f64, kind: EventKind) -> Self {
        Self { at, kind }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    Say { text: String, label: Option<TurnLabel> },
    PhaseChanged(TourPhase),
    ToolInvoked(ToolCall),
    NavigateTo { area: AreaId, goal: Pose },
    PoseUpdate(Pose),
    Notify(Notification),
    RequestBackend { request_id: u64, bundle: PromptBundle },
    Finished,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("event '{event}' is not allowed in phase {phase}")]
    IllegalTransition { phase: String, event: &'static str },
    #[error("event at t={at} precedes the session clock t={clock}")]
    TimeWentBackwards { at: f64, clock: f64 },
    #[error("museum has no area with mandatory rank {0}")]
    MissingMandatoryArea(u8),
}

#[derive(Debug, Clone, PartialEq)]
struct PendingRequest {
    id: u64,
    attempts: u32,
    bundle: PromptBundle,
}

#[derive(Debug, Clone)]
pub struct SessionState {
    pub phase: TourPhase,
    pub clock: f64,
    pub visited: Vec<AreaId>,
    pub nav: NavState,
    pub history: Vec<ChatMessage>,
    pub last_visitor_activity: f64,
    pub transcript: TranscriptRecord,
    pub config: EngineConfig,
    current_area: AreaId,
    first_area: AreaId,
    second_area: AreaId,
    /// Start of the silence interval, shifted forward by time spent navigating.
    silence_since: f64,
    nav_started_at: f64,
    arrived_at: f64,
    pending: Option<PendingRequest>,
    followup: bool,
    next_request_id: u64,
    ready_since: f64,
    last_robot_turn: f64,
    end_reason: Option<EndReason>,
}

impl SessionState {
    pub fn new(museum: &MuseumMap, config: EngineConfig, session_id: impl Into<String>) -> Result<Self, EngineError> {
        let first = museum.mandatory_area(1).ok_or(EngineError::MissingMandatoryArea(1))?;
        let second = museum.mandatory_area(2).ok_or(EngineError::MissingMandatoryArea(2))?;
        let entrance = museum.entrance();
        Ok(Self {
            phase: TourPhase::Idle,
            clock: 0.0,
            visited: Vec::new(),
            nav: NavState::new(entrance.waypoint, &config.nav, &museum.artworks),
            history: Vec::new(),
            last_visitor_activity: 0.0,
            transcript: TranscriptRecord::new(session_id),
            current_area: entrance.id.clone(),
            first_area: first.id.clone(),
            second_area: second.id.clone(),
            silence_since: 0.0,
            nav_started_at: 0.0,
            arrived_at: 0.0,
            pending: None,
            followup: false,
            next_request_id: 1,
            ready_since: 0.0,
            last_robot_turn: 0.0,
            end_reason: None,
            config,
        })
    }

    /// The area the robot last arrived at (the entrance before the tour).
    pub fn current_area(&self) -> &AreaId {
        &self.current_area
    }

    pub fn backend_pending(&self) -> bool {
        self.pending.is_some()
    }

    pub fn end_reason(&self) -> Option<EndReason> {
        self.end_reason
    }

    /// True when the robot is waiting for the visitor to act.
    pub fn awaiting_input(&self) -> bool {
        match self.phase {
            TourPhase::Idle | TourPhase::Greeting => true,
            TourPhase::AwaitConsent | TourPhase::AtArea { .. } | TourPhase::FreeExploration => {
                self.pending.is_none() && !self.followup
            }
            _ => false,
        }
    }

    /// Logical time at which the robot last started waiting for the visitor.
    pub fn ready_since(&self) -> f64 {
        self.ready_since
    }

    /// Seconds of visitor silence counted by the disengagement timer.
    pub fn silence(&self) -> f64 {
        self.clock - self.silence_since
    }

    pub fn mandatory_done(&self) -> bool {
        self.visited.contains(&self.second_area)
    }

    /// At the first mandatory area: true once the visitor has been quiet for
    /// the grace period with nothing outstanding. Explicit readiness phrases
    /// are acted on directly when they are heard.
    pub fn readiness_to_advance(&self) -> bool {
        if self.phase
            != (TourPhase::AtArea {
                area: self.first_area.clone(),
            })
        {
            return false;
        }
        if self.pending.is_some() || self.followup {
            return false;
        }
        let quiet_from = self
            .arrived_at
            .max(self.last_visitor_activity)
            .max(self.last_robot_turn);
        self.clock - quiet_from >= self.config.grace_s
    }

    pub fn is_done(&self) -> bool {
        self.phase == TourPhase::Done
    }

    /// Closes the transcript; idempotent.
    pub fn finalize(&mut self) {
        if !self.transcript.finalized {
            self.transcript.end = self.clock.max(self.transcript.start);
            self.transcript.areas_visited = self.visited.clone();
            self.transcript.finalized = true;
        }
    }

    /// Marks the session as abnormally terminated and finalizes it.
    pub fn abort(&mut self, flag: &str) {
        self.transcript.fault_flags.push(flag.to_string());
        self.finalize();
    }

    fn illegal(&self, event: &EventKind) -> EngineError {
        EngineError::IllegalTransition {
            phase: self.phase.to_string(),
            event: event.name(),
        }
    }

    /// Rejects events the current phase cannot accept, before any mutation.
    fn check_legal(&self, event: &EventKind) -> Result<(), EngineError> {
        use EventKind as E;
        use TourPhase as P;
        let ok = match (&self.phase, event) {
            (P::Done, _) => false,
            (_, E::Tick { dt }) => *dt > 0.0,
            (P::Idle, E::VisitorDetected) => true,
            (_, E::VisitorDetected) => false,
            (P::Greeting | P::AwaitConsent, E::Consent { .. }) => true,
            (_, E::Consent { .. }) => false,
            (P::Idle | P::Ending, E::VisitorUtterance { .. }) => false,
            (_, E::VisitorUtterance { text }) => !text.trim().is_empty(),
            (P::Idle | P::Ending, E::EndRequest) => false,
            (_, E::EndRequest) => true,
            (P::Navigating { target }, E::Arrived { area }) => target == area,
            (P::Ending, E::Arrived { .. }) => true,
            (_, E::Arrived { .. }) => false,
            (P::Navigating { .. } | P::Ending, E::Notification { .. }) => true,
            (_, E::Notification { .. }) => false,
            (P::Ending, E::BackendReply { .. }) => true,
            (_, E::BackendReply { request_id, .. }) => self.pending.as_ref().is_some_and(|p| p.id == *request_id),
        };
        if ok {
            Ok(())
        } else {
            Err(self.illegal(event))
        }
    }

    /// Applies one event. Illegal events leave the state untouched.
    pub fn handle_event(&mut self, museum: &MuseumMap, event: SessionEvent) -> Result<Vec<Effect>, EngineError> {
        if event.at + 1e-9 < self.clock {
            return Err(EngineError::TimeWentBackwards {
                at: event.at,
                clock: self.clock,
            });
        }
        self.check_legal(&event.kind)?;
        let was_awaiting = self.awaiting_input();
        self.clock = self.clock.max(event.at);
        let mut fx = Vec::new();
        match event.kind {
            EventKind::VisitorDetected => self.on_detected(&mut fx),
            EventKind::Consent { yes } => {
                self.leave_greeting(&mut fx);
                self.note_visitor_activity();
                self.on_consent(museum, yes, &mut fx);
            }
            EventKind::VisitorUtterance { text } => self.on_utterance(museum, text, &mut fx),
            EventKind::EndRequest => {
                self.note_visitor_activity();
                self.end_tour(museum, EndReason::Requested, &mut fx);
            }
            EventKind::Arrived { area } => {
                let goal = if self.phase == TourPhase::Ending {
                    museum.entrance().waypoint
                } else {
                    museum.area(&area).map_or(self.nav.pose, |a| a.waypoint)
                };
                self.nav.pose = Pose::new(goal.x, goal.y, self.nav.pose.heading);
                self.nav.path = None;
                self.on_arrival(museum, &mut fx);
            }
            EventKind::Tick { dt } => self.on_tick(museum, dt, &mut fx),
            EventKind::BackendReply { result, .. } => self.on_backend_reply(museum, result, &mut fx),
            EventKind::Notification { artwork } => {
                if let Some(art) = museum.artwork(&artwork) {
                    let n = Notification {
                        artwork_id: art.id.clone(),
                        utterance: art.passing_utterance.clone(),
                        logical_time: self.clock,
                    };
                    self.notify(n, &mut fx);
                }
            }
        }
        if self.awaiting_input() && !was_awaiting {
            self.ready_since = self.clock;
        }
        Ok(fx)
    }

    fn note_visitor_activity(&mut self) {
        self.last_visitor_activity = self.clock;
        self.silence_since = self.clock;
    }

    fn set_phase(&mut self, phase: TourPhase, fx: &mut Vec<Effect>) {
        if self.phase != phase {
            self.phase = phase.clone();
            fx.push(Effect::PhaseChanged(phase));
        }
    }

    fn record(&mut self, role: Role, text: &str, label: Option<TurnLabel>) {
        let msg = ChatMessage::new(role, text, self.clock);
        self.history.push(msg.clone());
        self.transcript.messages.push(TranscriptTurn {
            message: msg,
            label,
            area: Some(self.current_area.clone()),
        });
    }

    fn say(&mut self, text: String, label: Option<TurnLabel>, fx: &mut Vec<Effect>) {
        self.record(Role::Robot, &text, label);
        self.last_robot_turn = self.clock;
        fx.push(Effect::Say { text, label });
    }

    fn say_other(&mut self, text: String, fx: &mut Vec<Effect>) {
        self.say(text, Some(TurnLabel::Other), fx);
    }

    fn on_detected(&mut self, fx: &mut Vec<Effect>) {
        if self.transcript.messages.is_empty() {
            self.transcript.start = self.clock;
        }
        self.note_visitor_activity();
        self.set_phase(TourPhase::Greeting, fx);
        let text = format!(
            "Hello! I am {}, the guide robot of this museum. Would you like me to guide you through the exhibition?",
            self.config.robot.name
        );
        self.say_other(text, fx);
    }

    fn leave_greeting(&mut self, fx: &mut Vec<Effect>) {
        if self.phase == TourPhase::Greeting {
            self.set_phase(TourPhase::AwaitConsent, fx);
        }
    }

    fn on_consent(&mut self, museum: &MuseumMap, yes: bool, fx: &mut Vec<Effect>) {
        if yes {
            let first = self.first_area.clone();
            let name = area_name(museum, &first);
            self.say_other(
                format!("Great! We will start from the {name} area. Please follow me."),
                fx,
            );
            self.go_to(museum, first, fx);
        } else {
            self.say_other("No problem. Enjoy your visit!".into(), fx);
            self.set_phase(TourPhase::Idle, fx);
        }
    }

    fn on_utterance(&mut self, museum: &MuseumMap, text: String, fx: &mut Vec<Effect>) {
        self.leave_greeting(fx);
        self.record(Role::Visitor, text.trim(), None);
        self.note_visitor_activity();
        match self.phase.clone() {
            TourPhase::AwaitConsent => match self.config.phrases.classify(&text) {
                Some(yes) => self.on_consent(museum, yes, fx),
                None => self.say_other(
                    "Sorry, I did not catch that. Would you like me to guide you through the museum? \
                     Please answer yes or no."
                        .into(),
                    fx,
                ),
            },
            TourPhase::AtArea { area }
                if area == self.first_area
                    && !self.mandatory_done()
                    && self.pending.is_none()
                    && self.config.phrases.classify(&text) == Some(true) =>
            {
                self.advance_to_second(museum, fx);
            }
            _ => {
                if self.pending.is_some() {
                    self.followup = true;
                } else {
                    self.request_backend(museum, fx);
                }
            }
        }
    }

    fn request_backend(&mut self, museum: &MuseumMap, fx: &mut Vec<Effect>) {
        let info = self.config.robot.rendered_info();
        let bundle = build_prompt(
            museum,
            PromptInputs {
                robot_info: &info,
                current_area: &self.current_area,
                visited: &self.visited,
                robot_pose: self.nav.pose,
                history: &self.history,
                history_window: self.config.history_window,
            },
        )
        .expect("session areas come from the museum");
        self.issue(bundle, 0, fx);
    }

    fn issue(&mut self, bundle: PromptBundle, attempts: u32, fx: &mut Vec<Effect>) {
        let id = self.next_request_id;
        self.next_request_id += 1;
        self.pending = Some(PendingRequest {
            id,
            attempts,
            bundle: bundle.clone(),
        });
        fx.push(Effect::RequestBackend { request_id: id, bundle });
    }

    fn on_backend_reply(
        &mut self,
        museum: &MuseumMap,
        result: Result<LlmResponse, BackendError>,
        fx: &mut Vec<Effect>,
    ) {
        let pending = self.pending.take();
        if self.phase == TourPhase::Ending {
            self.followup = false;
            return;
        }
        let Some(pending) = pending else { return };
        match result {
            Ok(resp) => {
                if let Some(text) = resp.utterance {
                    self.say(text, resp.label, fx);
                }
                match resp.tool_call {
                    Some(ToolCall::GoTo { destination }) => self.requested_area(museum, destination, fx),
                    Some(ToolCall::EndTour) => self.end_tour(museum, EndReason::Tool, fx),
                    None => {}
                }
            }
            Err(BackendError::UnknownArea { destination, utterance }) => {
                if let Some(text) = utterance {
                    self.say(text, None, fx);
                }
                let names: Vec<&str> = museum.tour_areas().map(|a| a.name.as_str()).collect();
                self.say_other(
                    format!(
                        "Sorry, I don't know an area called '{destination}'. The areas are: {}. Where would you like to go?",
                        names.join(", ")
                    ),
                    fx,
                );
            }
            Err(e) => {
                self.transcript.fault_flags.push(format!("backend_error: {e}"));
                if pending.attempts < self.config.retries {
                    self.issue(pending.bundle, pending.attempts + 1, fx);
                    return;
                }
                self.transcript.fault_flags.push("backend_failure".into());
                self.say_other(
                    "I'm sorry, I'm having some trouble answering right now. Could you please ask me again?".into(),
                    fx,
                );
            }
        }
        if self.followup && self.phase != TourPhase::Ending && self.phase != TourPhase::Done {
            self.followup = false;
            if self.pending.is_none() {
                self.request_backend(museum, fx);
            }
        }
    }

    /// A go_to from the backend, gated so the two mandatory areas come first.
    fn requested_area(&mut self, museum: &MuseumMap, destination: AreaId, fx: &mut Vec<Effect>) {
        if !self.mandatory_done() {
            match &self.phase {
                TourPhase::AtArea { area } if *area == self.first_area => {
                    if destination != self.second_area {
                        let name = area_name(museum, &self.second_area);
                        self.say_other(
                            format!("We will get there later. First, let me show you the {name} area."),
                            fx,
                        );
                    }
                    let second = self.second_area.clone();
                    self.go_to(museum, second, fx);
                }
                TourPhase::Navigating { target } => {
                    let name = area_name(museum, target);
                    self.say_other(format!("We will get there later, after the {name} area."), fx);
                }
                _ => {}
            }
            return;
        }
        match &self.phase {
            TourPhase::Navigating { target } if *target == destination => {}
            TourPhase::AtArea { .. } | TourPhase::FreeExploration if self.current_area == destination => {
                let name = area_name(museum, &destination);
                self.say_other(format!("We are already in the {name} area."), fx);
            }
            _ => self.go_to(museum, destination, fx),
        }
    }

    fn advance_to_second(&mut self, museum: &MuseumMap, fx: &mut Vec<Effect>) {
        let second = self.second_area.clone();
        let name = area_name(museum, &second);
        self.say_other(format!("Let's move on to the {name} area. Please follow me."), fx);
        self.go_to(museum, second, fx);
    }

    fn plan_to(&self, museum: &MuseumMap, goal: Pose) -> Option<crate::nav::Path> {
        let mut path = plan_path(&museum.grid, self.nav.pose, goal.position()).ok()?;
        // finish on the exact waypoint rather than its cell center
        let exact = goal.position();
        if path.waypoints.len() == 1 {
            path.waypoints.clear();
        }
        if path.waypoints.last().is_none_or(|p| p.distance(exact) > 1e-9) {
            path.waypoints.push(exact);
        }
        Some(path)
    }

    fn go_to(&mut self, museum: &MuseumMap, area: AreaId, fx: &mut Vec<Effect>) {
        let goal = museum.area(&area).expect("destination validated").waypoint;
        let call = ToolCall::GoTo {
            destination: area.clone(),
        };
        self.transcript.tool_calls.push(TimedToolCall {
            call: call.clone(),
            logical_time: self.clock,
        });
        fx.push(Effect::ToolInvoked(call));
        match self.plan_to(museum, goal) {
            Some(path) => {
                self.nav.set_path(path, Some(area.clone()));
                if !matches!(self.phase, TourPhase::Navigating { .. }) {
                    self.nav_started_at = self.clock;
                }
                fx.push(Effect::NavigateTo {
                    area: area.clone(),
                    goal,
                });
                self.set_phase(TourPhase::Navigating { target: area }, fx);
            }
            None => {
                let name = area_name(museum, &area);
                self.transcript.fault_flags.push(format!("no_path: {area}"));
                self.say_other(format!("I'm sorry, I cannot reach the {name} area from here."), fx);
            }
        }
    }

    fn end_tour(&mut self, museum: &MuseumMap, reason: EndReason, fx: &mut Vec<Effect>) {
        self.end_reason = Some(reason);
        self.transcript.end_reason = Some(reason);
        self.pending = None;
        self.followup = false;
        let text = match reason {
            EndReason::Timeout => "It seems you are no longer here. I am going back to the entrance. Goodbye!",
            _ => "Thank you for visiting the museum with me! I will now go back to the entrance. Goodbye!",
        };
        self.say_other(text.into(), fx);
        self.transcript.tool_calls.push(TimedToolCall {
            call: ToolCall::EndTour,
            logical_time: self.clock,
        });
        fx.push(Effect::ToolInvoked(ToolCall::EndTour));
        let entrance = museum.entrance();
        let goal = entrance.waypoint;
        match self.plan_to(museum, goal) {
            Some(path) => {
                self.nav.set_path(path, Some(entrance.id.clone()));
                fx.push(Effect::NavigateTo {
                    area: entrance.id.clone(),
                    goal,
                });
                self.set_phase(TourPhase::Ending, fx);
            }
            None => {
                self.transcript.fault_flags.push("no_path: entrance".into());
                self.set_phase(TourPhase::Ending, fx);
                self.finish(fx);
            }
        }
    }

    fn finish(&mut self, fx: &mut Vec<Effect>) {
        self.set_phase(TourPhase::Done, fx);
        self.finalize();
        fx.push(Effect::Finished);
    }

    fn notify(&mut self, n: Notification, fx: &mut Vec<Effect>) {
        self.say_other(n.utterance.clone(), fx);
        fx.push(Effect::Notify(n));
    }

    fn on_tick(&mut self, museum: &MuseumMap, dt: f64, fx: &mut Vec<Effect>) {
        if self.phase == TourPhase::Greeting {
            self.set_phase(TourPhase::AwaitConsent, fx);
        }
        match self.phase {
            TourPhase::Navigating { .. } | TourPhase::Ending => {
                let arrived = self.nav.advance(dt);
                fx.push(Effect::PoseUpdate(self.nav.pose));
                let cfg = self.config.nav;
                let fired =
                    self.nav
                        .check_notifications(&museum.artworks, cfg.fov_half_angle, cfg.rearm_factor, self.clock);
                for n in fired {
                    self.notify(n, fx);
                }
                if arrived {
                    self.on_arrival(museum, fx);
                }
            }
            _ => {}
        }
        if self.phase.timer_active() && self.silence() > self.config.timeout_s {
            self.end_tour(museum, EndReason::Timeout, fx);
        } else if self.readiness_to_advance() {
            self.advance_to_second(museum, fx);
        }
    }

    fn on_arrival(&mut self, museum: &MuseumMap, fx: &mut Vec<Effect>) {
        if self.phase == TourPhase::Ending {
            self.current_area = museum.entrance_area_id.clone();
            self.finish(fx);
            return;
        }
        let TourPhase::Navigating { target } = self.phase.clone() else {
            return;
        };
        // navigation time does not count as silence
        let nav_time = self.clock - self.nav_started_at;
        self.silence_since = self.silence_since.min(self.nav_started_at) + nav_time;
        self.arrived_at = self.clock;
        self.current_area = target.clone();
        if !self.visited.contains(&target) {
            self.visited.push(target.clone());
        }
        let area = museum.area(&target).expect("target validated");
        let mut text = area.intro_text.trim().to_string();
        let phase = if target == self.first_area && !self.mandatory_done() {
            let next = area_name(museum, &self.second_area);
            text.push_str(&format!(
                " Feel free to ask me anything about the artworks here. When you are ready, we will move on to the {next} area."
            ));
            TourPhase::AtArea { area: target.clone() }
        } else {
            let unvisited: Vec<&str> = museum
                .tour_areas()
                .filter(|a| !self.visited.contains(&a.id))
                .map(|a| a.name.as_str())
                .collect();
            if unvisited.is_empty() {
                text.push_str(" We have now seen every area of the museum. Let me know when you want to end the tour.");
            } else {
                text.push_str(&format!(
                    " Feel free to ask me about the artworks here. Which area would you like to visit next? You can choose among: {}.",
                    unvisited.join(", ")
                ));
            }
            if target == self.second_area {
                TourPhase::AtArea { area: target.clone() }
            } else {
                TourPhase::FreeExploration
            }
        };
        self.set_phase(phase, fx);
        self.say_other(text, fx);
    }
}

fn area_name(museum: &MuseumMap, id: &AreaId) -> String {
    museum.area(id).map_or_else(|| id.to_string(), |a| a.name.clone())
}
