//! Event loop over a logical clock.

use super::state::{Effect, EngineError, EventKind, SessionEvent, SessionState, TourPhase};
use crate::dialogue::{Backend, BackendError, ToolSchema};
use crate::museum::MuseumMap;
use crate::transcript::TranscriptRecord;
use std::collections::VecDeque;

/// What an event source will do next, given the current session state.
#[derive(Debug, Clone, PartialEq)]
pub enum Upcoming {
    At(SessionEvent),
    /// Nothing until the session changes (e.g. the robot is still moving).
    Waiting,
    Exhausted,
}

/// Supplies external events. `upcoming` may be called repeatedly without
/// side effects on what is returned; `consume` commits the last `At`.
pub trait EventSource {
    fn upcoming(&mut self, state: &SessionState) -> Upcoming;
    fn consume(&mut self);
}

/// A fixed timeline of events, delivered regardless of session state.
#[derive(Debug, Clone, Default)]
pub struct Timeline {
    events: VecDeque<SessionEvent>,
}

impl Timeline {
    pub fn new(events: impl IntoIterator<Item = SessionEvent>) -> Self {
        Self {
            events: events.into_iter().collect(),
        }
    }
}

impl EventSource for Timeline {
    fn upcoming(&mut self, _state: &SessionState) -> Upcoming {
        self.events.front().cloned().map_or(Upcoming::Exhausted, Upcoming::At)
    }

    fn consume(&mut self) {
        self.events.pop_front();
    }
}

/// Owns one session and its clock-driven internals: periodic ticks and the
/// single outstanding backend reply. Backend calls run synchronously; their
/// replies are delivered at `request time + latency` in logical time, or as
/// a timeout once the configured backend timeout elapses.
pub struct SessionDriver<'a> {
    museum: &'a MuseumMap,
    backend: &'a dyn Backend,
    schema: ToolSchema,
    state: SessionState,
    next_tick: f64,
    reply: Option<SessionEvent>,
    backend_timeout: f64,
}

impl<'a> SessionDriver<'a> {
    pub fn new(museum: &'a MuseumMap, backend: &'a dyn Backend, state: SessionState) -> Self {
        let next_tick = state.clock + state.config.tick_s;
        let backend_timeout = state.config.backend.timeout_s();
        Self {
            museum,
            backend,
            schema: ToolSchema::for_museum(museum),
            state,
            next_tick,
            reply: None,
            backend_timeout,
        }
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn into_state(self) -> SessionState {
        self.state
    }

    /// Time of the next tick or backend reply.
    pub fn next_internal_time(&self) -> f64 {
        self.reply.as_ref().map_or(self.next_tick, |r| r.at.min(self.next_tick))
    }

    pub fn reply_pending(&self) -> bool {
        self.reply.is_some()
    }

    /// Applies an external event. Illegal events are logged and dropped.
    pub fn apply(&mut self, event: SessionEvent) -> Vec<Effect> {
        self.try_apply(event).unwrap_or_else(|e| {
            log::warn!("[{}] ignored event: {e}", self.state.transcript.session_id);
            Vec::new()
        })
    }

    /// Applies an event, reporting illegal ones instead of logging them.
    /// A rejected event leaves the session unchanged.
    pub fn try_apply(&mut self, event: SessionEvent) -> Result<Vec<Effect>, EngineError> {
        let at = event.at;
        let effects = self.state.handle_event(self.museum, event)?;
        self.schedule_backend(at, &effects);
        Ok(effects)
    }

    /// Processes the earliest internal event; replies precede a tick at the same time.
    pub fn step_internal(&mut self) -> (f64, Vec<Effect>) {
        let event = match self.reply.take() {
            Some(r) if r.at <= self.next_tick => r,
            other => {
                self.reply = other;
                let t = self.next_tick;
                self.next_tick += self.state.config.tick_s;
                SessionEvent::new(
                    t,
                    EventKind::Tick {
                        dt: self.state.config.tick_s,
                    },
                )
            }
        };
        let at = event.at;
        (at, self.apply(event))
    }

    /// Processes every internal event up to and including `t`.
    pub fn advance_to(&mut self, t: f64) -> Vec<(f64, Effect)> {
        let mut out = Vec::new();
        while !self.state.is_done() && self.next_internal_time() <= t {
            let (at, fx) = self.step_internal();
            out.extend(fx.into_iter().map(|e| (at, e)));
        }
        out
    }

    fn schedule_backend(&mut self, now: f64, effects: &[Effect]) {
        for effect in effects {
            if let Effect::RequestBackend { request_id, bundle } = effect {
                let result = self.backend.complete(bundle, &self.schema);
                let (delay, result) = match result {
                    Ok(resp) if resp.latency_s > self.backend_timeout => {
                        (self.backend_timeout, Err(BackendError::Timeout))
                    }
                    Ok(resp) => (resp.latency_s.max(0.0), Ok(resp)),
                    Err(BackendError::Timeout) => (self.backend_timeout, Err(BackendError::Timeout)),
                    Err(e) => (0.0, Err(e)),
                };
                self.reply = Some(SessionEvent::new(
                    now + delay,
                    EventKind::BackendReply {
                        request_id: *request_id,
                        result,
                    },
                ));
            }
        }
    }
}

/// Runs a session to completion and returns its finalized transcript.
///
/// Stops when the tour is done, or when the source is exhausted while the
/// robot is idle (nobody engaged, or consent was declined).
pub fn run_loop(
    state: SessionState,
    source: &mut dyn EventSource,
    backend: &dyn Backend,
    museum: &MuseumMap,
) -> TranscriptRecord {
    run_loop_observed(state, source, backend, museum, &mut |_, _| {})
}

/// [`run_loop`] reporting every effect with its logical time.
pub fn run_loop_observed(
    state: SessionState,
    source: &mut dyn EventSource,
    backend: &dyn Backend,
    museum: &MuseumMap,
    observer: &mut dyn FnMut(f64, &Effect),
) -> TranscriptRecord {
    let mut driver = SessionDriver::new(museum, backend, state);
    loop {
        let state = driver.state();
        if state.is_done() {
            break;
        }
        if state.clock - state.transcript.start > state.config.max_session_s {
            log::error!("session {} exceeded the maximum duration", state.transcript.session_id);
            let mut state = driver.into_state();
            state.abort("max_session_exceeded");
            return state.transcript;
        }
        let internal = driver.next_internal_time();
        let upcoming = source.upcoming(state);
        let idle = state.phase == TourPhase::Idle && !driver.reply_pending();
        match upcoming {
            Upcoming::At(event) if event.at <= internal => {
                source.consume();
                let at = event.at.max(driver.state().clock);
                for e in driver.apply(SessionEvent::new(at, event.kind)) {
                    observer(at, &e);
                }
            }
            Upcoming::Exhausted if idle => break,
            _ => {
                let (at, fx) = driver.step_internal();
                for e in &fx {
                    observer(at, e);
                }
            }
        }
    }
    let mut state = driver.into_state();
    state.finalize();
    state.transcript
}
