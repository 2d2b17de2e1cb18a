//! Tour orchestration: the session state machine and its event loop.

mod config;
mod runner;
mod state;

pub use crate::transcript::EndReason;
pub use config::{BackendConfig, ConfigError, EngineConfig, IntentPhrases, RobotConfig};
pub use runner::{run_loop, run_loop_observed, EventSource, SessionDriver, Timeline, Upcoming};
pub use state::{Effect, EngineError, EventKind, SessionEvent, SessionState, TourPhase};
