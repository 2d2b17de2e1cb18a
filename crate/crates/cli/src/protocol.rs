//! Gateway wire messages. Each WebSocket text frame carries newline-delimited
//! JSON objects tagged by `type`.

use serde::{Deserialize, Serialize};
use tourguide_core::engine::{Effect, EventKind, TourPhase};
use tourguide_core::geometry::Pose;
use tourguide_core::transcript::TranscriptRecord;

/// Messages sent to the visitor console.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Outbound {
    RobotUtterance {
        text: String,
    },
    PoseUpdate {
        x: f64,
        y: f64,
        heading: f64,
    },
    PhaseChange {
        phase: String,
        /// Navigation target or current area, when the phase has one.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        area: Option<String>,
    },
    Notification {
        artwork_id: String,
        text: String,
    },
    TourSummary {
        transcript: Box<TranscriptRecord>,
    },
    Error {
        message: String,
    },
}

/// Messages accepted from the visitor console.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Inbound {
    Approach,
    Consent { yes: bool },
    Utterance { text: String },
    EndRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutboundEnvelope {
    pub session_id: String,
    pub logical_time: f64,
    #[serde(flatten)]
    pub message: Outbound,
}

/// Inbound messages may omit `session_id` and `logical_time`; the gateway
/// owns the clock and stamps events on arrival.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InboundEnvelope {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical_time: Option<f64>,
    #[serde(flatten)]
    pub message: Inbound,
}

impl Inbound {
    pub fn into_event(self) -> EventKind {
        match self {
            Inbound::Approach => EventKind::VisitorDetected,
            Inbound::Consent { yes } => EventKind::Consent { yes },
            Inbound::Utterance { text } => EventKind::VisitorUtterance { text },
            Inbound::EndRequest => EventKind::EndRequest,
        }
    }
}

impl Outbound {
    pub fn pose(p: Pose) -> Self {
        Outbound::PoseUpdate {
            x: p.x,
            y: p.y,
            heading: p.heading,
        }
    }

    pub fn phase(phase: &TourPhase) -> Self {
        let area = match phase {
            TourPhase::Navigating { target } => Some(target.to_string()),
            TourPhase::AtArea { area } => Some(area.to_string()),
            _ => None,
        };
        Outbound::PhaseChange {
            phase: phase.name().to_string(),
            area,
        }
    }

    /// The wire form of an engine effect. Internal effects have none.
    pub fn from_effect(effect: &Effect) -> Option<Self> {
        match effect {
            Effect::Say { text, .. } => Some(Outbound::RobotUtterance { text: text.clone() }),
            Effect::PhaseChanged(p) => Some(Outbound::phase(p)),
            Effect::PoseUpdate(p) => Some(Outbound::pose(*p)),
            Effect::Notify(n) => Some(Outbound::Notification {
                artwork_id: n.artwork_id.to_string(),
                text: n.utterance.clone(),
            }),
            Effect::ToolInvoked(_) | Effect::NavigateTo { .. } | Effect::RequestBackend { .. } | Effect::Finished => {
                None
            }
        }
    }
}

impl OutboundEnvelope {
    /// One NDJSON line, newline included.
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("message serializes");
        s.push('\n');
        s
    }
}

/// Parses every non-blank line of a frame.
pub fn parse_frame(frame: &str) -> Vec<Result<InboundEnvelope, serde_json::Error>> {
    frame
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
