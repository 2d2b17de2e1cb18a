//! Conversation transcripts: the per-session record of duration, visited
//! areas and the full dialogue.

use crate::dialogue::ToolCall;
use crate::museum::AreaId;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Visitor,
    Robot,
    System,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Visitor => "visitor",
            Role::Robot => "robot",
            Role::System => "system",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub text: String,
    pub logical_time: f64,
}

impl ChatMessage {
    pub fn new(role: Role, text: impl Into<String>, logical_time: f64) -> Self {
        Self {
            role,
            text: text.into(),
            logical_time,
        }
    }
}

/// Visitor turns are `question` or `other`; robot turns are `answered`,
/// `out_of_scope`, `comprehension_failure` or `other`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnLabel {
    Question,
    Answered,
    OutOfScope,
    ComprehensionFailure,
    Other,
}

impl TurnLabel {
    pub fn valid_for(self, role: Role) -> bool {
        match role {
            Role::Visitor => matches!(self, TurnLabel::Question | TurnLabel::Other),
            Role::Robot => !matches!(self, TurnLabel::Question),
            Role::System => self == TurnLabel::Other,
        }
    }
}

/// A transcript message with its label and the area the robot occupied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptTurn {
    #[serde(flatten)]
    pub message: ChatMessage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TurnLabel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area: Option<AreaId>,
}

/// Why a tour ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndReason {
    /// The visitor stayed silent past the disengagement timeout.
    Timeout,
    /// An explicit stop request outside the dialogue (e.g. an end button).
    Requested,
    /// The backend called `end_tour`.
    Tool,
}

impl EndReason {
    pub fn as_str(self) -> &'static str {
        match self {
            EndReason::Timeout => "timeout",
            EndReason::Requested => "requested",
            EndReason::Tool => "tool",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedToolCall {
    #[serde(flatten)]
    pub call: ToolCall,
    pub logical_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub session_id: String,
    pub start: f64,
    pub end: f64,
    pub messages: Vec<TranscriptTurn>,
    pub tool_calls: Vec<TimedToolCall>,
    pub areas_visited: Vec<AreaId>,
    #[serde(default)]
    pub fault_flags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_reason: Option<EndReason>,
    /// Free-form operator notes (e.g. an observed pause); never written by the engine.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
    #[serde(default)]
    pub finalized: bool,
}

impl TranscriptRecord {
    pub fn new(session_id: impl Into<String>) -> Self {
        Self {
            session_id: session_id.into(),
            start: 0.0,
            end: 0.0,
            messages: Vec::new(),
            tool_calls: Vec::new(),
            areas_visited: Vec::new(),
            fault_flags: Vec::new(),
            end_reason: None,
            annotations: Vec::new(),
            finalized: false,
        }
    }

    pub fn duration_s(&self) -> f64 {
        self.end - self.start
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }

    pub fn read(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }

    pub fn count_label(&self, label: TurnLabel) -> usize {
        self.messages.iter().filter(|m| m.label == Some(label)).count()
    }
}
