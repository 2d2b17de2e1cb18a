//! Dialogue: the dynamic prompt, the two robot tools and the language-model
//! backends that answer visitors.

mod http;
mod prompt;
mod scripted;
mod tools;

pub use http::{HttpBackend, HttpBackendConfig};
pub use prompt::{build_prompt, render_prompt, KnowledgeEntry, PromptBundle, PromptInputs, SECTION_HEADERS};
pub use scripted::{Fault, RuleGuard, ScriptedBackend, ScriptedReply, ScriptedRule, ScriptedRules, ToolSpec};
pub use tools::{
    parse_tool_call, response_payload, tool_call_payload, LlmResponse, ToolCall, ToolSchema, END_TOUR, GO_TO,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DialogueError {
    #[error("unknown area '{0}'")]
    UnknownArea(String),
    #[error("invalid scripted rule #{index}: {reason}")]
    InvalidRule { index: usize, reason: String },
    #[error("cannot read rules: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed rules file: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Failures of a backend call. Everything except `UnknownArea` is retriable.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BackendError {
    #[error("network error: {0}")]
    Network(String),
    #[error("backend timed out")]
    Timeout,
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("malformed response: {0}")]
    MalformedResponse(String),
    #[error("model asked for unknown area '{destination}'")]
    UnknownArea {
        destination: String,
        utterance: Option<String>,
    },
}

impl BackendError {
    pub fn is_retriable(&self) -> bool {
        !matches!(self, BackendError::UnknownArea { .. })
    }
}

/// A language model that answers the visitor given the current prompt.
/// Implementations must not touch session state.
pub trait Backend: Send + Sync {
    fn complete(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Result<LlmResponse, BackendError>;
}

impl<B: Backend + ?Sized> Backend for Box<B> {
    fn complete(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Result<LlmResponse, BackendError> {
        (**self).complete(bundle, tools)
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn complete(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Result<LlmResponse, BackendError> {
        (**self).complete(bundle, tools)
    }
}
