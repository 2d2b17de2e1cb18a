//! The two callable actions and the chat-completions payload mapping.

use super::BackendError;
use crate::museum::{AreaId, MuseumMap};
use crate::transcript::TurnLabel;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub const GO_TO: &str = "go_to";
pub const END_TOUR: &str = "end_tour";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tool", rename_all = "snake_case")]
pub enum ToolCall {
    GoTo { destination: AreaId },
    EndTour,
}

impl ToolCall {
    pub fn name(&self) -> &'static str {
        match self {
            ToolCall::GoTo { .. } => GO_TO,
            ToolCall::EndTour => END_TOUR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub utterance: Option<String>,
    pub tool_call: Option<ToolCall>,
    /// Seconds between request and reply, measured or scripted.
    pub latency_s: f64,
    /// Ground-truth label attached by scripted backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<TurnLabel>,
}

impl LlmResponse {
    pub fn say(text: impl Into<String>) -> Self {
        Self {
            utterance: Some(text.into()),
            tool_call: None,
            latency_s: 0.0,
            label: None,
        }
    }

    pub fn call(call: ToolCall) -> Self {
        Self {
            utterance: None,
            tool_call: Some(call),
            latency_s: 0.0,
            label: None,
        }
    }

    pub fn with_latency(mut self, latency_s: f64) -> Self {
        self.latency_s = latency_s;
        self
    }

    pub fn with_label(mut self, label: TurnLabel) -> Self {
        self.label = Some(label);
        self
    }
}

/// Destinations offered to the model: every tour area (the entrance is
/// reached through `end_tour`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSchema {
    pub destinations: Vec<(AreaId, String)>,
}

impl ToolSchema {
    pub fn for_museum(museum: &MuseumMap) -> Self {
        Self {
            destinations: museum.tour_areas().map(|a| (a.id.clone(), a.name.clone())).collect(),
        }
    }

    pub fn area_ids(&self) -> Vec<AreaId> {
        self.destinations.iter().map(|(id, _)| id.clone()).collect()
    }

    /// Maps free text (an id, a display name, "the X area") onto a destination id.
    pub fn resolve(&self, text: &str) -> Option<&AreaId> {
        let wanted = crate::museum::normalize_area_text(text);
        self.destinations
            .iter()
            .find(|(id, name)| {
                crate::museum::normalize_area_text(id.as_str()) == wanted
                    || crate::museum::normalize_area_text(name) == wanted
            })
            .map(|(id, _)| id)
    }

    /// Function definitions in chat-completions `tools` format.
    pub fn to_json(&self) -> Value {
        let ids: Vec<&str> = self.destinations.iter().map(|(id, _)| id.as_str()).collect();
        let listing: Vec<String> = self
            .destinations
            .iter()
            .map(|(id, name)| format!("{id} ({name})"))
            .collect();
        json!([
            {
                "type": "function",
                "function": {
                    "name": GO_TO,
                    "description": format!(
                        "Moves the robot to the specified exhibit area. Call it only after the visitor \
                         agreed on the next area to visit. Available areas: {}.",
                        listing.join(", ")
                    ),
                    "parameters": {
                        "type": "object",
                        "properties": {
                            "destination": {
                                "type": "string",
                                "enum": ids,
                                "description": "Identifier of the area to visit."
                            }
                        },
                        "required": ["destination"]
                    }
                }
            },
            {
                "type": "function",
                "function": {
                    "name": END_TOUR,
                    "description": "Ends the tour and returns the robot to the entrance. Call it when the \
                                    visitor wants to stop the tour.",
                    "parameters": { "type": "object", "properties": {} }
                }
            }
        ])
    }
}

/// Builds a chat-completions response carrying `text` and/or a tool call.
/// The destination is passed through verbatim so unknown areas can be replayed.
pub fn response_payload(text: Option<&str>, tool: Option<(&str, Option<&str>)>) -> Value {
    let tool_calls: Vec<Value> = tool
        .into_iter()
        .enumerate()
        .map(|(i, (name, destination))| {
            let args = match destination {
                Some(d) => json!({ "destination": d }).to_string(),
                None => "{}".to_string(),
            };
            json!({
                "id": format!("call_{i}"),
                "type": "function",
                "function": { "name": name, "arguments": args }
            })
        })
        .collect();
    let mut message = json!({ "role": "assistant", "content": text });
    if !tool_calls.is_empty() {
        message["tool_calls"] = Value::Array(tool_calls);
    }
    json!({
        "object": "chat.completion",
        "choices": [ { "index": 0, "message": message, "finish_reason": if tool.is_some() { "tool_calls" } else { "stop" } } ]
    })
}

/// Serializes a tool call into a response payload.
pub fn tool_call_payload(call: &ToolCall, text: Option<&str>) -> Value {
    match call {
        ToolCall::GoTo { destination } => response_payload(text, Some((GO_TO, Some(destination.as_str())))),
        ToolCall::EndTour => response_payload(text, Some((END_TOUR, None))),
    }
}

/// Maps a backend payload onto an [`LlmResponse`].
///
/// Accepts a full chat-completions response or a bare assistant message.
/// `go_to` destinations are checked against `known_areas`; an unknown one is
/// reported as [`BackendError::UnknownArea`] together with any text.
pub fn parse_tool_call(payload: &Value, known_areas: &[AreaId]) -> Result<LlmResponse, BackendError> {
    let message = payload
        .pointer("/choices/0/message")
        .or_else(|| payload.get("message"))
        .unwrap_or(payload);
    if !message.is_object() {
        return Err(BackendError::MalformedResponse("payload is not an object".into()));
    }
    let utterance = message
        .get("content")
        .and_then(Value::as_str)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string);

    let mut tool_call = None;
    if let Some(calls) = message.get("tool_calls").and_then(Value::as_array) {
        if calls.len() > 1 {
            log::warn!("backend returned {} tool calls, using the first", calls.len());
        }
        if let Some(first) = calls.first() {
            let function = first.get("function").unwrap_or(first);
            let name = function.get("name").and_then(Value::as_str).unwrap_or_default();
            let args = parse_arguments(function.get("arguments"))?;
            match name {
                GO_TO => {
                    let destination = args
                        .get("destination")
                        .or_else(|| args.get("area"))
                        .and_then(Value::as_str)
                        .ok_or_else(|| BackendError::MalformedResponse("go_to without destination".into()))?;
                    let id = AreaId::from(destination);
                    if !known_areas.contains(&id) {
                        return Err(BackendError::UnknownArea {
                            destination: destination.to_string(),
                            utterance,
                        });
                    }
                    tool_call = Some(ToolCall::GoTo { destination: id });
                }
                END_TOUR => tool_call = Some(ToolCall::EndTour),
                other => log::warn!("ignoring unknown tool '{other}'"),
            }
        }
    }
    if utterance.is_none() && tool_call.is_none() {
        return Err(BackendError::MalformedResponse(
            "response has neither text nor a recognizable tool call".into(),
        ));
    }
    Ok(LlmResponse {
        utterance,
        tool_call,
        latency_s: 0.0,
        label: None,
    })
}

fn parse_arguments(raw: Option<&Value>) -> Result<Value, BackendError> {
    match raw {
        None | Some(Value::Null) => Ok(json!({})),
        Some(Value::String(s)) if s.trim().is_empty() => Ok(json!({})),
        Some(Value::String(s)) => serde_json::from_str(s)
            .map_err(|e| BackendError::MalformedResponse(format!("tool arguments are not JSON: {e}"))),
        Some(v @ Value::Object(_)) => Ok(v.clone()),
        Some(other) => Err(BackendError::MalformedResponse(format!(
            "unexpected tool arguments {other}"
        ))),
    }
}
