//! Deterministic rule-table backend used for tests and automated runs.

use super::tools::{parse_tool_call, response_payload, LlmResponse, END_TOUR, GO_TO};
use super::{Backend, BackendError, DialogueError, PromptBundle, ToolSchema};
use crate::museum::normalize_area_text;
use crate::transcript::TurnLabel;
use regex::Regex;
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const FALLBACK_UTTERANCE: &str = "Could you repeat your question? I didn't understand";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    Timeout,
    Network,
    Auth,
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    /// May reference wildcard captures as `$1`, `$2`, ...
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<String>,
}

/// Condition on the robot's situation, checked against the prompt.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuleGuard {
    /// Area id or display name the robot must be in.
    pub location: Option<String>,
    /// Area id or name that must still be unexplored.
    pub unvisited: Option<String>,
}

fn default_latency() -> f64 {
    1.0
}

fn default_label() -> TurnLabel {
    TurnLabel::Other
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedReply {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub say: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool: Option<ToolSpec>,
    #[serde(default = "default_label")]
    pub label: TurnLabel,
    #[serde(default = "default_latency")]
    pub latency_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedRule {
    /// Case-insensitive wildcard pattern (`*` matches any text) over the
    /// latest visitor message.
    pub pattern: String,
    #[serde(default)]
    pub guard: RuleGuard,
    #[serde(flatten)]
    pub reply: ScriptedReply,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedRules {
    pub rules: Vec<ScriptedRule>,
    #[serde(default = "default_fallback")]
    pub fallback: ScriptedReply,
}

fn default_fallback() -> ScriptedReply {
    ScriptedReply {
        say: Some(FALLBACK_UTTERANCE.to_string()),
        tool: None,
        label: TurnLabel::ComprehensionFailure,
        latency_s: default_latency(),
        fault: None,
    }
}

impl ScriptedRules {
    pub fn from_json(text: &str) -> Result<Self, DialogueError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DialogueError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// First matching rule wins; no match yields the fallback reply.
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    compiled: Vec<(Regex, ScriptedRule)>,
    fallback: ScriptedReply,
}

/// Glob with `*` wildcards to an anchored, case-insensitive regex.
fn compile_pattern(pattern: &str) -> Result<Regex, regex::Error> {
    let body: Vec<String> = normalize_text(pattern).split('*').map(regex::escape).collect();
    Regex::new(&format!("(?is)^{}$", body.join("(.*?)")))
}

fn normalize_text(text: &str) -> String {
    text.trim().replace(['\u{2019}', '\u{2018}'], "'")
}

fn check_reply(index: usize, reply: &ScriptedReply) -> Result<(), DialogueError> {
    let bad = |reason: String| DialogueError::InvalidRule { index, reason };
    if reply.label == TurnLabel::Question {
        return Err(bad("robot replies cannot be labeled 'question'".into()));
    }
    if !(reply.latency_s >= 0.0 && reply.latency_s.is_finite()) {
        return Err(bad(format!("latency must be non-negative, got {}", reply.latency_s)));
    }
    if reply.fault.is_none() && reply.say.is_none() && reply.tool.is_none() {
        return Err(bad("reply needs text, a tool or a fault".into()));
    }
    if let Some(tool) = &reply.tool {
        match tool.name.as_str() {
            GO_TO if tool.destination.is_none() => return Err(bad("go_to needs a destination".into())),
            GO_TO | END_TOUR => {}
            other => return Err(bad(format!("unknown tool '{other}'"))),
        }
    }
    Ok(())
}

impl ScriptedBackend {
    pub fn new(rules: ScriptedRules) -> Result<Self, DialogueError> {
        let mut compiled = Vec::with_capacity(rules.rules.len());
        for (index, rule) in rules.rules.into_iter().enumerate() {
            check_reply(index, &rule.reply)?;
            let re = compile_pattern(&rule.pattern).map_err(|e| DialogueError::InvalidRule {
                index,
                reason: e.to_string(),
            })?;
            compiled.push((re, rule));
        }
        check_reply(usize::MAX, &rules.fallback)?;
        Ok(Self {
            compiled,
            fallback: rules.fallback,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, DialogueError> {
        Self::new(ScriptedRules::from_file(path)?)
    }

    fn guard_holds(guard: &RuleGuard, bundle: &PromptBundle) -> bool {
        let same = |a: &str, b: &str| normalize_area_text(a) == normalize_area_text(b);
        if let Some(loc) = &guard.location {
            if !same(loc, &bundle.current_location) {
                return false;
            }
        }
        if let Some(area) = &guard.unvisited {
            if !bundle.unvisited.iter().any(|u| same(area, u)) {
                return false;
            }
        }
        true
    }

    /// The rule (or fallback) that answers `bundle`, with wildcard captures.
    pub fn select<'a>(&'a self, bundle: &PromptBundle) -> (&'a ScriptedReply, Vec<String>) {
        if let Some(text) = bundle.last_visitor_text() {
            let text = normalize_text(text);
            for (re, rule) in &self.compiled {
                if !Self::guard_holds(&rule.guard, bundle) {
                    continue;
                }
                if let Some(caps) = re.captures(&text) {
                    let captured = caps
                        .iter()
                        .skip(1)
                        .map(|m| m.map_or(String::new(), |m| m.as_str().to_string()))
                        .collect();
                    return (&rule.reply, captured);
                }
            }
        }
        (&self.fallback, Vec::new())
    }
}

fn substitute(template: &str, captures: &[String]) -> String {
    let mut out = template.to_string();
    // highest index first so $1 does not clobber $10
    for (i, cap) in captures.iter().enumerate().rev() {
        out = out.replace(&format!("${}", i + 1), cap.trim());
    }
    out
}

impl Backend for ScriptedBackend {
    fn complete(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Result<LlmResponse, BackendError> {
        let (reply, captures) = self.select(bundle);
        match reply.fault {
            Some(Fault::Timeout) => return Err(BackendError::Timeout),
            Some(Fault::Network) => return Err(BackendError::Network("injected network fault".into())),
            Some(Fault::Auth) => return Err(BackendError::Auth("injected auth fault".into())),
            Some(Fault::Malformed) => {
                return Err(BackendError::MalformedResponse("injected malformed response".into()))
            }
            None => {}
        }
        let text = reply.say.as_deref().map(|t| substitute(t, &captures));
        let destination = reply.tool.as_ref().and_then(|t| t.destination.as_deref()).map(|d| {
            let raw = substitute(d, &captures);
            tools.resolve(&raw).map_or(raw, |id| id.to_string())
        });
        let tool = reply.tool.as_ref().map(|t| (t.name.as_str(), destination.as_deref()));
        let payload = response_payload(text.as_deref(), tool);
        let response = parse_tool_call(&payload, &tools.area_ids())?;
        Ok(response.with_latency(reply.latency_s).with_label(reply.label))
    }
}
