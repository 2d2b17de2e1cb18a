//! Chat-completions backend over HTTP. The API key is read from an
//! environment variable at construction time and never logged.

use super::prompt::render_prompt;
use super::tools::parse_tool_call;
use super::{Backend, BackendError, LlmResponse, PromptBundle, ToolSchema};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpBackendConfig {
    /// Full URL of the chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    #[serde(default = "default_key_env")]
    pub api_key_env: String,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default)]
    pub temperature: Option<f64>,
}

fn default_key_env() -> String {
    "TOURGUIDE_API_KEY".to_string()
}

fn default_timeout() -> f64 {
    10.0
}

pub struct HttpBackend {
    config: HttpBackendConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl std::fmt::Debug for HttpBackend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpBackend")
            .field("endpoint", &self.config.endpoint)
            .field("model", &self.config.model)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .finish()
    }
}

impl HttpBackend {
    /// A missing key is not an error here: some local endpoints need none,
    /// and remote ones answer 401 which surfaces as `BackendError::Auth`.
    pub fn new(config: HttpBackendConfig) -> Result<Self, BackendError> {
        let api_key = std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty());
        if api_key.is_none() {
            log::warn!(
                "environment variable {} is not set; sending no credentials",
                config.api_key_env
            );
        }
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_s.max(0.001)))
            .build()
            .map_err(|e| BackendError::Network(e.to_string()))?;
        Ok(Self {
            config,
            api_key,
            client,
        })
    }

    pub fn config(&self) -> &HttpBackendConfig {
        &self.config
    }

    /// The JSON request body sent for `bundle`.
    pub fn request_body(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Value {
        let mut messages = vec![json!({ "role": "system", "content": render_prompt(bundle) })];
        if let Some(text) = bundle.last_visitor_text() {
            messages.push(json!({ "role": "user", "content": text }));
        }
        let mut body = json!({
            "model": self.config.model,
            "messages": messages,
            "tools": tools.to_json(),
            "tool_choice": "auto",
        });
        if let Some(t) = self.config.temperature {
            body["temperature"] = json!(t);
        }
        body
    }
}

fn map_transport(e: reqwest::Error) -> BackendError {
    if e.is_timeout() {
        BackendError::Timeout
    } else {
        BackendError::Network(e.to_string())
    }
}

impl Backend for HttpBackend {
    fn complete(&self, bundle: &PromptBundle, tools: &ToolSchema) -> Result<LlmResponse, BackendError> {
        let started = Instant::now();
        let mut request = self
            .client
            .post(&self.config.endpoint)
            .json(&self.request_body(bundle, tools));
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(map_transport)?;
        let status = response.status();
        if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
            return Err(BackendError::Auth(format!("endpoint answered {status}")));
        }
        if !status.is_success() {
            return Err(BackendError::Network(format!("endpoint answered {status}")));
        }
        let text = response.text().map_err(map_transport)?;
        let payload: Value = serde_json::from_str(&text)
            .map_err(|e| BackendError::MalformedResponse(format!("body is not JSON: {e}")))?;
        let parsed = parse_tool_call(&payload, &tools.area_ids())?;
        Ok(parsed.with_latency(started.elapsed().as_secs_f64()))
    }
}
