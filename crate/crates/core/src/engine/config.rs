//! Engine configuration file (TOML).

use crate::dialogue::{Backend, HttpBackend, HttpBackendConfig, ScriptedBackend};
use crate::nav::NavConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot build backend: {0}")]
    Backend(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub name: String,
    /// First prompt section. `{name}` is replaced with the robot's name.
    pub info: String,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self {
            name: "Guido".into(),
            info: "You are {name}, a guide robot in a maritime museum. You lead one visitor at a time \
                   through the exhibition areas and answer questions about the artworks using only the \
                   knowledge base below. If the answer is not in the knowledge base, say that you are not \
                   aware of this information and suggest asking the museum staff. Keep answers short. \
                   Before moving, ask the visitor whether they want to go to an area and call go_to only \
                   after they agree. Call end_tour when the visitor wants to stop the visit."
                .into(),
        }
    }
}

impl RobotConfig {
    pub fn rendered_info(&self) -> String {
        self.info.replace("{name}", &self.name)
    }
}

/// Phrase lists the engine uses to read consent and readiness directly,
/// without a backend round trip. Matching is whole-word and case-insensitive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntentPhrases {
    pub affirmative: Vec<String>,
    pub negative: Vec<String>,
}

impl Default for IntentPhrases {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            affirmative: v(&[
                "yes",
                "yeah",
                "yep",
                "sure",
                "ok",
                "okay",
                "of course",
                "gladly",
                "let's go",
                "let's continue",
                "let's move on",
                "continue",
                "go ahead",
                "ready",
                "i'm ready",
                "next",
            ]),
            negative: v(&["no", "nope", "not", "no thanks", "maybe later", "don't", "do not"]),
        }
    }
}

fn words(text: &str) -> String {
    let cleaned: String = text
        .to_lowercase()
        .replace(['\u{2019}', '\u{2018}'], "'")
        .chars()
        .map(|c| if c.is_alphanumeric() || c == '\'' { c } else { ' ' })
        .collect();
    format!(" {} ", cleaned.split_whitespace().collect::<Vec<_>>().join(" "))
}

fn contains_phrase(haystack: &str, phrases: &[String]) -> bool {
    phrases.iter().any(|p| {
        let p = words(p);
        p.trim() != "" && haystack.contains(&p)
    })
}

impl IntentPhrases {
    /// `Some(true)` for an affirmative reply, `Some(false)` for a refusal.
    /// Negative phrases win so that "not ready" is not read as consent.
    pub fn classify(&self, text: &str) -> Option<bool> {
        let w = words(text);
        if contains_phrase(&w, &self.negative) {
            Some(false)
        } else if contains_phrase(&w, &self.affirmative) {
            Some(true)
        } else {
            None
        }
    }
}

fn default_rules_path() -> PathBuf {
    PathBuf::from("rules.json")
}

fn default_backend_timeout() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    Scripted {
        #[serde(default = "default_rules_path")]
        rules: PathBuf,
        #[serde(default = "default_backend_timeout")]
        timeout_s: f64,
    },
    Http(HttpBackendConfig),
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig::Scripted {
            rules: default_rules_path(),
            timeout_s: default_backend_timeout(),
        }
    }
}

impl BackendConfig {
    pub fn timeout_s(&self) -> f64 {
        match self {
            BackendConfig::Scripted { timeout_s, .. } => *timeout_s,
            BackendConfig::Http(h) => h.timeout_s,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Backend>, ConfigError> {
        match self {
            BackendConfig::Scripted { rules, .. } => ScriptedBackend::from_file(rules)
                .map(|b| Box::new(b) as Box<dyn Backend>)
                .map_err(|e| ConfigError::Backend(format!("{}: {e}", rules.display()))),
            BackendConfig::Http(cfg) => HttpBackend::new(cfg.clone())
                .map(|b| Box::new(b) as Box<dyn Backend>)
                .map_err(|e| ConfigError::Backend(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Visitor silence that ends the tour, in seconds.
    pub timeout_s: f64,
    /// Idle time at the first mandatory area after which the robot moves on.
    pub grace_s: f64,
    pub history_window: usize,
    pub tick_s: f64,
    /// Extra attempts after a failed backend call before apologizing.
    pub retries: u32,
    /// Hard stop for runaway scripted sessions.
    pub max_session_s: f64,
    pub nav: NavConfig,
    pub robot: RobotConfig,
    pub phrases: IntentPhrases,
    pub backend: BackendConfig,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            timeout_s: 120.0,
            grace_s: 30.0,
            history_window: 20,
            tick_s: 1.0,
            retries: 2,
            max_session_s: 4.0 * 3600.0,
            nav: NavConfig::default(),
            robot: RobotConfig::default(),
            phrases: IntentPhrases::default(),
            backend: BackendConfig::default(),
        }
    }
}

impl EngineConfig {
    /// Parses TOML; relative backend paths are resolved against `base_dir`.
    pub fn from_toml(text: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg: EngineConfig = toml::from_str(text)?;
        if let (Some(base), BackendConfig::Scripted { rules, .. }) = (base_dir, &mut cfg.backend) {
            if rules.is_relative() {
                *rules = base.join(&*rules);
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path.parent())
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let positive = [
            ("timeout_s", self.timeout_s),
            ("tick_s", self.tick_s),
            ("max_session_s", self.max_session_s),
            ("nav.linear_speed", self.nav.linear_speed),
            ("nav.angular_speed", self.nav.angular_speed),
            ("nav.fov_half_angle", self.nav.fov_half_angle),
            ("backend.timeout_s", self.backend.timeout_s()),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.grace_s.is_nan() || self.grace_s < 0.0 {
            return Err(ConfigError::Invalid("grace_s must be non-negative".into()));
        }
        if self.nav.fov_half_angle > std::f64::consts::PI {
            return Err(ConfigError::Invalid("nav.fov_half_angle must not exceed pi".into()));
        }
        if self.nav.rearm_factor < 1.0 {
            return Err(ConfigError::Invalid("nav.rearm_factor must be at least 1".into()));
        }
        Ok(())
    }
}
