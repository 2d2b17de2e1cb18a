//! Scripted visitors that drive sessions end to end.

use crate::dialogue::Backend;
use crate::engine::{
    run_loop, EngineConfig, EngineError, EventKind, EventSource, SessionEvent, SessionState, Upcoming,
};
use crate::exec::Execution;
use crate::museum::{AreaId, MuseumMap};
use crate::transcript::TranscriptRecord;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::path::Path;
use thiserror::Error;

/// What the scripted visitor says when asking to stop.
pub const END_REQUEST_TEXT: &str = "I would like to end the tour, thank you.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case", deny_unknown_fields)]
pub enum VisitorAction {
    Approach,
    Say {
        text: String,
        #[serde(default)]
        delay_s: f64,
    },
    RequestArea {
        area_id: AreaId,
        #[serde(default)]
        delay_s: f64,
    },
    /// Adds `duration_s` of silence before the next action.
    Silence {
        duration_s: f64,
    },
    EndRequest {
        #[serde(default)]
        delay_s: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Persona {
    pub name: String,
    pub script: Vec<VisitorAction>,
}

#[derive(Debug, Error)]
pub enum PersonaError {
    #[error("cannot read persona: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed persona: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid persona '{name}': {reason}")]
    Invalid { name: String, reason: String },
}

impl Persona {
    pub fn from_json(text: &str) -> Result<Self, PersonaError> {
        let p: Persona = serde_json::from_str(text)?;
        p.check()?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PersonaError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<(), PersonaError> {
        let bad = |reason: String| PersonaError::Invalid {
            name: self.name.clone(),
            reason,
        };
        if self.script.is_empty() {
            return Err(bad("script is empty".into()));
        }
        for (i, action) in self.script.iter().enumerate() {
            let t = match action {
                VisitorAction::Approach => 0.0,
                VisitorAction::Say { delay_s, .. }
                | VisitorAction::RequestArea { delay_s, .. }
                | VisitorAction::EndRequest { delay_s } => *delay_s,
                VisitorAction::Silence { duration_s } => *duration_s,
            };
            if !(t >= 0.0 && t.is_finite()) {
                return Err(bad(format!("action {i} has a negative or non-finite delay")));
            }
            if let VisitorAction::Say { text, .. } = action {
                if text.trim().is_empty() {
                    return Err(bad(format!("action {i} says nothing")));
                }
            }
        }
        Ok(())
    }

    /// Checks that requested areas exist in `museum`.
    pub fn check_against(&self, museum: &MuseumMap) -> Result<(), PersonaError> {
        for action in &self.script {
            if let VisitorAction::RequestArea { area_id, .. } = action {
                if museum.area(area_id).is_none() {
                    return Err(PersonaError::Invalid {
                        name: self.name.clone(),
                        reason: format!("unknown area '{area_id}'"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Fluent construction of persona scripts.
#[derive(Debug, Clone)]
pub struct PersonaBuilder {
    persona: Persona,
}

impl PersonaBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            persona: Persona {
                name: name.into(),
                script: Vec::new(),
            },
        }
    }

    fn push(mut self, action: VisitorAction) -> Self {
        self.persona.script.push(action);
        self
    }

    pub fn approach(self) -> Self {
        self.push(VisitorAction::Approach)
    }

    pub fn say(self, text: impl Into<String>, delay_s: f64) -> Self {
        self.push(VisitorAction::Say {
            text: text.into(),
            delay_s,
        })
    }

    pub fn request_area(self, area_id: impl Into<AreaId>, delay_s: f64) -> Self {
        self.push(VisitorAction::RequestArea {
            area_id: area_id.into(),
            delay_s,
        })
    }

    pub fn silence(self, duration_s: f64) -> Self {
        self.push(VisitorAction::Silence { duration_s })
    }

    pub fn end_request(self, delay_s: f64) -> Self {
        self.push(VisitorAction::EndRequest { delay_s })
    }

    pub fn build(self) -> Persona {
        self.persona
    }
}

/// Wording used for a [`VisitorAction::RequestArea`].
pub fn request_area_text(museum: &MuseumMap, area: &AreaId) -> String {
    let name = museum.area(area).map_or_else(|| area.to_string(), |a| a.name.clone());
    format!("Can you take me to the {name} area?")
}

/// Feeds a persona's script into a session. Each action happens `delay_s`
/// (plus any preceding silence) after the robot starts waiting for the
/// visitor; while the robot moves or thinks the persona waits.
pub struct PersonaSource<'a> {
    museum: &'a MuseumMap,
    actions: VecDeque<VisitorAction>,
    silence: f64,
}

impl<'a> PersonaSource<'a> {
    pub fn new(persona: &Persona, museum: &'a MuseumMap) -> Self {
        Self {
            museum,
            actions: persona.script.iter().cloned().collect(),
            silence: 0.0,
        }
    }
}

impl EventSource for PersonaSource<'_> {
    fn upcoming(&mut self, state: &SessionState) -> Upcoming {
        while let Some(VisitorAction::Silence { duration_s }) = self.actions.front() {
            self.silence += duration_s;
            self.actions.pop_front();
        }
        let Some(action) = self.actions.front() else {
            return Upcoming::Exhausted;
        };
        if !state.awaiting_input() {
            return Upcoming::Waiting;
        }
        let (delay, kind) = match action {
            VisitorAction::Approach => (0.0, EventKind::VisitorDetected),
            VisitorAction::Say { text, delay_s } => (*delay_s, EventKind::VisitorUtterance { text: text.clone() }),
            VisitorAction::RequestArea { area_id, delay_s } => (
                *delay_s,
                EventKind::VisitorUtterance {
                    text: request_area_text(self.museum, area_id),
                },
            ),
            VisitorAction::EndRequest { delay_s } => (
                *delay_s,
                EventKind::VisitorUtterance {
                    text: END_REQUEST_TEXT.into(),
                },
            ),
            VisitorAction::Silence { .. } => unreachable!("silences are folded above"),
        };
        let at = (state.ready_since() + self.silence + delay).max(state.clock);
        Upcoming::At(SessionEvent::new(at, kind))
    }

    fn consume(&mut self) {
        self.actions.pop_front();
        self.silence = 0.0;
    }
}

pub fn session_id(persona: &Persona, seed: u64) -> String {
    format!("{}-{seed:04}", persona.name)
}

/// Runs one scripted session. The result depends only on the arguments.
pub fn run_session(
    persona: &Persona,
    museum: &MuseumMap,
    backend: &dyn Backend,
    config: &EngineConfig,
    seed: u64,
) -> Result<TranscriptRecord, EngineError> {
    let state = SessionState::new(museum, config.clone(), session_id(persona, seed))?;
    let mut source = PersonaSource::new(persona, museum);
    Ok(run_loop(state, &mut source, backend, museum))
}

/// One transcript per (persona, seed), persona-major, in input order.
pub fn generate_corpus(
    personas: &[Persona],
    museum: &MuseumMap,
    backend: &dyn Backend,
    config: &EngineConfig,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<TranscriptRecord>, EngineError> {
    let jobs: Vec<(&Persona, u64)> = personas
        .iter()
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    exec.map(&jobs, |&(p, seed)| run_session(p, museum, backend, config, seed))
        .into_iter()
        .collect()
}

const FUZZ_CONSENT: &[&str] = &["yes", "Sure!", "Yes, please.", "ok", "Of course"];
const FUZZ_READY: &[&str] = &["Let's continue", "I'm ready", "ok, next", "let's move on"];
const FUZZ_QUESTIONS: &[&str] = &[
    "Which type of ship is represented in this painting?",
    "Who painted this?",
    "What is the most beautiful ocean liner ever built?",
    "How old is this?",
    "zxqv blorp",
    "Tell me more about this artwork",
];

/// A random consenting visitor. The same seed always yields the same persona.
pub fn fuzz_persona(seed: u64, museum: &MuseumMap) -> Persona {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let areas: Vec<AreaId> = museum.tour_areas().map(|a| a.id.clone()).collect();
    let mut script = vec![
        VisitorAction::Approach,
        VisitorAction::Say {
            text: FUZZ_CONSENT.choose(&mut rng).unwrap().to_string(),
            delay_s: rng.random_range(0..10) as f64,
        },
    ];
    let steps = rng.random_range(1..12);
    for _ in 0..steps {
        let delay_s = rng.random_range(0..45) as f64;
        let action = match rng.random_range(0..10) {
            0..=3 => VisitorAction::Say {
                text: FUZZ_QUESTIONS.choose(&mut rng).unwrap().to_string(),
                delay_s,
            },
            4 => VisitorAction::Say {
                text: FUZZ_READY.choose(&mut rng).unwrap().to_string(),
                delay_s,
            },
            5 => VisitorAction::Silence {
                duration_s: rng.random_range(0..60) as f64,
            },
            _ => VisitorAction::RequestArea {
                area_id: areas.choose(&mut rng).unwrap().clone(),
                delay_s,
            },
        };
        script.push(action);
    }
    if rng.random_bool(0.7) {
        script.push(VisitorAction::EndRequest {
            delay_s: rng.random_range(0..20) as f64,
        });
    } else {
        script.push(VisitorAction::Silence { duration_s: 200.0 });
    }
    Persona {
        name: format!("fuzz-{seed}"),
        script,
    }
}
