//! Visit parameters and per-area error rates over a transcript corpus.

use crate::exec::Execution;
use crate::museum::{AreaId, MuseumMap};
use crate::transcript::{Role, TranscriptRecord, TurnLabel};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("the corpus is empty")]
    EmptyCorpus,
    #[error("transcript {session} mentions unknown area '{area}'")]
    UnknownArea { session: String, area: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Robot phrasings that mark a reply as out of scope or as a comprehension
/// failure. Patterns are case-insensitive substrings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhraseConfig {
    pub out_of_scope: Vec<String>,
    pub comprehension_failure: Vec<String>,
}

impl Default for PhraseConfig {
    fn default() -> Self {
        Self {
            out_of_scope: vec!["not aware of this information".into(), "ask the museum staff".into()],
            comprehension_failure: vec!["could you repeat".into(), "didn't understand".into()],
        }
    }
}

impl PhraseConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, AnalyticsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AnalyticsError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| AnalyticsError::Parse {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn fold(text: &str) -> String {
    text.to_lowercase().replace(['\u{2019}', '\u{2018}'], "'")
}

fn matches_any(text: &str, patterns: &[String]) -> bool {
    let t = fold(text);
    patterns.iter().any(|p| !p.is_empty() && t.contains(&fold(p)))
}

const INTERROGATIVES: &[&str] = &[
    "who", "whom", "whose", "what", "when", "where", "why", "how", "which", "is", "are", "was", "were", "do", "does",
    "did", "can", "could", "would", "will", "tell me",
];

fn is_question(text: &str) -> bool {
    let t = fold(text.trim());
    if t.ends_with('?') {
        return true;
    }
    let words: Vec<&str> = t
        .split(|c: char| !(c.is_alphanumeric() || c == '\''))
        .filter(|w| !w.is_empty())
        .collect();
    INTERROGATIVES.iter().any(|q| {
        let q: Vec<&str> = q.split(' ').collect();
        words.len() >= q.len() && words[..q.len()] == q[..]
    })
}

/// Labels every unlabeled turn; existing labels are kept as they are.
pub fn label_turns(transcript: &TranscriptRecord, phrases: &PhraseConfig) -> TranscriptRecord {
    let mut out = transcript.clone();
    let mut after_question = false;
    for turn in &mut out.messages {
        let role = turn.message.role;
        if turn.label.is_none() {
            turn.label = Some(match role {
                Role::Visitor if is_question(&turn.message.text) => TurnLabel::Question,
                Role::Robot if matches_any(&turn.message.text, &phrases.comprehension_failure) => {
                    TurnLabel::ComprehensionFailure
                }
                Role::Robot if matches_any(&turn.message.text, &phrases.out_of_scope) => TurnLabel::OutOfScope,
                Role::Robot if after_question => TurnLabel::Answered,
                _ => TurnLabel::Other,
            });
        }
        match role {
            Role::Visitor => after_question = turn.label == Some(TurnLabel::Question),
            Role::Robot => after_question = false,
            Role::System => {}
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    /// Mean and sample standard deviation; a single value has sd 0.
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len();
        if n == 0 {
            return Stat { mean: 0.0, sd: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Stat { mean, sd }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisitMetrics {
    pub sessions: usize,
    pub duration_min: Stat,
    pub areas_visited: Stat,
    pub questions: Stat,
    pub answers: Stat,
    pub out_of_scope: Stat,
    pub comprehension_failures: Stat,
}

impl VisitMetrics {
    /// `(name, stat)` pairs in export order.
    pub fn rows(&self) -> [(&'static str, Stat); 6] {
        [
            ("duration_min", self.duration_min),
            ("areas_visited", self.areas_visited),
            ("questions", self.questions),
            ("answers", self.answers),
            ("out_of_scope", self.out_of_scope),
            ("comprehension_failures", self.comprehension_failures),
        ]
    }
}

/// Distinct areas entered.
pub fn distinct_areas(t: &TranscriptRecord) -> BTreeSet<&AreaId> {
    t.areas_visited.iter().collect()
}

/// Mean and sample deviation of each visit parameter over a labeled corpus.
pub fn compute_metrics(corpus: &[TranscriptRecord]) -> Result<VisitMetrics, AnalyticsError> {
    if corpus.is_empty() {
        return Err(AnalyticsError::EmptyCorpus);
    }
    let column = |f: &dyn Fn(&TranscriptRecord) -> f64| -> Stat { Stat::of(&corpus.iter().map(f).collect::<Vec<_>>()) };
    Ok(VisitMetrics {
        sessions: corpus.len(),
        duration_min: column(&|t| t.duration_s() / 60.0),
        areas_visited: column(&|t| distinct_areas(t).len() as f64),
        questions: column(&|t| t.count_label(TurnLabel::Question) as f64),
        answers: column(&|t| t.count_label(TurnLabel::Answered) as f64),
        out_of_scope: column(&|t| t.count_label(TurnLabel::OutOfScope) as f64),
        comprehension_failures: column(&|t| t.count_label(TurnLabel::ComprehensionFailure) as f64),
    })
}

/// Comprehension failures at an area divided by the number of transcripts
/// that visited it. Areas nobody visited are left out. Every visited area
/// must exist in `museum`.
pub fn per_area_error_rates(
    corpus: &[TranscriptRecord],
    museum: &MuseumMap,
) -> Result<BTreeMap<AreaId, f64>, AnalyticsError> {
    for t in corpus {
        if let Some(area) = t.areas_visited.iter().find(|a| museum.area(a).is_none()) {
            return Err(AnalyticsError::UnknownArea {
                session: t.session_id.clone(),
                area: area.to_string(),
            });
        }
    }
    Ok(area_error_rates(corpus))
}

/// [`per_area_error_rates`] without checking area ids against a museum.
pub fn area_error_rates(corpus: &[TranscriptRecord]) -> BTreeMap<AreaId, f64> {
    let mut visitors: BTreeMap<AreaId, usize> = BTreeMap::new();
    let mut failures: BTreeMap<AreaId, usize> = BTreeMap::new();
    for t in corpus {
        for area in distinct_areas(t) {
            *visitors.entry(area.clone()).or_default() += 1;
        }
        for turn in &t.messages {
            if turn.message.role == Role::Robot && turn.label == Some(TurnLabel::ComprehensionFailure) {
                if let Some(area) = &turn.area {
                    *failures.entry(area.clone()).or_default() += 1;
                }
            }
        }
    }
    visitors
        .into_iter()
        .map(|(area, n)| {
            let f = failures.get(&area).copied().unwrap_or(0);
            (area, f as f64 / n as f64)
        })
        .collect()
}

/// Writes `kind,name,mean,sd,rate_pct`: one row per parameter, then one per
/// area sorted by id. Numbers use fixed precision so identical inputs give
/// identical bytes.
pub fn export_metrics(
    metrics: &VisitMetrics,
    rates: &BTreeMap<AreaId, f64>,
    path: impl AsRef<Path>,
) -> Result<(), AnalyticsError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| AnalyticsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_metrics_csv(metrics, rates, file)
}

pub fn write_metrics_csv(
    metrics: &VisitMetrics,
    rates: &BTreeMap<AreaId, f64>,
    out: impl std::io::Write,
) -> Result<(), AnalyticsError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "name", "mean", "sd", "rate_pct"])?;
    for (name, stat) in metrics.rows() {
        w.write_record([
            "metric",
            name,
            &format!("{:.4}", stat.mean),
            &format!("{:.4}", stat.sd),
            "",
        ])?;
    }
    for (area, rate) in rates {
        w.write_record(["area", area.as_str(), "", "", &format!("{:.2}", rate * 100.0)])?;
    }
    w.flush().map_err(|e| AnalyticsError::Csv(e.into()))?;
    Ok(())
}

/// Reads every `*.json` transcript in `dir`, ordered by file name.
pub fn load_corpus(dir: impl AsRef<Path>, exec: Execution) -> Result<Vec<TranscriptRecord>, AnalyticsError> {
    let dir = dir.as_ref();
    let io = |source| AnalyticsError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    exec.map(&paths, |p| {
        let text = std::fs::read_to_string(p).map_err(|source| AnalyticsError::Io {
            path: p.clone(),
            source,
        })?;
        TranscriptRecord::from_json(&text).map_err(|source| AnalyticsError::Parse {
            path: p.clone(),
            source,
        })
    })
    .into_iter()
    .collect()
}

/// Labels a whole corpus.
pub fn label_corpus(corpus: &[TranscriptRecord], phrases: &PhraseConfig, exec: Execution) -> Vec<TranscriptRecord> {
    exec.map(corpus, |t| label_turns(t, phrases))
}
