//! Batch subcommands: validate, run, corpus and metrics.

use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;
use tourguide_core::analytics::{
    area_error_rates, compute_metrics, export_metrics, label_corpus, label_turns, load_corpus, per_area_error_rates,
    AnalyticsError, PhraseConfig,
};
use tourguide_core::engine::{ConfigError, EndReason, EngineConfig};
use tourguide_core::exec::Execution;
use tourguide_core::museum::{load_museum_file, validate_museum, MuseumError, MuseumMap, Violation};
use tourguide_core::transcript::{TranscriptRecord, TurnLabel};
use tourguide_core::visitor::{fuzz_persona, generate_corpus, run_session, Persona, PersonaError};

/// A failed command. Bad input exits with 1, unreadable or unwritable files with 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<MuseumError> for CliError {
    fn from(e: MuseumError) -> Self {
        match e {
            MuseumError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<PersonaError> for CliError {
    fn from(e: PersonaError) -> Self {
        match e {
            PersonaError::Io(_) => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::Io { .. } | AnalyticsError::Csv(_) => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

/// Outcome of checking a museum file.
#[derive(Debug)]
pub enum Validation {
    Valid(MuseumMap),
    Invalid(Vec<Violation>),
}

/// Loads and checks a museum file. Violations are a result, not an error.
pub fn validate(path: &Path) -> Result<Validation, CliError> {
    match load_museum_file(path) {
        Ok(map) => {
            let violations = validate_museum(&map);
            if violations.is_empty() {
                Ok(Validation::Valid(map))
            } else {
                Ok(Validation::Invalid(violations))
            }
        }
        Err(MuseumError::Validation(v)) => Ok(Validation::Invalid(v)),
        Err(e) => Err(e.into()),
    }
}

pub fn load_museum(path: &Path) -> Result<MuseumMap, CliError> {
    match validate(path)? {
        Validation::Valid(map) => Ok(map),
        Validation::Invalid(v) => Err(MuseumError::Validation(v).into()),
    }
}

/// Counts reported after a scripted run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub session_id: String,
    pub duration_s: f64,
    pub areas: usize,
    pub questions: usize,
    pub answered: usize,
    pub out_of_scope: usize,
    pub failures: usize,
    pub end_reason: Option<EndReason>,
    pub end_tour_at: Option<f64>,
    pub timeout_s: f64,
}

impl RunSummary {
    pub fn of(transcript: &TranscriptRecord, config: &EngineConfig) -> Self {
        let labeled = label_turns(transcript, &PhraseConfig::default());
        let end_tour_at = transcript
            .tool_calls
            .iter()
            .find(|c| c.call == tourguide_core::dialogue::ToolCall::EndTour)
            .map(|c| c.logical_time);
        Self {
            session_id: transcript.session_id.clone(),
            duration_s: transcript.duration_s(),
            areas: transcript.areas_visited.len(),
            questions: labeled.count_label(TurnLabel::Question),
            answered: labeled.count_label(TurnLabel::Answered),
            out_of_scope: labeled.count_label(TurnLabel::OutOfScope),
            failures: labeled.count_label(TurnLabel::ComprehensionFailure),
            end_reason: transcript.end_reason,
            end_tour_at,
            timeout_s: config.timeout_s,
        }
    }
}

impl std::fmt::Display for RunSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {:.1} s, {} areas, {} questions, {} answered, {} out of scope, {} comprehension failures",
            self.session_id,
            self.duration_s,
            self.areas,
            self.questions,
            self.answered,
            self.out_of_scope,
            self.failures
        )?;
        let at = self.end_tour_at.map(|t| format!(" at t={t:.1} s")).unwrap_or_default();
        match self.end_reason {
            Some(EndReason::Timeout) => write!(f, ", ended after {:.0} s of silence{at}", self.timeout_s),
            Some(EndReason::Requested) => write!(f, ", ended on request{at}"),
            Some(EndReason::Tool) => write!(f, ", ended by end_tour{at}"),
            None => write!(f, ", no tour given"),
        }
    }
}

fn write_transcript(t: &TranscriptRecord, out: &Path) -> Result<(), CliError> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    t.write(out).map_err(|e| CliError::io(out, e))
}

/// Runs one persona against the configured backend and writes its transcript.
pub fn run(museum: &Path, persona: &Path, backend: &Path, seed: u64, out: &Path) -> Result<RunSummary, CliError> {
    let map = load_museum(museum)?;
    let persona = Persona::load(persona)?;
    persona.check_against(&map)?;
    let config = EngineConfig::load(backend)?;
    let backend = config.backend.build()?;
    let transcript =
        run_session(&persona, &map, backend.as_ref(), &config, seed).map_err(|e| CliError::Invalid(e.to_string()))?;
    write_transcript(&transcript, out)?;
    Ok(RunSummary::of(&transcript, &config))
}

/// Persona files given directly, or every `*.json` in a directory, sorted by name.
pub fn persona_files(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(p.clone());
        }
    }
    Ok(files)
}

/// Generates one transcript per persona and seed into `out_dir`.
pub fn corpus(
    museum: &Path,
    personas: &[PathBuf],
    fuzz: u64,
    backend: &Path,
    seeds: u64,
    out_dir: &Path,
    exec: Execution,
) -> Result<usize, CliError> {
    let map = load_museum(museum)?;
    let mut loaded = Vec::new();
    for f in persona_files(personas)? {
        let p = Persona::load(&f)?;
        p.check_against(&map)?;
        loaded.push(p);
    }
    loaded.extend((0..fuzz).map(|s| fuzz_persona(s, &map)));
    let config = EngineConfig::load(backend)?;
    let backend = config.backend.build()?;
    let seeds: Vec<u64> = (0..seeds).collect();
    let corpus = generate_corpus(&loaded, &map, backend.as_ref(), &config, &seeds, exec)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    for t in &corpus {
        write_transcript(t, &out_dir.join(format!("{}.json", t.session_id)))?;
    }
    Ok(corpus.len())
}

/// Labels a transcript directory and writes the metrics CSV. Per-area rates
/// are checked against `museum` when one is given.
pub fn metrics(corpus_dir: &Path, phrases: &Path, out: &Path, museum: Option<&Path>) -> Result<usize, CliError> {
    let phrases = PhraseConfig::load(phrases)?;
    if !corpus_dir.is_dir() {
        return Err(CliError::Io(format!("{}: not a directory", corpus_dir.display())));
    }
    let corpus = load_corpus(corpus_dir, Execution::Parallel)?;
    let labeled = label_corpus(&corpus, &phrases, Execution::Parallel);
    let summary = compute_metrics(&labeled)?;
    let rates = match museum {
        Some(m) => per_area_error_rates(&labeled, &load_museum(m)?)?,
        None => area_error_rates(&labeled),
    };
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    export_metrics(&summary, &rates, out)?;
    Ok(labeled.len())
}
