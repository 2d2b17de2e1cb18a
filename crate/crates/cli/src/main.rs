use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use tourguide_cli::commands::{self, CliError, Validation};
use tourguide_cli::gateway::{self, Gateway};
use tourguide_core::engine::EngineConfig;
use tourguide_core::exec::Execution;

#[derive(Parser)]
#[command(name = "tourguide", version, about = "Museum tour-guide robot orchestration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a museum file; exits 0 iff it is valid.
    Validate {
        #[arg(long)]
        museum: PathBuf,
    },
    /// Run one scripted visitor and write the transcript.
    Run {
        #[arg(long)]
        museum: PathBuf,
        #[arg(long)]
        persona: PathBuf,
        /// Engine configuration (TOML), including the backend section.
        #[arg(long)]
        backend: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a transcript corpus from personas and seeds.
    Corpus {
        #[arg(long)]
        museum: PathBuf,
        /// Persona files or directories of them.
        #[arg(long, num_args = 1..)]
        persona: Vec<PathBuf>,
        /// Number of additional random personas.
        #[arg(long, default_value_t = 0)]
        fuzz: u64,
        #[arg(long)]
        backend: PathBuf,
        /// Seeds 0..N per persona.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Label a transcript directory and export the metrics CSV.
    Metrics {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        phrases: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Check per-area rates against this museum.
        #[arg(long)]
        museum: Option<PathBuf>,
    },
    /// Serve live sessions over WebSocket at /ws.
    Serve {
        #[arg(long)]
        museum: PathBuf,
        #[arg(long)]
        backend: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: String,
        /// Logical seconds per wall-clock second.
        #[arg(long, default_value_t = 1.0)]
        time_scale: f64,
        /// Write finished transcripts here.
        #[arg(long)]
        transcripts: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Validate { museum } => match commands::validate(&museum)? {
            Validation::Valid(map) => {
                println!(
                    "{}: valid ({} areas, {} artworks)",
                    museum.display(),
                    map.areas.len(),
                    map.artworks.len()
                );
                Ok(ExitCode::SUCCESS)
            }
            Validation::Invalid(violations) => {
                println!("{}: {} violation(s)", museum.display(), violations.len());
                for v in violations {
                    println!("  {v}");
                }
                Ok(ExitCode::from(1))
            }
        },
        Command::Run {
            museum,
            persona,
            backend,
            seed,
            out,
        } => {
            let summary = commands::run(&museum, &persona, &backend, seed, &out)?;
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Corpus {
            museum,
            persona,
            fuzz,
            backend,
            seeds,
            out,
            sequential,
        } => {
            let exec = if sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            let n = commands::corpus(&museum, &persona, fuzz, &backend, seeds, &out, exec)?;
            println!("wrote {n} transcripts to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Metrics {
            corpus,
            phrases,
            out,
            museum,
        } => {
            let n = commands::metrics(&corpus, &phrases, &out, museum.as_deref())?;
            println!("{n} transcripts -> {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Serve {
            museum,
            backend,
            bind,
            time_scale,
            transcripts,
        } => {
            if !(time_scale.is_finite() && time_scale > 0.0) {
                return Err(CliError::Invalid(format!(
                    "time scale must be positive, got {time_scale}"
                )));
            }
            let map = commands::load_museum(&museum)?;
            let config = EngineConfig::load(&backend)?;
            let backend = config.backend.build()?;
            let mut gw = Gateway::new(map, Arc::from(backend), config).with_time_scale(time_scale);
            if let Some(dir) = transcripts {
                gw = gw.with_transcript_dir(dir);
            }
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(&bind)
                    .await
                    .map_err(|e| CliError::Io(format!("cannot bind {bind}: {e}")))?;
                let addr = listener.local_addr().map_err(|e| CliError::Io(e.to_string()))?;
                println!("listening on ws://{addr}/ws");
                gateway::serve(listener, Arc::new(gw))
                    .await
                    .map_err(|e| CliError::Io(e.to_string()))
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
