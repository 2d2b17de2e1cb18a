//! Live session gateway: one tour session per WebSocket connection.

use crate::protocol::{parse_frame, Outbound, OutboundEnvelope};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::header;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use futures::stream::SplitSink;
use futures::{SinkExt, StreamExt};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};
use tokio::net::TcpListener;
use tourguide_core::dialogue::Backend;
use tourguide_core::engine::{Effect, EngineConfig, EventKind, SessionDriver, SessionEvent, SessionState, TourPhase};
use tourguide_core::museum::MuseumMap;
use tourguide_core::transcript::TranscriptRecord;

/// Shared by every connection. Sessions share only these immutable parts.
pub struct Gateway {
    pub museum: Arc<MuseumMap>,
    pub backend: Arc<dyn Backend>,
    pub config: EngineConfig,
    /// Logical seconds per wall-clock second; 1.0 in live mode.
    pub time_scale: f64,
    /// Where finished transcripts are written, if anywhere.
    pub transcript_dir: Option<PathBuf>,
    sessions: AtomicU64,
    prefix: String,
}

impl Gateway {
    pub fn new(museum: MuseumMap, backend: Arc<dyn Backend>, config: EngineConfig) -> Self {
        let started = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            museum: Arc::new(museum),
            backend,
            config,
            time_scale: 1.0,
            transcript_dir: None,
            sessions: AtomicU64::new(0),
            prefix: format!("live-{started}"),
        }
    }

    pub fn with_time_scale(mut self, scale: f64) -> Self {
        self.time_scale = scale;
        self
    }

    pub fn with_transcript_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.transcript_dir = Some(dir.into());
        self
    }

    fn next_session_id(&self) -> String {
        let n = self.sessions.fetch_add(1, Ordering::Relaxed) + 1;
        format!("{}-{n:04}", self.prefix)
    }
}

pub fn router(gateway: Arc<Gateway>) -> Router {
    Router::new()
        .route("/ws", get(upgrade))
        .route("/museum", get(museum))
        .with_state(gateway)
}

/// Serves until the listener fails.
pub async fn serve(listener: TcpListener, gateway: Arc<Gateway>) -> std::io::Result<()> {
    axum::serve(listener, router(gateway)).await
}

async fn museum(State(gw): State<Arc<Gateway>>) -> impl IntoResponse {
    ([(header::CONTENT_TYPE, "application/json")], gw.museum.to_json())
}

async fn upgrade(ws: WebSocketUpgrade, State(gw): State<Arc<Gateway>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| run_connection(socket, gw))
}

type Sink = SplitSink<WebSocket, Message>;

struct Outbox<'s> {
    sink: &'s mut Sink,
    session_id: String,
    open: bool,
}

impl Outbox<'_> {
    async fn send(&mut self, at: f64, message: Outbound) {
        if !self.open {
            return;
        }
        let line = OutboundEnvelope {
            session_id: self.session_id.clone(),
            logical_time: at,
            message,
        }
        .to_line();
        if self.sink.send(Message::Text(line.into())).await.is_err() {
            self.open = false;
        }
    }

    async fn effects(&mut self, at: f64, effects: &[Effect]) {
        for e in effects {
            if let Some(m) = Outbound::from_effect(e) {
                self.send(at, m).await;
            }
        }
    }
}

async fn run_connection(socket: WebSocket, gw: Arc<Gateway>) {
    let session_id = gw.next_session_id();
    let state = match SessionState::new(&gw.museum, gw.config.clone(), session_id.clone()) {
        Ok(s) => s,
        Err(e) => {
            log::error!("cannot start session: {e}");
            return;
        }
    };
    log::info!("[{session_id}] connected");
    let (mut sink, mut stream) = socket.split();
    let mut out = Outbox {
        sink: &mut sink,
        session_id: session_id.clone(),
        open: true,
    };
    let mut driver = SessionDriver::new(&gw.museum, gw.backend.as_ref(), state);
    out.send(0.0, Outbound::pose(driver.state().nav.pose)).await;

    let started = Instant::now();
    let scale = gw.time_scale;
    let now = || started.elapsed().as_secs_f64() * scale;
    let mut connected = true;
    while !driver.state().is_done() {
        let wait = ((driver.next_internal_time() - now()) / scale).max(0.0);
        tokio::select! {
            biased;
            frame = stream.next() => match frame {
                Some(Ok(Message::Text(text))) => {
                    for parsed in parse_frame(&text) {
                        let t = now().max(driver.state().clock);
                        let fx = tokio::task::block_in_place(|| driver.advance_to(t));
                        for (at, e) in &fx {
                            out.effects(*at, std::slice::from_ref(e)).await;
                        }
                        if driver.state().is_done() {
                            break;
                        }
                        let t = t.max(driver.state().clock);
                        match parsed {
                            Ok(env) => {
                                let event = SessionEvent::new(t, env.message.into_event());
                                match tokio::task::block_in_place(|| driver.try_apply(event)) {
                                    Ok(fx) => out.effects(t, &fx).await,
                                    Err(e) => out.send(t, Outbound::Error { message: e.to_string() }).await,
                                }
                            }
                            Err(e) => out.send(t, Outbound::Error { message: format!("bad message: {e}") }).await,
                        }
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => {
                    connected = false;
                    break;
                }
                Some(Ok(_)) => {}
            },
            _ = tokio::time::sleep(Duration::from_secs_f64(wait)) => {
                let fx = tokio::task::block_in_place(|| driver.advance_to(now()));
                for (at, e) in &fx {
                    out.effects(*at, std::slice::from_ref(e)).await;
                }
            }
        }
        if !out.open {
            connected = false;
            break;
        }
    }

    let transcript = if connected {
        let mut state = driver.into_state();
        state.finalize();
        let at = state.clock;
        out.send(
            at,
            Outbound::TourSummary {
                transcript: Box::new(state.transcript.clone()),
            },
        )
        .await;
        let _ = out.sink.close().await;
        state.transcript
    } else {
        log::info!("[{session_id}] disconnected");
        tokio::task::block_in_place(|| wind_down(driver))
    };
    if let Some(dir) = &gw.transcript_dir {
        if !transcript.messages.is_empty() {
            let path = dir.join(format!("{}.json", transcript.session_id));
            // write then rename so readers never see a partial file
            let partial = path.with_extension("json.partial");
            let written = std::fs::create_dir_all(dir)
                .and_then(|_| transcript.write(&partial))
                .and_then(|_| std::fs::rename(&partial, &path));
            if let Err(e) = written {
                log::error!("cannot write {}: {e}", path.display());
            }
        }
    }
    log::info!("[{session_id}] finished");
}

/// Ends an orphaned session as if the visitor had asked to stop, then runs
/// the clock until the robot is back at the entrance.
fn wind_down(mut driver: SessionDriver<'_>) -> TranscriptRecord {
    let t = driver.state().clock;
    if !matches!(
        driver.state().phase,
        TourPhase::Idle | TourPhase::Ending | TourPhase::Done
    ) {
        driver.apply(SessionEvent::new(t, EventKind::EndRequest));
    }
    let limit = driver.state().transcript.start + driver.state().config.max_session_s;
    while !driver.state().is_done()
        && driver.state().clock <= limit
        && !(driver.state().phase == TourPhase::Idle && !driver.reply_pending())
    {
        driver.step_internal();
    }
    let mut state = driver.into_state();
    state.transcript.fault_flags.push("connection_lost".into());
    state.finalize();
    state.transcript
}
