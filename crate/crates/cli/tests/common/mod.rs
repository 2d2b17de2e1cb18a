#![allow(dead_code)]

use futures::{SinkExt, StreamExt};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};
use tourguide_cli::commands::load_museum;
use tourguide_cli::gateway::{serve, Gateway};
use tourguide_core::engine::EngineConfig;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn gateway(time_scale: f64) -> Gateway {
    let museum = load_museum(&fixture("museum.json")).unwrap();
    let config = EngineConfig::load(fixture("engine.toml")).unwrap();
    let backend = config.backend.build().unwrap();
    Gateway::new(museum, Arc::from(backend), config).with_time_scale(time_scale)
}

/// Starts a gateway on an ephemeral port and returns its address.
pub async fn start(gw: Gateway) -> String {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap().to_string();
    tokio::spawn(serve(listener, Arc::new(gw)));
    addr
}

pub struct Client {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    pub received: Vec<Value>,
}

impl Client {
    pub async fn connect(addr: &str) -> Self {
        let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws"))
            .await
            .unwrap();
        Self {
            ws,
            received: Vec::new(),
        }
    }

    pub async fn send(&mut self, line: &str) {
        self.ws.send(Message::text(format!("{line}\n"))).await.unwrap();
    }

    /// Next message, or `None` once the server closes or `wait` elapses.
    pub async fn next(&mut self, wait: Duration) -> Option<Value> {
        loop {
            match tokio::time::timeout(wait, self.ws.next()).await {
                Ok(Some(Ok(Message::Text(t)))) => {
                    assert!(t.ends_with('\n'), "frame is not newline-terminated: {t}");
                    let v: Value = serde_json::from_str(t.trim_end()).unwrap();
                    self.received.push(v.clone());
                    return Some(v);
                }
                Ok(Some(Ok(Message::Close(_)))) | Ok(None) | Ok(Some(Err(_))) | Err(_) => return None,
                Ok(Some(Ok(_))) => {}
            }
        }
    }

    /// Reads until a message satisfies `pred`; panics after `wait` without one.
    pub async fn until(&mut self, wait: Duration, pred: impl Fn(&Value) -> bool) -> Value {
        let deadline = tokio::time::Instant::now() + wait;
        loop {
            let left = deadline.saturating_duration_since(tokio::time::Instant::now());
            match self.next(left).await {
                Some(v) if pred(&v) => return v,
                Some(_) => {}
                None => panic!("no matching message; got {:#?}", self.received),
            }
        }
    }

    pub async fn close(mut self) {
        let _ = self.ws.close(None).await;
    }
}

pub fn is(kind: &str) -> impl Fn(&Value) -> bool + '_ {
    move |v| v["type"] == kind
}

pub fn is_phase(phase: &str) -> impl Fn(&Value) -> bool + '_ {
    move |v| v["type"] == "phase_change" && v["phase"] == phase
}
