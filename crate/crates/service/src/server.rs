use std::future::Future;
use std::net::SocketAddr;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::{SinkExt, StreamExt};
use motivsim::harness::Scenario;
use tokio::net::TcpListener;
use tokio::sync::{mpsc, oneshot};
use tokio::time::MissedTickBehavior;

use crate::protocol::{parse_command, Command, CommandError, ServerMessage};
use crate::session::{Applied, Session};

pub const DEFAULT_TICK_RATE: f64 = 20.0;
const INBOX: usize = 256;
const OUTBOX: usize = 1024;
/// A viewer that cannot take a message for this long is disconnected.
const SEND_TIMEOUT: Duration = Duration::from_secs(2);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServeConfig {
    /// Simulated ticks per second while running.
    pub tick_rate: f64,
    pub start_paused: bool,
    /// Hold the clock until the first viewer connects, so it sees tick 0.
    pub wait_for_viewer: bool,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            tick_rate: DEFAULT_TICK_RATE,
            start_paused: false,
            wait_for_viewer: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("invalid scenario: {0}")]
    Scenario(#[from] motivsim::CoreError),
    #[error("tick rate must be a positive number, got {0}")]
    TickRate(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

type ConnId = u64;

enum Inbound {
    Connect {
        outbox: mpsc::Sender<String>,
        reply: oneshot::Sender<ConnId>,
    },
    Command {
        conn: ConnId,
        command: Command,
    },
    Disconnect(ConnId),
}

struct Viewer {
    id: ConnId,
    outbox: mpsc::Sender<String>,
    every: u64,
    seq: u64,
}

impl Viewer {
    async fn send(&self, message: &ServerMessage) -> bool {
        self.outbox.send_timeout(message.to_text(), SEND_TIMEOUT).await.is_ok()
    }
}

/// A bound listener plus the simulation it will serve.
pub struct Server {
    listener: TcpListener,
    session: Session,
    config: ServeConfig,
}

impl Server {
    /// Binds the listening socket. A busy port is reported here, before
    /// any simulation work starts.
    pub async fn bind(addr: SocketAddr, scenario: Scenario, config: ServeConfig) -> Result<Server, ServeError> {
        if !(config.tick_rate.is_finite() && config.tick_rate > 0.0) {
            return Err(ServeError::TickRate(config.tick_rate));
        }
        let mut session = Session::new(scenario)?;
        session.set_paused(config.start_paused);
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| ServeError::Bind { addr, source })?;
        Ok(Server {
            listener,
            session,
            config,
        })
    }

    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run(self) -> Result<(), ServeError> {
        self.run_until(std::future::pending()).await
    }

    /// Serves `/ws` until `shutdown` resolves.
    pub async fn run_until(self, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
        let (tx, rx) = mpsc::channel(INBOX);
        let sim = tokio::spawn(simulation_loop(self.session, rx, self.config));
        let app = Router::new().route("/ws", get(upgrade)).with_state(tx);
        let served = axum::serve(self.listener, app).with_graceful_shutdown(shutdown).await;
        sim.abort();
        served.map_err(ServeError::from)
    }
}

async fn upgrade(ws: WebSocketUpgrade, State(inbox): State<mpsc::Sender<Inbound>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, inbox))
}

async fn connection(socket: WebSocket, inbox: mpsc::Sender<Inbound>) {
    let (mut sink, mut stream) = socket.split();
    let (outbox, mut pending) = mpsc::channel::<String>(OUTBOX);
    // the simulation holds the only strong sender: dropping the viewer there
    // ends the writer and closes the socket
    let errors = outbox.downgrade();
    let (id_tx, id_rx) = oneshot::channel();
    if inbox.send(Inbound::Connect { outbox, reply: id_tx }).await.is_err() {
        return;
    }
    let Ok(id) = id_rx.await else { return };

    let writer = async move {
        while let Some(text) = pending.recv().await {
            if sink.send(Message::Text(text.into())).await.is_err() {
                return;
            }
        }
        let _ = sink.send(Message::Close(None)).await;
    };

    let reader = async {
        while let Some(Ok(message)) = stream.next().await {
            let parsed = match message {
                Message::Text(text) => parse_command(text.as_str()),
                Message::Binary(_) => Err(CommandError::new("message", "expected a text message")),
                Message::Close(_) => break,
                Message::Ping(_) | Message::Pong(_) => continue,
            };
            match parsed {
                Ok(command) => {
                    if inbox.send(Inbound::Command { conn: id, command }).await.is_err() {
                        break;
                    }
                }
                Err(e) => {
                    log::debug!("viewer {id}: rejected message: {e}");
                    let Some(tx) = errors.upgrade() else { break };
                    if tx.send(ServerMessage::from(e).to_text()).await.is_err() {
                        break;
                    }
                }
            }
        }
    };

    tokio::select! {
        _ = writer => {}
        _ = reader => {}
    }
    let _ = inbox.send(Inbound::Disconnect(id)).await;
}

/// Sends the latest snapshot to every viewer whose interval divides the tick.
/// Viewers that stopped reading are dropped.
async fn broadcast(session: &Session, viewers: &mut Vec<Viewer>) {
    let Some(tick) = session.last_records().first().map(|r| r.tick) else {
        return;
    };
    let mut gone = Vec::new();
    for v in viewers.iter_mut() {
        if tick % v.every != 0 {
            continue;
        }
        let snapshot = session.snapshot(v.seq).expect("records present");
        if v.send(&snapshot).await {
            v.seq += 1;
        } else {
            gone.push(v.id);
        }
    }
    if !gone.is_empty() {
        log::warn!("dropping unresponsive viewers {gone:?}");
        viewers.retain(|v| !gone.contains(&v.id));
    }
}

async fn simulation_loop(mut session: Session, mut inbox: mpsc::Receiver<Inbound>, config: ServeConfig) {
    let mut interval = tokio::time::interval(Duration::from_secs_f64(1.0 / config.tick_rate));
    interval.set_missed_tick_behavior(MissedTickBehavior::Delay);
    let mut viewers: Vec<Viewer> = Vec::new();
    let mut next_id: ConnId = 0;
    let mut waiting = config.wait_for_viewer;

    loop {
        tokio::select! {
            biased;
            message = inbox.recv() => {
                let Some(message) = message else { break };
                match message {
                    Inbound::Connect { outbox, reply } => {
                        let mut viewer = Viewer { id: next_id, outbox, every: 1, seq: 0 };
                        next_id += 1;
                        if reply.send(viewer.id).is_err() {
                            continue;
                        }
                        if let Some(snapshot) = session.snapshot(0) {
                            if viewer.send(&snapshot).await {
                                viewer.seq = 1;
                            }
                        }
                        viewers.push(viewer);
                        if waiting {
                            waiting = false;
                            interval.reset();
                        }
                    }
                    Inbound::Disconnect(id) => viewers.retain(|v| v.id != id),
                    Inbound::Command { conn, command } => {
                        let reply = match session.apply_command(&command) {
                            Ok(Applied::Reply(reply)) => reply,
                            Ok(Applied::Step(n)) => {
                                for _ in 0..n {
                                    session.step();
                                    broadcast(&session, &mut viewers).await;
                                }
                                ServerMessage::Ok {
                                    id: None,
                                    value: Some(serde_json::json!({ "tick": session.simulation().tick() })),
                                }
                            }
                            Ok(Applied::SnapshotRate(every)) => {
                                if let Some(v) = viewers.iter_mut().find(|v| v.id == conn) {
                                    v.every = every;
                                }
                                ServerMessage::Ok { id: None, value: Some(serde_json::json!(every)) }
                            }
                            Err(e) => e.into(),
                        };
                        if let Some(v) = viewers.iter().find(|v| v.id == conn) {
                            if !v.send(&reply).await {
                                viewers.retain(|v| v.id != conn);
                            }
                        }
                    }
                }
            }
            _ = interval.tick(), if !session.is_paused() && !waiting => {
                session.step();
                broadcast(&session, &mut viewers).await;
            }
        }
    }
}
