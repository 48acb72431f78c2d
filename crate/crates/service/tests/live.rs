use std::net::SocketAddr;
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use motivsim::harness::{builtin, run, Scenario};
use motivsim::world::MotorBehavior;
use motivsim_service::{ServeConfig, ServeError, Server, ServerMessage};
use serde_json::{json, Value};
use tokio::net::TcpStream;
use tokio::sync::oneshot;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

const WAIT: Duration = Duration::from_secs(10);

struct Running {
    addr: SocketAddr,
    _stop: oneshot::Sender<()>,
}

async fn start(scenario: Scenario, config: ServeConfig) -> Running {
    let server = Server::bind("127.0.0.1:0".parse().unwrap(), scenario, config)
        .await
        .unwrap();
    let addr = server.local_addr().unwrap();
    let (stop, stopped) = oneshot::channel::<()>();
    tokio::spawn(server.run_until(async move {
        let _ = stopped.await;
    }));
    Running { addr, _stop: stop }
}

fn paused() -> ServeConfig {
    ServeConfig {
        start_paused: true,
        ..ServeConfig::default()
    }
}

struct Client(WebSocketStream<MaybeTlsStream<TcpStream>>);

impl Client {
    async fn connect(addr: SocketAddr) -> Client {
        let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws"))
            .await
            .unwrap();
        Client(ws)
    }

    async fn send(&mut self, v: Value) {
        self.0.send(Message::text(v.to_string())).await.unwrap();
    }

    async fn send_raw(&mut self, text: &str) {
        self.0.send(Message::text(text)).await.unwrap();
    }

    async fn recv(&mut self) -> ServerMessage {
        loop {
            let msg = tokio::time::timeout(WAIT, self.0.next())
                .await
                .expect("message in time")
                .unwrap()
                .unwrap();
            if let Message::Text(t) = msg {
                return serde_json::from_str(t.as_str()).unwrap();
            }
        }
    }

    /// Sends a command and collects everything up to and including its reply.
    async fn command(&mut self, v: Value) -> (Vec<ServerMessage>, ServerMessage) {
        self.send(v).await;
        let mut snapshots = Vec::new();
        loop {
            match self.recv().await {
                s @ ServerMessage::Snapshot { .. } => snapshots.push(s),
                reply => return (snapshots, reply),
            }
        }
    }

    async fn ok(&mut self, v: Value) -> (Vec<ServerMessage>, Option<u64>, Option<Value>) {
        match self.command(v).await {
            (snaps, ServerMessage::Ok { id, value }) => (snaps, id, value),
            (_, other) => panic!("expected ok, got {other:?}"),
        }
    }
}

fn tick_of(m: &ServerMessage) -> u64 {
    match m {
        ServerMessage::Snapshot { tick, .. } => *tick,
        other => panic!("{other:?}"),
    }
}

fn seq_of(m: &ServerMessage) -> u64 {
    match m {
        ServerMessage::Snapshot { seq, .. } => *seq,
        other => panic!("{other:?}"),
    }
}

fn first_animat(m: &ServerMessage) -> &motivsim::harness::TraceRecord {
    match m {
        ServerMessage::Snapshot { animats, .. } => &animats[0],
        other => panic!("{other:?}"),
    }
}

#[tokio::test]
async fn single_steps_give_consecutive_snapshots() {
    let server = start(builtin("scarce_food").unwrap(), ServeConfig::default()).await;
    let mut c = Client::connect(server.addr).await;
    let (_, _, value) = c.ok(json!({"type": "pause"})).await;
    let paused_at = value.unwrap()["tick"].as_u64().unwrap();
    let mut ticks = Vec::new();
    for _ in 0..3 {
        let (snaps, _, value) = c.ok(json!({"type": "step_n", "n": 1})).await;
        assert_eq!(snaps.len(), 1);
        ticks.push(tick_of(&snaps[0]));
        assert_eq!(value.unwrap()["tick"].as_u64().unwrap(), ticks.last().unwrap() + 1);
    }
    assert_eq!(ticks, vec![paused_at, paused_at + 1, paused_at + 2]);
    // paused: nothing else arrives
    assert!(tokio::time::timeout(Duration::from_millis(200), c.0.next())
        .await
        .is_err());
}

#[tokio::test]
async fn placed_food_draws_a_hungry_animat() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut c = Client::connect(server.addr).await;
    let (snaps, _, _) = c.ok(json!({"type": "step_n", "n": 1})).await;
    let a = first_animat(&snaps[0]).clone();
    assert!(a.internal.hunger > 0.9);
    let (x, y) = (a.x + 6.0 * a.heading.cos(), a.y + 6.0 * a.heading.sin());
    let (_, id, _) = c
        .ok(json!({"type": "place_entity", "kind": "food_source", "x": x, "y": y, "radius": 1.0, "magnitude": 50}))
        .await;
    let id = id.unwrap();
    let (snaps, _, _) = c.ok(json!({"type": "step_n", "n": 100})).await;
    assert_eq!(snaps.len(), 100);
    match &snaps[0] {
        ServerMessage::Snapshot { entities, .. } => assert!(entities.iter().any(|e| e.id == id)),
        other => panic!("{other:?}"),
    }
    let behaviors: Vec<_> = snaps.iter().map(|s| first_animat(s).behavior).collect();
    let switched = behaviors
        .iter()
        .position(|b| matches!(b, MotorBehavior::Approach | MotorBehavior::Eat));
    assert!(switched.is_some(), "{behaviors:?}");
    let hunger: Vec<f64> = snaps.iter().map(|s| first_animat(s).internal.hunger).collect();
    assert!(hunger.last().unwrap() < &a.internal.hunger);
}

#[tokio::test]
async fn larger_rho_gives_the_closed_form_step() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut c = Client::connect(server.addr).await;
    let mut steps = Vec::new();
    for rho in [1.0, 5.0] {
        let (_, _, value) = c
            .ok(json!({"type": "set_alpha_params", "column": "hunger", "rho": rho, "alpha": 0.0}))
            .await;
        assert_eq!(value.unwrap()["rho"], json!(rho));
        let (snaps, _, _) = c.ok(json!({"type": "step_n", "n": 1})).await;
        let alpha = first_animat(&snaps[0]).alpha.hunger;
        // g(rho) from alpha_min = 0 with delta = 100
        let expected = 1.0 / (100.0 - rho) - 1.0 / 100.0;
        assert!((alpha - expected).abs() < 1e-12, "rho {rho}: {alpha} vs {expected}");
        steps.push(alpha);
    }
    assert!(steps[1] > steps[0]);
}

#[tokio::test]
async fn malformed_messages_are_answered_and_connection_survives() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut c = Client::connect(server.addr).await;
    for (text, field) in [
        ("{oops", "message"),
        (r#"{"type":"warp"}"#, "type"),
        (r#"{"type":"place_entity","kind":"food_source","x":5}"#, "y"),
        (r#"{"type":"set_animat_state","state":"hunger","value":1.5}"#, "value"),
        (r#"{"type":"remove_entity","id":4242}"#, "id"),
    ] {
        c.send_raw(text).await;
        match c.recv().await {
            ServerMessage::Error { field: f, .. } => assert_eq!(f, field, "{text}"),
            other => panic!("{text}: {other:?}"),
        }
    }
    let (_, _, value) = c
        .ok(json!({"type": "set_animat_state", "state": "hunger", "value": 0.5}))
        .await;
    assert_eq!(value, Some(json!(0.5)));
}

#[tokio::test]
async fn served_run_matches_batch_trace() {
    let scenario = builtin("abundant_food").unwrap().with_seed(9);
    let expected = run(&scenario).unwrap().trace;
    let config = ServeConfig {
        tick_rate: 2000.0,
        ..ServeConfig::default()
    };
    let server = start(scenario, config).await;
    let mut c = Client::connect(server.addr).await;
    let mut matched = 0;
    let mut last_seq = None;
    while matched < 300 {
        let s = c.recv().await;
        let seq = seq_of(&s);
        if let Some(prev) = last_seq {
            assert_eq!(seq, prev + 1);
        }
        last_seq = Some(seq);
        let record = first_animat(&s);
        let Some(want) = expected.get(record.tick as usize) else {
            break;
        };
        assert_eq!(record, want);
        matched += 1;
    }
    assert_eq!(matched, 300);
}

#[tokio::test]
async fn waiting_server_starts_at_tick_zero() {
    let scenario = builtin("scarce_food").unwrap();
    let expected = run(&scenario).unwrap().trace;
    let config = ServeConfig {
        tick_rate: 5000.0,
        wait_for_viewer: true,
        ..ServeConfig::default()
    };
    let server = start(scenario, config).await;
    tokio::time::sleep(Duration::from_millis(50)).await;
    let mut c = Client::connect(server.addr).await;
    for (i, want) in expected.iter().take(100).enumerate() {
        let s = c.recv().await;
        assert_eq!(seq_of(&s), i as u64);
        assert_eq!(first_animat(&s), want);
    }
}

#[tokio::test]
async fn snapshot_rate_is_per_connection_and_immediate() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut a = Client::connect(server.addr).await;
    let mut b = Client::connect(server.addr).await;
    let (_, _, value) = a.ok(json!({"type": "set_snapshot_rate", "every": 5})).await;
    assert_eq!(value, Some(json!(5)));
    let (snaps, _, _) = a.ok(json!({"type": "step_n", "n": 20})).await;
    let ticks: Vec<u64> = snaps.iter().map(tick_of).collect();
    assert_eq!(ticks, vec![0, 5, 10, 15]);
    let seqs: Vec<u64> = snaps.iter().map(seq_of).collect();
    assert_eq!(seqs, vec![0, 1, 2, 3]);
    let mut other = Vec::new();
    for _ in 0..20 {
        other.push(b.recv().await);
    }
    assert_eq!(
        other.iter().map(tick_of).collect::<Vec<_>>(),
        (0..20).collect::<Vec<_>>()
    );
    assert_eq!(
        other.iter().map(seq_of).collect::<Vec<_>>(),
        (0..20).collect::<Vec<_>>()
    );
}

#[tokio::test]
async fn late_viewer_gets_current_state_first() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut a = Client::connect(server.addr).await;
    a.ok(json!({"type": "step_n", "n": 4})).await;
    let mut b = Client::connect(server.addr).await;
    let first = b.recv().await;
    assert_eq!((seq_of(&first), tick_of(&first)), (0, 3));
    match first {
        ServerMessage::Snapshot { paused, .. } => assert!(paused),
        _ => unreachable!(),
    }
}

#[tokio::test]
async fn reset_restarts_from_tick_zero() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut c = Client::connect(server.addr).await;
    c.ok(json!({"type": "step_n", "n": 10})).await;
    let (_, _, value) = c.ok(json!({"type": "reset_scenario"})).await;
    assert_eq!(value.unwrap()["tick"], 0);
    let (snaps, _, _) = c.ok(json!({"type": "step_n", "n": 1})).await;
    assert_eq!(tick_of(&snaps[0]), 0);
}

#[tokio::test]
async fn busy_port_is_a_startup_error() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let err = Server::bind(server.addr, builtin("scarce_food").unwrap(), paused())
        .await
        .err()
        .unwrap();
    assert!(matches!(err, ServeError::Bind { .. }), "{err}");
    let err = Server::bind(
        "127.0.0.1:0".parse().unwrap(),
        builtin("scarce_food").unwrap(),
        ServeConfig {
            tick_rate: 0.0,
            ..ServeConfig::default()
        },
    )
    .await
    .err()
    .unwrap();
    assert!(matches!(err, ServeError::TickRate(_)));
}

#[tokio::test]
async fn stalled_viewer_is_closed_without_gaps() {
    let server = start(builtin("scarce_food").unwrap(), paused()).await;
    let mut stalled = Client::connect(server.addr).await;
    let mut driver = Client::connect(server.addr).await;
    driver.ok(json!({"type": "set_snapshot_rate", "every": 1000})).await;
    let (_, _, value) = driver.ok(json!({"type": "step_n", "n": 40000})).await;
    assert_eq!(value.unwrap()["tick"], 40000);
    let mut expected_seq = 0;
    loop {
        match tokio::time::timeout(WAIT, stalled.0.next())
            .await
            .expect("stream ends in time")
        {
            Some(Ok(Message::Text(t))) => {
                let m: ServerMessage = serde_json::from_str(t.as_str()).unwrap();
                assert_eq!(seq_of(&m), expected_seq);
                expected_seq += 1;
            }
            Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
            Some(Ok(_)) => {}
        }
    }
    assert!(expected_seq < 40000, "viewer was never dropped");
}
