//! Newline-delimited socket protocol between an external simulator and the
//! engine.
//!
//! Every message is one JSON line `{"type": ..., "tick": N, "payload":
//! {...}}`; no pipelining within a tick. A session is: Hello exchange,
//! then per tick any number of TrackUpdate messages followed by one Tick.
//! The engine runs one pipeline step and answers with zero or more
//! EngagementOrder and EngagementResult messages, closed by a Tick
//! acknowledgment whose payload carries `done`. Tick 0 is observation
//! only. Malformed input earns an Error reply and the session continues;
//! Bye (or EOF) ends it cleanly.

use crate::engine::trace::{EventKind, SimTrace};
use crate::engine::{Simulation, TrackObservation};
use crate::geometry::Point2;
use crate::ids::{ThreatClassId, TrackId};
use crate::io::scenario::{MotionState, ScenarioError, ScenarioSpec};
use crate::library::Libraries;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use thiserror::Error;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unexpected message {got} while waiting for {expected}")]
    Unexpected { expected: &'static str, got: String },
    #[error("peer reported error: {0}")]
    Peer(String),
    #[error("scenario error: {0}")]
    Scenario(#[from] ScenarioError),
}

/// One wire message, as the flat envelope `{type, tick, payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    #[serde(rename = "type")]
    pub kind: String,
    pub tick: u64,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackUpdatePayload {
    pub track_id: TrackId,
    pub threat_class: ThreatClassId,
    pub altitude: f64,
    pub value: f64,
    #[serde(default)]
    pub x: Option<f64>,
    #[serde(default)]
    pub y: Option<f64>,
    #[serde(default)]
    pub exited: bool,
}

impl TrackUpdatePayload {
    fn observation(&self) -> TrackObservation {
        TrackObservation {
            track_id: self.track_id.clone(),
            threat_class: self.threat_class.clone(),
            altitude: self.altitude,
            value: self.value,
            position: match (self.x, self.y) {
                (Some(x), Some(y)) => Some(Point2::new(x, y)),
                _ => None,
            },
            exited: self.exited,
        }
    }
}

fn write_line(out: &mut impl Write, env: &Envelope) -> Result<(), ProtocolError> {
    let line = serde_json::to_string(env).expect("envelope serializes");
    out.write_all(line.as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn error_reply(tick: u64, reason: &str) -> Envelope {
    Envelope {
        kind: "Error".into(),
        tick,
        payload: json!({ "reason": reason }),
    }
}

/// Runs one engine-side session over any line stream. Returns the session
/// trace (a valid [`SimTrace`], identical in decisions to an in-process
/// run fed the same observations).
pub fn serve_session<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    spec: &ScenarioSpec,
    libraries: Libraries,
    seed_override: Option<u64>,
) -> Result<SimTrace, ProtocolError> {
    let mut sim = Simulation::from_deployment(spec, libraries, seed_override)?;
    let mut pending_obs: Vec<TrackObservation> = Vec::new();
    let mut greeted = false;
    let mut first_tick_done = false;
    let mut events_emitted = 0usize;

    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let env: Envelope = match serde_json::from_str(&line) {
            Ok(env) => env,
            Err(e) => {
                write_line(&mut writer, &error_reply(sim.tick(), &format!("bad message: {e}")))?;
                continue;
            }
        };
        match env.kind.as_str() {
            "Hello" => {
                let version = env.payload.get("version").and_then(Value::as_u64);
                if version != Some(PROTOCOL_VERSION as u64) {
                    write_line(
                        &mut writer,
                        &error_reply(env.tick, &format!("unsupported version {version:?}")),
                    )?;
                    continue;
                }
                greeted = true;
                write_line(
                    &mut writer,
                    &Envelope {
                        kind: "Hello".into(),
                        tick: 0,
                        payload: json!({ "version": PROTOCOL_VERSION }),
                    },
                )?;
            }
            "TrackUpdate" => {
                if !greeted {
                    write_line(&mut writer, &error_reply(env.tick, "Hello first"))?;
                    continue;
                }
                match serde_json::from_value::<TrackUpdatePayload>(env.payload.clone()) {
                    Ok(p) => pending_obs.push(p.observation()),
                    Err(e) => {
                        write_line(
                            &mut writer,
                            &error_reply(env.tick, &format!("bad TrackUpdate: {e}")),
                        )?;
                    }
                }
            }
            "Tick" => {
                if !greeted {
                    write_line(&mut writer, &error_reply(env.tick, "Hello first"))?;
                    continue;
                }
                let expected = if first_tick_done { sim.tick() + 1 } else { 0 };
                if env.tick != expected {
                    write_line(
                        &mut writer,
                        &error_reply(
                            env.tick,
                            &format!("out-of-order tick {} (expected {expected})", env.tick),
                        ),
                    )?;
                    pending_obs.clear();
                    continue;
                }
                if env.tick == 0 {
                    sim.observe_initial(&pending_obs);
                } else {
                    sim.step_external(&pending_obs);
                }
                first_tick_done = true;
                pending_obs.clear();

                // Report this tick's orders and results off the trace.
                let events = &sim.trace().events[events_emitted..];
                let mut replies = Vec::new();
                for ev in events {
                    match &ev.kind {
                        EventKind::Fire { ws, track, fire_time, impact_time, sskp, .. } => {
                            replies.push(Envelope {
                                kind: "EngagementOrder".into(),
                                tick: env.tick,
                                payload: json!({
                                    "ws": ws, "track": track,
                                    "fire_time": fire_time,
                                    "impact_time": impact_time,
                                    "sskp": sskp,
                                }),
                            });
                        }
                        EventKind::Resolution { ws, track, outcome, impact_time } => {
                            replies.push(Envelope {
                                kind: "EngagementResult".into(),
                                tick: env.tick,
                                payload: json!({
                                    "ws": ws, "track": track,
                                    "outcome": outcome,
                                    "impact_time": impact_time,
                                }),
                            });
                        }
                        _ => {}
                    }
                }
                events_emitted = sim.trace().events.len();
                for reply in replies {
                    write_line(&mut writer, &reply)?;
                }
                write_line(
                    &mut writer,
                    &Envelope {
                        kind: "Tick".into(),
                        tick: env.tick,
                        payload: json!({ "done": sim.session_done() }),
                    },
                )?;
            }
            "Bye" => {
                write_line(
                    &mut writer,
                    &Envelope { kind: "Bye".into(), tick: env.tick, payload: Value::Null },
                )?;
                break;
            }
            other => {
                write_line(
                    &mut writer,
                    &error_reply(env.tick, &format!("unknown message type {other:?}")),
                )?;
            }
        }
    }
    Ok(sim.into_trace())
}

/// Accepts a single simulator connection on `listener` and serves it.
pub fn serve_protocol(
    listener: &TcpListener,
    spec: &ScenarioSpec,
    libraries: Libraries,
    seed_override: Option<u64>,
) -> Result<SimTrace, ProtocolError> {
    let (stream, _addr) = listener.accept()?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_session(reader, stream, spec, libraries, seed_override)
}

/// Outcome of one driven wire session, from the client's perspective.
#[derive(Debug, Clone, Default)]
pub struct WireRunReport {
    pub orders: Vec<Envelope>,
    pub results: Vec<Envelope>,
    pub errors: Vec<String>,
    pub ticks: u64,
}

/// Drives a full scenario over an established stream, playing the external
/// simulator: it advances the scenario flight plans itself, feeds
/// TrackUpdate messages each tick, and stops sending updates for threats
/// the engine reports killed.
pub fn drive_scenario<R: BufRead, W: Write>(
    mut reader: R,
    mut writer: W,
    spec: &ScenarioSpec,
    libraries: &Libraries,
) -> Result<WireRunReport, ProtocolError> {
    let mut report = WireRunReport::default();

    write_line(
        &mut writer,
        &Envelope {
            kind: "Hello".into(),
            tick: 0,
            payload: json!({ "version": PROTOCOL_VERSION }),
        },
    )?;
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let hello: Envelope =
        serde_json::from_str(&line).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    if hello.kind != "Hello" {
        return Err(ProtocolError::Unexpected { expected: "Hello", got: hello.kind });
    }

    let motions: BTreeMap<TrackId, _> = spec
        .threats
        .iter()
        .map(|t| (t.track_id.clone(), t.motion()))
        .collect();
    let meta: BTreeMap<TrackId, (ThreatClassId, f64, f64)> = spec
        .threats
        .iter()
        .map(|t| {
            // Same default the engine applies: the class value.
            let value = t.value.unwrap_or_else(|| {
                libraries
                    .threat_class_or_unknown(&t.threat_class)
                    .map(|r| r.value)
                    .unwrap_or(0.5)
            });
            (
                t.track_id.clone(),
                (t.threat_class.clone(), t.altitude, value),
            )
        })
        .collect();
    let mut dead: BTreeSet<TrackId> = BTreeSet::new();
    let mut known: BTreeSet<TrackId> = BTreeSet::new();

    let max_ticks = (spec.max_time / spec.dt).round() as u64;
    for tick in 0..=max_ticks {
        let clock = tick as f64 * spec.dt;
        for (id, motion) in &motions {
            if dead.contains(id) {
                continue;
            }
            let (class, altitude, value) = meta[id].clone();
            let payload = match motion.state_at(clock) {
                MotionState::NotSpawned => continue,
                MotionState::Active(pos) => {
                    known.insert(id.clone());
                    TrackUpdatePayload {
                        track_id: id.clone(),
                        threat_class: class,
                        altitude,
                        value,
                        x: Some(pos.x),
                        y: Some(pos.y),
                        exited: false,
                    }
                }
                MotionState::Done => {
                    if !known.contains(id) {
                        continue;
                    }
                    dead.insert(id.clone());
                    TrackUpdatePayload {
                        track_id: id.clone(),
                        threat_class: class,
                        altitude,
                        value,
                        x: None,
                        y: None,
                        exited: true,
                    }
                }
            };
            write_line(
                &mut writer,
                &Envelope {
                    kind: "TrackUpdate".into(),
                    tick,
                    payload: serde_json::to_value(&payload).expect("payload serializes"),
                },
            )?;
        }
        write_line(
            &mut writer,
            &Envelope { kind: "Tick".into(), tick, payload: Value::Null },
        )?;

        // Collect replies until the Tick acknowledgment.
        let server_done = loop {
            let mut line = String::new();
            if reader.read_line(&mut line)? == 0 {
                return Err(ProtocolError::Malformed("connection closed mid-tick".into()));
            }
            let env: Envelope = serde_json::from_str(&line)
                .map_err(|e| ProtocolError::Malformed(e.to_string()))?;
            match env.kind.as_str() {
                "EngagementOrder" => report.orders.push(env),
                "EngagementResult" => {
                    if env.payload.get("outcome").and_then(Value::as_str) == Some("Kill") {
                        if let Some(track) =
                            env.payload.get("track").and_then(Value::as_str)
                        {
                            dead.insert(TrackId::from(track));
                        }
                    }
                    report.results.push(env);
                }
                "Error" => {
                    report.errors.push(env.payload.to_string());
                }
                "Tick" => {
                    break env.payload.get("done").and_then(Value::as_bool).unwrap_or(false)
                }
                other => {
                    return Err(ProtocolError::Unexpected { expected: "Tick", got: other.into() })
                }
            }
        };
        report.ticks = tick;
        // Stop once the engine reports every announced track terminal AND
        // this side has nothing left to feed it. The engine alone cannot
        // see threats that have not spawned yet.
        let all_fed = motions.iter().all(|(id, m)| {
            dead.contains(id) || matches!(m.state_at(clock), MotionState::Done)
        });
        if server_done && all_fed {
            break;
        }
    }

    write_line(&mut writer, &Envelope { kind: "Bye".into(), tick: report.ticks, payload: Value::Null })?;
    let mut line = String::new();
    let _ = reader.read_line(&mut line); // Bye ack, best effort
    Ok(report)
}

/// Convenience for tests: serves one session on an ephemeral local port
/// while driving the scenario from a second thread, returning the server's
/// trace and the client's report.
pub fn wire_roundtrip(
    spec: &ScenarioSpec,
    libraries: Libraries,
    seed_override: Option<u64>,
) -> Result<(SimTrace, WireRunReport), ProtocolError> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    let client_spec = spec.clone();
    let client_libs = libraries.clone();
    let client = std::thread::spawn(move || -> Result<WireRunReport, ProtocolError> {
        let stream = TcpStream::connect(addr)?;
        let reader = BufReader::new(stream.try_clone()?);
        drive_scenario(reader, stream, &client_spec, &client_libs)
    });
    let trace = serve_protocol(&listener, spec, libraries, seed_override)?;
    let report = client.join().expect("client thread")?;
    Ok((trace, report))
}
