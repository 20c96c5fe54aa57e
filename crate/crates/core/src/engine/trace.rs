//! The event trace of one run: the unit of testing, replay, and metrics.
//!
//! Events are strictly ordered by (tick, seq); replaying the same scenario
//! and seed regenerates a byte-identical serialized trace.

use crate::ids::{DaId, ThreatClassId, TrackId, WsId};
use crate::threat_eval::Mode;
use crate::weapon_assign::ConstraintViolation;
use serde::{Deserialize, Serialize};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub version: u32,
    pub seed: u64,
    pub spec_hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EngagementOutcome {
    Kill,
    Miss,
}

/// Why a weapon's lock was dropped outside of normal resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReleaseReason {
    /// The engagement killed the target.
    Kill,
    /// The target left the battlespace.
    TargetExited,
    /// The target's path no longer crosses the weapon's field of fire.
    OutOfReach,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EventKind {
    TrackSpawned { track: TrackId, threat_class: ThreatClassId, x: f64, y: f64 },
    TrackUpdate { track: TrackId, x: f64, y: f64 },
    TrackExited { track: TrackId },
    ModeSwitch { from: Mode, to: Mode, alive: usize, weapons_up: usize },
    TeAssignment { track: TrackId, da: DaId, weight: f64, opportunity: f64 },
    TeUnassigned { track: TrackId },
    WaProposal { track: TrackId, ws: WsId, weight: f64 },
    WaLocked { track: TrackId, ws: WsId, weight: f64 },
    WaQueued { track: TrackId, ws: WsId, weight: f64 },
    WaBumped { track: TrackId, ws: WsId, by: TrackId },
    WaUnassigned { track: TrackId },
    Fire {
        ws: WsId,
        track: TrackId,
        fire_time: f64,
        impact_time: f64,
        sskp: f64,
        ammo_left: u32,
    },
    Resolution {
        ws: WsId,
        track: TrackId,
        outcome: EngagementOutcome,
        impact_time: f64,
    },
    LockReleased {
        ws: WsId,
        track: TrackId,
        reason: ReleaseReason,
        promoted: Option<TrackId>,
    },
    Leak { track: TrackId, da: DaId },
    DaDamaged { da: DaId },
    ConstraintViolations { violations: Vec<ConstraintViolation> },
}

impl EventKind {
    /// Whether this event records a pipeline decision (as opposed to plain
    /// observation bookkeeping). Wire-driven and in-process runs of the
    /// same scenario must agree on exactly this subsequence.
    pub fn is_decision(&self) -> bool {
        matches!(
            self,
            EventKind::TeAssignment { .. }
                | EventKind::TeUnassigned { .. }
                | EventKind::WaLocked { .. }
                | EventKind::WaQueued { .. }
                | EventKind::WaBumped { .. }
                | EventKind::WaUnassigned { .. }
                | EventKind::Fire { .. }
                | EventKind::Resolution { .. }
                | EventKind::ModeSwitch { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub tick: u64,
    pub seq: u64,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// Timestamped event log of one deterministic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub header: TraceHeader,
    pub events: Vec<TraceEvent>,
}

impl SimTrace {
    pub fn new(seed: u64, spec_hash: String) -> Self {
        Self {
            header: TraceHeader {
                version: TRACE_VERSION,
                seed,
                spec_hash,
            },
            events: Vec::new(),
        }
    }

    pub fn push(&mut self, tick: u64, seq: u64, kind: EventKind) {
        debug_assert!(
            self.events
                .last()
                .map(|e| (e.tick, e.seq) < (tick, seq))
                .unwrap_or(true),
            "events must be strictly ordered by (tick, seq)"
        );
        self.events.push(TraceEvent { tick, seq, kind });
    }

    /// The decision subsequence, for equivalence checks across transports.
    pub fn decisions(&self) -> Vec<&TraceEvent> {
        self.events.iter().filter(|e| e.kind.is_decision()).collect()
    }
}
