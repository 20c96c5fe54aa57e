//! Simulation engine: deterministic RNG, the tick pipeline, the event
//! trace, metrics, and the mode/engagement rules shared by in-process and
//! wire-driven execution.

pub mod metrics;
pub mod rng;
pub mod sim;
pub mod trace;

pub use metrics::{Metrics, MetricsContext};
pub use rng::SplitMix64;
pub use sim::{run_scenario, Simulation, TrackObservation};
pub use trace::{EngagementOutcome, EventKind, SimTrace, TraceEvent, TraceHeader};

use crate::ids::{TrackId, WsId};
use crate::threat_eval::{Mode, WeightsConfig};

/// One shot in the air: fired, waiting for its impact time.
#[derive(Debug, Clone, PartialEq)]
pub struct EngagementEvent {
    pub ws: WsId,
    pub track: TrackId,
    pub fire_time: f64,
    pub impact_time: f64,
    /// Single-shot kill probability, lethality × effectiveness.
    pub sskp: f64,
    /// Firing order, for deterministic resolution of simultaneous impacts.
    pub fire_seq: u64,
}

/// Mode decision for one tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeDecision {
    Set(Mode),
    /// Threats and weapons are balanced: stay in the current mode.
    KeepCurrent,
}

/// Picks the defense mode from the threat/weapon balance: fewer threats
/// than operational weapons allows hunting every threat down
/// (subtractive); more threats than weapons forces triage by asset value
/// (preferential). A configured override always wins.
pub fn select_mode(
    alive_threats: usize,
    weapons_up: usize,
    config: &WeightsConfig,
) -> ModeDecision {
    if let Some(mode) = config.mode_override {
        return ModeDecision::Set(mode);
    }
    match alive_threats.cmp(&weapons_up) {
        std::cmp::Ordering::Less => ModeDecision::Set(Mode::Subtractive),
        std::cmp::Ordering::Greater => ModeDecision::Set(Mode::Preferential),
        std::cmp::Ordering::Equal => ModeDecision::KeepCurrent,
    }
}

/// Specializes the weights for a mode. The returned config routes every
/// pair weight and rank score through the matching mode factor (asset
/// priority in preferential mode, threat value in subtractive mode);
/// weight groups are renormalized if they drifted from 1. Idempotent.
pub fn apply_mode(mode: Mode, weights: &WeightsConfig) -> WeightsConfig {
    let mut out = weights.clone();
    out.active_mode = mode;

    fn renorm(values: &mut [&mut f64]) {
        let sum: f64 = values.iter().map(|v| **v).sum();
        if sum > 0.0 && (sum - 1.0).abs() > 1e-9 {
            for v in values {
                **v /= sum;
            }
        }
    }
    {
        let WeightsConfig { w_intent, w_capability, w_load, .. } = &mut out;
        renorm(&mut [w_intent, w_capability, w_load]);
    }
    {
        let WeightsConfig { intent_heading, intent_closing_speed, intent_time, .. } = &mut out;
        renorm(&mut [intent_heading, intent_closing_speed, intent_time]);
    }
    {
        let WeightsConfig { da_kill_capability, da_time, da_load, .. } = &mut out;
        renorm(&mut [da_kill_capability, da_time, da_load]);
    }
    {
        let WeightsConfig {
            ws_time, ws_elevation, ws_lethality, ws_stabilization, ws_rate_of_fire, ..
        } = &mut out;
        renorm(&mut [ws_time, ws_elevation, ws_lethality, ws_stabilization, ws_rate_of_fire]);
    }
    out
}

/// Resolves one due engagement with a single Bernoulli(sskp) draw.
pub fn resolve_engagement(event: &EngagementEvent, rng: &mut SplitMix64) -> EngagementOutcome {
    if rng.bernoulli(event.sskp) {
        EngagementOutcome::Kill
    } else {
        EngagementOutcome::Miss
    }
}
