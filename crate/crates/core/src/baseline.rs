//! Greedy target-by-target comparator and an exhaustive enumeration
//! oracle, for quantifying the two-stage pipeline's solution quality.
//!
//! The greedy assigner processes threats once, best first, and each takes
//! the single heaviest feasible (asset, weapon) slot still open — quotas
//! and weapon capacities are respected, but earlier choices are never
//! revisited, so it can strand later threats. The oracle enumerates every
//! capacity-feasible schedule of a small instance by dynamic programming
//! over weapon capacities and is exact by construction.

use crate::ids::{DaId, TrackId, WsId};
use crate::library::Libraries;
use crate::threat_eval::{
    assign_threats_to_das, da_kill_capability, da_pair_weight, opportunity, rank_threats,
    threat_indices, DaStatus, DefendedAsset, ThreatDaMatching, TrackState, WeightsConfig,
};
use crate::weapon_assign::{
    assign_threats_to_ws, build_candidates, candidate_ws, ScheduledThreat, WaEvent, WeaponSystem,
    WsSchedule,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive enumeration (limit 8x8)")]
    InstanceTooLarge,
}

/// Total pair weight of a schedule under a common yardstick: the sum over
/// every held slot (locked and queued) of that pairing's weight in the
/// instance. Valuing all comparands against one weight matrix keeps the
/// comparison meaningful.
pub fn schedule_value(schedule: &WsSchedule, instance: &WaInstance) -> f64 {
    schedule
        .slots()
        .flat_map(|(ws, slot)| {
            slot.locked
                .iter()
                .chain(slot.queue.iter())
                .map(move |s| (s.track.clone(), ws.clone()))
        })
        .filter_map(|pair| instance.weights.get(&pair))
        .sum()
}

/// One-pass greedy assignment: threats sorted by raw opportunity
/// (descending, ties by id), each taking the heaviest feasible slot
/// available at that moment. Capacities (asset quota, weapon lock+queue)
/// are honored; choices are final.
pub fn greedy_assign(
    tracks: &[&TrackState],
    das: &[DefendedAsset],
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    weights: &WeightsConfig,
) -> (ThreatDaMatching, WsSchedule) {
    // Raw opportunity: the best over all assets.
    let mut order: Vec<(f64, &TrackState)> = tracks
        .iter()
        .map(|t| {
            let best = das
                .iter()
                .map(|da| {
                    let idx = threat_indices(t, da, libraries, weights);
                    opportunity(idx.intent, idx.capability, weights)
                })
                .fold(0.0, f64::max);
            (best, *t)
        })
        .collect();
    order.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.track_id.cmp(&b.1.track_id))
    });

    // A slot's score composes both stages' pair weights: a target-by-
    // target system evaluates the same parametric equations, it just
    // commits immediately and never revisits. Slot entries carry the
    // weapon-pair weight, like the pipeline's schedule.
    let mut matching = ThreatDaMatching::default();
    let mut schedule = WsSchedule::default();
    let mut da_held: BTreeMap<&DaId, usize> = BTreeMap::new();

    for (_, track) in order {
        let mut best: Option<(f64, f64, &DaId, WsId)> = None;
        for da in das {
            if da.status != DaStatus::FreeToFire {
                continue;
            }
            if da_held.get(&da.da_id).copied().unwrap_or(0) >= da.quota {
                continue;
            }
            let kc = da_kill_capability(da, weapons, libraries, &track.threat_class);
            if kc < weights.capability_threshold {
                continue;
            }
            let idx = threat_indices(track, da, libraries, weights);
            let da_weight = da_pair_weight(kc, &idx, 0.0, weights)
                * weights.mode_factor(da.priority, track.value);
            for cand in candidate_ws(track, da, weapons, libraries, weights, 0.0) {
                if schedule.scheduled_count(&cand.ws_id) >= 2 {
                    continue;
                }
                let score = da_weight * cand.pair_weight;
                let better = match &best {
                    None => true,
                    Some((s, _, _, ws)) => score > *s || (score == *s && cand.ws_id < *ws),
                };
                if better {
                    best = Some((score, cand.pair_weight, &da.da_id, cand.ws_id.clone()));
                }
            }
        }
        match best {
            Some((_, weight, da_id, ws_id)) => {
                let slot = schedule.slot_mut(&ws_id);
                let entry = ScheduledThreat {
                    track: track.track_id.clone(),
                    weight,
                    since: 0.0,
                };
                if slot.locked.is_empty() {
                    slot.locked.push(entry);
                } else {
                    slot.queue.push(entry);
                }
                matching
                    .assignment
                    .insert(track.track_id.clone(), da_id.clone());
                *da_held.entry(da_id).or_default() += 1;
            }
            None => {
                matching.unassigned.insert(track.track_id.clone());
            }
        }
    }
    (matching, schedule)
}

/// The full two-stage pipeline as a one-shot assignment (no engine loop):
/// stable threat→asset matching, ranking, then the weapon proposal pass.
pub fn two_stage_assign(
    tracks: &[&TrackState],
    das: &[DefendedAsset],
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    weights: &WeightsConfig,
) -> (ThreatDaMatching, WsSchedule, Vec<WaEvent>) {
    let te = assign_threats_to_das(
        tracks,
        das,
        weapons,
        libraries,
        weights,
        &BTreeMap::new(),
        &BTreeMap::new(),
    );
    let da_priority: BTreeMap<DaId, f64> =
        das.iter().map(|da| (da.da_id.clone(), da.priority)).collect();
    let values: BTreeMap<TrackId, f64> = tracks
        .iter()
        .map(|t| (t.track_id.clone(), t.value))
        .collect();
    let ranked = rank_threats(&te.matching, &te.indices, &da_priority, &values, weights);
    let das_by_id: BTreeMap<DaId, DefendedAsset> =
        das.iter().map(|da| (da.da_id.clone(), da.clone())).collect();
    let candidates = build_candidates(
        tracks,
        &te.matching.assignment,
        &das_by_id,
        weapons,
        libraries,
        weights,
        0.0,
    );
    let mut schedule = WsSchedule::default();
    let events = assign_threats_to_ws(&ranked, &candidates, &mut schedule, 0.0)
        .expect("proposal pass keeps the schedule valid");
    (te.matching, schedule, events)
}

/// A bare scheduling instance: feasible (threat, weapon) pair weights.
#[derive(Debug, Clone, Default)]
pub struct WaInstance {
    pub threats: Vec<TrackId>,
    pub weapons: Vec<WsId>,
    pub weights: BTreeMap<(TrackId, WsId), f64>,
}

impl WaInstance {
    /// Builds the instance the oracle optimizes over: every (threat,
    /// weapon) pair that passes the weapon-level feasibility gate. The
    /// pair weight is the composed slot score the system itself pursues —
    /// the threat/asset pair weight of the weapon's owning asset times the
    /// threat/weapon pair weight. Asset gating (status, quota) is ignored,
    /// so the oracle's feasible set is a superset of what greedy and the
    /// two-stage pipeline may use and its optimum upper-bounds both.
    pub fn from_state(
        tracks: &[&TrackState],
        das: &[DefendedAsset],
        weapons: &BTreeMap<WsId, WeaponSystem>,
        libraries: &Libraries,
        weights: &WeightsConfig,
    ) -> Self {
        let mut instance = WaInstance {
            threats: tracks.iter().map(|t| t.track_id.clone()).collect(),
            weapons: weapons.keys().cloned().collect(),
            weights: BTreeMap::new(),
        };
        for track in tracks {
            for da in das {
                let kc = da_kill_capability(da, weapons, libraries, &track.threat_class);
                let idx = threat_indices(track, da, libraries, weights);
                let da_weight = da_pair_weight(kc, &idx, 0.0, weights)
                    * weights.mode_factor(da.priority, track.value);
                for cand in candidate_ws(track, da, weapons, libraries, weights, 0.0) {
                    instance
                        .weights
                        .entry((track.track_id.clone(), cand.ws_id.clone()))
                        .or_insert(da_weight * cand.pair_weight);
                }
            }
        }
        instance
    }
}

const ORACLE_LIMIT: usize = 8;
const WS_CAPACITY: usize = 2;

/// Exact maximum-total-weight schedule by enumeration: each threat takes
/// at most one slot, each weapon holds at most two threats. Dynamic
/// programming over (threat index, per-weapon remaining capacity).
pub fn exhaustive_oracle(
    instance: &WaInstance,
) -> Result<(f64, BTreeMap<TrackId, WsId>), OracleError> {
    let n = instance.threats.len();
    let m = instance.weapons.len();
    if n > ORACLE_LIMIT || m > ORACLE_LIMIT {
        return Err(OracleError::InstanceTooLarge);
    }
    if n == 0 || m == 0 {
        return Ok((0.0, BTreeMap::new()));
    }

    // Capacity vectors encoded base-(WS_CAPACITY+1).
    let states = (WS_CAPACITY + 1).pow(m as u32);
    let mut value = vec![vec![f64::NEG_INFINITY; states]; n + 1];
    // Choice per (threat, state): None = skip, Some(w) = weapon index.
    let mut choice: Vec<Vec<Option<usize>>> = vec![vec![None; states]; n];

    value[n].fill(0.0);
    for i in (0..n).rev() {
        let t = &instance.threats[i];
        for s in 0..states {
            // Skipping the threat is always allowed.
            let mut best = value[i + 1][s];
            let mut pick = None;
            for (w, ws) in instance.weapons.iter().enumerate() {
                let used = (s / pow3(w)) % (WS_CAPACITY + 1);
                if used >= WS_CAPACITY {
                    continue;
                }
                let Some(&weight) = instance.weights.get(&(t.clone(), ws.clone())) else {
                    continue;
                };
                let next = s + pow3(w);
                let candidate = weight + value[i + 1][next];
                if candidate > best {
                    best = candidate;
                    pick = Some(w);
                }
            }
            value[i][s] = best;
            choice[i][s] = pick;
        }
    }

    // Rebuild one optimal assignment.
    let mut assignment = BTreeMap::new();
    let mut s = 0usize;
    for (t, row) in instance.threats.iter().zip(&choice) {
        if let Some(w) = row[s] {
            assignment.insert(t.clone(), instance.weapons[w].clone());
            s += pow3(w);
        }
    }
    Ok((value[0][0], assignment))
}

fn pow3(i: usize) -> usize {
    (WS_CAPACITY + 1).pow(i as u32)
}

/// Total weight of an explicit assignment under an instance.
pub fn assignment_value(instance: &WaInstance, assignment: &BTreeMap<TrackId, WsId>) -> f64 {
    assignment
        .iter()
        .filter_map(|(t, w)| instance.weights.get(&(t.clone(), w.clone())))
        .sum()
}
