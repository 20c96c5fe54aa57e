//! Stage 2: weapon scheduling.
//!
//! For each threat, in the order fixed by stage 1, builds the feasible
//! weapon candidate set of its assigned asset, scores each candidate, and
//! runs a proposal procedure under the hard schedule constraints: at most
//! two threats per weapon (one locked, one queued), at most one lock per
//! threat, and no weapon below the capability threshold ever engages.
//!
//! A queued threat can be bumped by a heavier proposal and resumes
//! proposing further down its own list; locks are never bumped — they
//! model an engagement physically in progress.

use crate::geometry::{
    euclidean_distance, required_elevation, sector_intercept, solve_intercept, Point2, Sector,
};
use crate::ids::{DaId, TrackId, WeaponClassId, WsId};
use crate::library::Libraries;
use crate::threat_eval::{DefendedAsset, TrackState, WeightsConfig};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WsCondition {
    Up,
    Down,
    Destroyed,
}

/// One weapon system: an armed sector attached to a defended asset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeaponSystem {
    pub ws_id: WsId,
    pub da_id: DaId,
    pub weapon_class: WeaponClassId,
    pub position: Point2,
    /// Field of fire: range circle plus start/sweep angles.
    pub sector: Sector,
    /// Maximum elevation the mount can reach, radians.
    pub max_elevation: f64,
    pub projectile_speed: f64,
    /// Rounds per second.
    pub rate_of_fire: f64,
    /// Settling time after acquiring a lock before the first shot, s.
    pub stabilization_time: f64,
    pub lethality_index: f64,
    pub condition: WsCondition,
    pub ammo: u32,
}

/// A threat holding a schedule slot on some weapon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledThreat {
    pub track: TrackId,
    pub weight: f64,
    /// Clock time the slot was taken; stabilization counts from here.
    pub since: f64,
}

/// The two slots of one weapon: the engaged lock and the waiting queue.
/// Vecs so that invalid states remain representable for
/// [`check_constraints`]; valid schedules keep each at length <= 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WsSlot {
    pub locked: Vec<ScheduledThreat>,
    pub queue: Vec<ScheduledThreat>,
}

/// The full weapon schedule: per-weapon lock and queue assignments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WsSchedule {
    slots: BTreeMap<WsId, WsSlot>,
}

impl WsSchedule {
    pub fn slot(&self, ws: &WsId) -> Option<&WsSlot> {
        self.slots.get(ws)
    }

    pub fn slot_mut(&mut self, ws: &WsId) -> &mut WsSlot {
        self.slots.entry(ws.clone()).or_default()
    }

    pub fn slots(&self) -> impl Iterator<Item = (&WsId, &WsSlot)> {
        self.slots.iter()
    }

    pub fn scheduled_count(&self, ws: &WsId) -> usize {
        self.slots
            .get(ws)
            .map(|s| s.locked.len() + s.queue.len())
            .unwrap_or(0)
    }

    /// Load on a weapon in [0, 1]: scheduled count over the capacity of 2.
    pub fn load(&self, ws: &WsId) -> f64 {
        (self.scheduled_count(ws) as f64 / 2.0).clamp(0.0, 1.0)
    }

    pub fn locked(&self, ws: &WsId) -> Option<&ScheduledThreat> {
        self.slots.get(ws).and_then(|s| s.locked.first())
    }

    pub fn queued(&self, ws: &WsId) -> Option<&ScheduledThreat> {
        self.slots.get(ws).and_then(|s| s.queue.first())
    }

    /// Weapon currently locking this track, if any.
    pub fn lock_of(&self, track: &TrackId) -> Option<&WsId> {
        self.slots
            .iter()
            .find(|(_, slot)| slot.locked.iter().any(|s| &s.track == track))
            .map(|(ws, _)| ws)
    }

    pub fn is_scheduled(&self, track: &TrackId) -> bool {
        self.slots.values().any(|slot| {
            slot.locked.iter().chain(slot.queue.iter()).any(|s| &s.track == track)
        })
    }

    /// Tracks scheduled anywhere, in id order.
    pub fn scheduled_tracks(&self) -> Vec<TrackId> {
        let mut out: Vec<TrackId> = self
            .slots
            .values()
            .flat_map(|slot| slot.locked.iter().chain(slot.queue.iter()))
            .map(|s| s.track.clone())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Drops every queue entry. Queue slots are soft: waiting threats
    /// re-enter the proposal pass each tick so they can reach a weapon
    /// that freed up.
    pub fn clear_queues(&mut self) {
        for slot in self.slots.values_mut() {
            slot.queue.clear();
        }
        self.slots.retain(|_, s| !s.locked.is_empty() || !s.queue.is_empty());
    }

    /// Releases the lock on `ws` and promotes its queued threat (if any)
    /// to the lock. Returns (released, promoted).
    pub fn release_lock(&mut self, ws: &WsId, now: f64) -> (Option<TrackId>, Option<TrackId>) {
        let Some(slot) = self.slots.get_mut(ws) else {
            return (None, None);
        };
        let released = slot.locked.pop().map(|s| s.track);
        let promoted = if slot.locked.is_empty() && !slot.queue.is_empty() {
            let mut entry = slot.queue.remove(0);
            entry.since = now;
            let track = entry.track.clone();
            slot.locked.push(entry);
            Some(track)
        } else {
            None
        };
        if slot.locked.is_empty() && slot.queue.is_empty() {
            self.slots.remove(ws);
        }
        (released, promoted)
    }

    /// Removes a (neutralized or exited) track from every slot it holds.
    pub fn remove_track(&mut self, track: &TrackId) {
        for slot in self.slots.values_mut() {
            slot.locked.retain(|s| &s.track != track);
            slot.queue.retain(|s| &s.track != track);
        }
        self.slots.retain(|_, s| !s.locked.is_empty() || !s.queue.is_empty());
    }
}

/// One violation of the schedule constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintViolation {
    /// More than two threats scheduled on one weapon.
    ScheduledOverCapacity { ws: WsId, count: usize },
    /// More than one lock on one weapon.
    LockCapacity { ws: WsId, count: usize },
    /// More than one queued threat on one weapon.
    QueueCapacity { ws: WsId, count: usize },
    /// A threat locked at more than one weapon.
    MultipleLocks { track: TrackId, count: usize },
    /// A threat locked and queued on the same weapon.
    LockedAndQueued { ws: WsId, track: TrackId },
    /// A threat holding more than one slot overall.
    DoubleBooked { track: TrackId, count: usize },
}

/// Scans a schedule for every constraint violation; empty means valid.
pub fn check_constraints(schedule: &WsSchedule) -> Vec<ConstraintViolation> {
    let mut violations = Vec::new();
    let mut locks_per_track: BTreeMap<&TrackId, usize> = BTreeMap::new();
    let mut slots_per_track: BTreeMap<&TrackId, usize> = BTreeMap::new();

    for (ws, slot) in schedule.slots() {
        let count = slot.locked.len() + slot.queue.len();
        if count > 2 {
            violations.push(ConstraintViolation::ScheduledOverCapacity {
                ws: ws.clone(),
                count,
            });
        }
        if slot.locked.len() > 1 {
            violations.push(ConstraintViolation::LockCapacity {
                ws: ws.clone(),
                count: slot.locked.len(),
            });
        }
        if slot.queue.len() > 1 {
            violations.push(ConstraintViolation::QueueCapacity {
                ws: ws.clone(),
                count: slot.queue.len(),
            });
        }
        for s in &slot.locked {
            *locks_per_track.entry(&s.track).or_default() += 1;
            *slots_per_track.entry(&s.track).or_default() += 1;
            if slot.queue.iter().any(|q| q.track == s.track) {
                violations.push(ConstraintViolation::LockedAndQueued {
                    ws: ws.clone(),
                    track: s.track.clone(),
                });
            }
        }
        for q in &slot.queue {
            *slots_per_track.entry(&q.track).or_default() += 1;
        }
    }
    for (track, count) in locks_per_track {
        if count > 1 {
            violations.push(ConstraintViolation::MultipleLocks {
                track: track.clone(),
                count,
            });
        }
    }
    for (track, count) in slots_per_track {
        if count > 1 {
            violations.push(ConstraintViolation::DoubleBooked {
                track: track.clone(),
                count,
            });
        }
    }
    violations
}

/// A feasible weapon for one threat, with the features that scored it.
/// `entry_time`/`exit_time` are absolute simulation clock times of the
/// field-of-fire window; `time_to_ws` is the wait from the evaluation
/// instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WsCandidate {
    pub ws_id: WsId,
    pub entry_time: f64,
    pub exit_time: f64,
    pub required_elevation: f64,
    /// Time until the threat is inside the weapon's field of fire; 0 when
    /// it already is.
    pub time_to_ws: f64,
    /// Projectile time of flight for a shot taken now (or at sector entry
    /// when the threat is still outside).
    pub tof: Option<f64>,
    pub pair_weight: f64,
}

/// Raw features feeding [`ws_pair_weight`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsPairFeatures {
    pub time_to_ws: f64,
    pub required_elevation: f64,
    pub max_elevation: f64,
    pub lethality_index: f64,
    pub stabilization_time: f64,
    pub rate_of_fire: f64,
}

/// Threat/weapon pair score: weighted sum of arrival urgency, elevation
/// margin, lethality, stabilization readiness, and rate of fire, each in
/// [0, 1].
pub fn ws_pair_weight(features: &WsPairFeatures, weights: &WeightsConfig) -> f64 {
    let time_score = (-features.time_to_ws.max(0.0) / weights.ws_time_tau).exp();
    let elevation_score = if features.max_elevation > 0.0 {
        ((features.max_elevation - features.required_elevation) / features.max_elevation)
            .clamp(0.0, 1.0)
    } else if features.required_elevation <= 0.0 {
        1.0
    } else {
        0.0
    };
    let stabilization_score =
        (-features.stabilization_time.max(0.0) / weights.stabilization_sigma).exp();
    let rof_score = (features.rate_of_fire / weights.reference_rate_of_fire).clamp(0.0, 1.0);

    weights.ws_time * time_score
        + weights.ws_elevation * elevation_score
        + weights.ws_lethality * features.lethality_index
        + weights.ws_stabilization * stabilization_score
        + weights.ws_rate_of_fire * rof_score
}

/// Builds the ordered candidate list for one threat against the weapons of
/// its assigned asset.
///
/// A weapon qualifies when it is Up with ammunition, its effectiveness
/// against the threat class clears the capability threshold, the threat's
/// extrapolated path crosses its field of fire at or after `clock`, and
/// the required elevation is within reach. Candidates come back in
/// descending pair weight (ties by weapon id).
pub fn candidate_ws(
    track: &TrackState,
    da: &DefendedAsset,
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    weights: &WeightsConfig,
    clock: f64,
) -> Vec<WsCandidate> {
    let mut out: Vec<WsCandidate> = da
        .weapon_ids
        .iter()
        .filter_map(|id| weapons.get(id))
        .filter(|ws| ws.condition == WsCondition::Up && ws.ammo > 0)
        .filter_map(|ws| {
            let c = libraries
                .effectiveness(&ws.weapon_class, &track.threat_class)
                .ok()?;
            if c < weights.capability_threshold {
                return None;
            }
            let (time_to_ws, window, entry_point) = match track.heading_ray() {
                Some(ray) => {
                    let speed = track.velocity().expect("ray implies velocity").1;
                    let crossing = sector_intercept(&ws.sector, &ray, speed)?;
                    (
                        crossing.entry_time,
                        crossing.exit_time - crossing.entry_time,
                        crossing.entry,
                    )
                }
                None => {
                    // No usable velocity: engageable only if already
                    // standing inside the field of fire.
                    if !ws.sector.contains_point(track.position()) {
                        return None;
                    }
                    (0.0, f64::INFINITY, track.position())
                }
            };
            let req_elev = required_elevation(
                track.altitude.max(0.0),
                euclidean_distance(ws.position, entry_point),
            );
            if req_elev > ws.max_elevation {
                return None;
            }
            let vel = track.velocity().map(|(v, _)| v).unwrap_or_default();
            let tof = solve_intercept(track.position(), vel, ws.position, ws.projectile_speed)
                .or_else(|| {
                    solve_intercept(entry_point, vel, ws.position, ws.projectile_speed)
                })
                .map(|sol| sol.time_of_flight);
            let features = WsPairFeatures {
                time_to_ws,
                required_elevation: req_elev,
                max_elevation: ws.max_elevation,
                lethality_index: ws.lethality_index,
                stabilization_time: ws.stabilization_time,
                rate_of_fire: ws.rate_of_fire,
            };
            Some(WsCandidate {
                ws_id: ws.ws_id.clone(),
                entry_time: clock + time_to_ws,
                exit_time: clock + time_to_ws + window,
                required_elevation: req_elev,
                time_to_ws,
                tof,
                pair_weight: ws_pair_weight(&features, weights),
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.pair_weight
            .partial_cmp(&a.pair_weight)
            .unwrap()
            .then(a.ws_id.cmp(&b.ws_id))
    });
    out
}

/// One event of a scheduling pass, in occurrence order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WaEvent {
    Proposal { track: TrackId, ws: WsId, weight: f64 },
    Locked { track: TrackId, ws: WsId, weight: f64 },
    Queued { track: TrackId, ws: WsId, weight: f64 },
    Bumped { track: TrackId, ws: WsId, by: TrackId },
    Unassigned { track: TrackId },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WaError {
    /// The pass produced an invalid schedule. Unreachable by
    /// construction; raised only by an implementation bug.
    #[error("schedule constraint violation after assignment pass: {0:?}")]
    ConstraintViolation(Vec<ConstraintViolation>),
}

/// Runs the proposal pass: threats in `ranked` order walk down their
/// candidate lists; a weapon locks a first proposer, queues a second, and
/// afterwards accepts only proposals strictly heavier than its queued
/// threat (which is bumped and resumes proposing below its lost slot).
///
/// Threats already holding a slot must not appear in `ranked`. The
/// schedule satisfies the capacity constraints on entry and exit; a threat
/// that exhausts its list stays unassigned this pass.
pub fn assign_threats_to_ws(
    ranked: &[TrackId],
    candidates: &BTreeMap<TrackId, Vec<WsCandidate>>,
    schedule: &mut WsSchedule,
    clock: f64,
) -> Result<Vec<WaEvent>, WaError> {
    let mut events = Vec::new();
    let mut cursor: BTreeMap<&TrackId, usize> = ranked.iter().map(|t| (t, 0usize)).collect();
    let mut work: VecDeque<&TrackId> = ranked.iter().collect();
    static NO_CANDIDATES: Vec<WsCandidate> = Vec::new();

    while let Some(track) = work.pop_front() {
        let list = candidates.get(track).unwrap_or(&NO_CANDIDATES);
        let mut placed = false;
        while cursor[track] < list.len() {
            let cand = &list[cursor[track]];
            *cursor.get_mut(track).unwrap() += 1;
            events.push(WaEvent::Proposal {
                track: track.clone(),
                ws: cand.ws_id.clone(),
                weight: cand.pair_weight,
            });
            let slot = schedule.slot_mut(&cand.ws_id);
            let entry = ScheduledThreat {
                track: track.clone(),
                weight: cand.pair_weight,
                since: clock,
            };
            if slot.locked.is_empty() {
                slot.locked.push(entry);
                events.push(WaEvent::Locked {
                    track: track.clone(),
                    ws: cand.ws_id.clone(),
                    weight: cand.pair_weight,
                });
                placed = true;
                break;
            }
            if slot.queue.is_empty() {
                slot.queue.push(entry);
                events.push(WaEvent::Queued {
                    track: track.clone(),
                    ws: cand.ws_id.clone(),
                    weight: cand.pair_weight,
                });
                placed = true;
                break;
            }
            // Occupied: bump the queued threat only on strictly greater
            // weight; the incumbent keeps its slot on ties.
            if cand.pair_weight > slot.queue[0].weight {
                let bumped = std::mem::replace(&mut slot.queue[0], entry);
                events.push(WaEvent::Bumped {
                    track: bumped.track.clone(),
                    ws: cand.ws_id.clone(),
                    by: track.clone(),
                });
                events.push(WaEvent::Queued {
                    track: track.clone(),
                    ws: cand.ws_id.clone(),
                    weight: cand.pair_weight,
                });
                // The bumped threat resumes from its own cursor, strictly
                // below its previous acceptance.
                if let Some((key, _)) = cursor.get_key_value(&bumped.track) {
                    work.push_back(key);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            events.push(WaEvent::Unassigned { track: track.clone() });
        }
    }

    let violations = check_constraints(schedule);
    if !violations.is_empty() {
        return Err(WaError::ConstraintViolation(violations));
    }
    Ok(events)
}

/// Convenience: candidate lists for many threats at once. Candidate
/// generation per threat is side-effect-free; with the `parallel` feature
/// it fans out across threads, ahead of the sequential proposal pass.
#[allow(clippy::too_many_arguments)]
pub fn build_candidates(
    tracks: &[&TrackState],
    assignment: &BTreeMap<TrackId, DaId>,
    das: &BTreeMap<DaId, DefendedAsset>,
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    weights: &WeightsConfig,
    clock: f64,
) -> BTreeMap<TrackId, Vec<WsCandidate>> {
    let lists = crate::exec::map_ordered(tracks, |track| {
        let cands = assignment
            .get(&track.track_id)
            .and_then(|da| das.get(da))
            .map(|da| candidate_ws(track, da, weapons, libraries, weights, clock))
            .unwrap_or_default();
        (track.track_id.clone(), cands)
    });
    lists.into_iter().collect()
}
