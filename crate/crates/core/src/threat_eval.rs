//! Stage 1: threat evaluation.
//!
//! Computes intent / capability / opportunity indices per (threat, asset)
//! pair, aggregate kill probabilities, weighted pair scores, and runs a
//! quota-aware deferred-acceptance matching of threats to defended assets.
//! The resulting ranking fixes the order in which stage 2 schedules
//! threats onto weapons.
//!
//! All published indices live in [0, 1]; every weighted combination uses a
//! weight group that sums to 1, so outputs stay in range by construction.

use crate::geometry::{circle_line_poi, Circle, Point2, Ray, Vec2};
use crate::ids::{DaId, ThreatClassId, TrackId, WsId};
use crate::library::Libraries;
use crate::weapon_assign::{WeaponSystem, WsCondition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

const TINY: f64 = 1e-12;

/// Defense objective currently in force.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    /// Maximize total surviving asset value.
    Preferential,
    /// Minimize total surviving threat value.
    Subtractive,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WeightsError {
    #[error("weight group {group} sums to {sum}, expected 1")]
    GroupSum { group: &'static str, sum: f64 },
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("{field} = {value} must be positive")]
    NonPositive { field: &'static str, value: f64 },
}

/// Every configurable weight and score-shaping constant of the pipeline.
///
/// The three weight groups (aggregate, intent sub-scores, asset-pair) plus
/// the weapon-pair group each sum to 1. Reference speeds and time
/// constants shape the [0, 1] sub-scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightsConfig {
    /// Aggregate kill-probability weights: intent, capability, load.
    pub w_intent: f64,
    pub w_capability: f64,
    pub w_load: f64,

    /// Intent sub-score weights: heading alignment, speed, time to asset.
    pub intent_heading: f64,
    pub intent_closing_speed: f64,
    pub intent_time: f64,

    /// Threat/asset pair weights: kill capability, time, spare load.
    pub da_kill_capability: f64,
    pub da_time: f64,
    pub da_load: f64,

    /// Threat/weapon pair weights.
    pub ws_time: f64,
    pub ws_elevation: f64,
    pub ws_lethality: f64,
    pub ws_stabilization: f64,
    pub ws_rate_of_fire: f64,

    /// Minimum effectiveness for a pairing to be considered at all.
    pub capability_threshold: f64,

    /// Forces the given mode regardless of the threat/weapon balance.
    pub mode_override: Option<Mode>,

    /// Speed that saturates the intent speed score, km/s.
    pub reference_speed: f64,
    /// Decay constant of the time-to-asset score, s.
    pub intent_time_tau: f64,
    /// Decay constant of the time-to-weapon score, s.
    pub ws_time_tau: f64,
    /// Decay constant of the stabilization score, s.
    pub stabilization_sigma: f64,
    /// Rate of fire that saturates the ROF score, rounds/s.
    pub reference_rate_of_fire: f64,

    /// Mode the weights are currently specialized for; set by
    /// `engine::apply_mode`.
    pub active_mode: Mode,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        Self {
            w_intent: 0.4,
            w_capability: 0.4,
            w_load: 0.2,
            intent_heading: 0.4,
            intent_closing_speed: 0.3,
            intent_time: 0.3,
            da_kill_capability: 0.5,
            da_time: 0.3,
            da_load: 0.2,
            ws_time: 0.3,
            ws_elevation: 0.15,
            ws_lethality: 0.3,
            ws_stabilization: 0.1,
            ws_rate_of_fire: 0.15,
            capability_threshold: 0.3,
            mode_override: None,
            reference_speed: 0.3,
            intent_time_tau: 60.0,
            ws_time_tau: 30.0,
            stabilization_sigma: 5.0,
            reference_rate_of_fire: 10.0,
            active_mode: Mode::Subtractive,
        }
    }
}

impl WeightsConfig {
    pub fn validate(&self) -> Result<(), WeightsError> {
        let groups: [(&'static str, Vec<f64>); 4] = [
            ("aggregate", vec![self.w_intent, self.w_capability, self.w_load]),
            (
                "intent",
                vec![self.intent_heading, self.intent_closing_speed, self.intent_time],
            ),
            (
                "da_pair",
                vec![self.da_kill_capability, self.da_time, self.da_load],
            ),
            (
                "ws_pair",
                vec![
                    self.ws_time,
                    self.ws_elevation,
                    self.ws_lethality,
                    self.ws_stabilization,
                    self.ws_rate_of_fire,
                ],
            ),
        ];
        for (group, ws) in &groups {
            for &w in ws {
                if !(0.0..=1.0).contains(&w) || !w.is_finite() {
                    return Err(WeightsError::OutOfRange { field: group, value: w });
                }
            }
            let sum: f64 = ws.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(WeightsError::GroupSum { group, sum });
            }
        }
        if !(0.0..=1.0).contains(&self.capability_threshold) {
            return Err(WeightsError::OutOfRange {
                field: "capability_threshold",
                value: self.capability_threshold,
            });
        }
        for (field, v) in [
            ("reference_speed", self.reference_speed),
            ("intent_time_tau", self.intent_time_tau),
            ("ws_time_tau", self.ws_time_tau),
            ("stabilization_sigma", self.stabilization_sigma),
            ("reference_rate_of_fire", self.reference_rate_of_fire),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(WeightsError::NonPositive { field, value: v });
            }
        }
        Ok(())
    }

    /// Multiplier the active mode applies to pair weights and rank scores.
    pub fn mode_factor(&self, da_priority: f64, threat_value: f64) -> f64 {
        match self.active_mode {
            Mode::Preferential => da_priority,
            Mode::Subtractive => threat_value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackStatus {
    Alive,
    Neutralized,
    Exited,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackSample {
    pub time: f64,
    pub pos: Point2,
}

/// Kinematic history and classification of one threat. Velocity is always
/// estimated from the last two samples, never read from ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackState {
    pub track_id: TrackId,
    pub samples: Vec<TrackSample>,
    pub altitude: f64,
    pub threat_class: ThreatClassId,
    pub status: TrackStatus,
    /// Value of this particular threat for the subtractive objective.
    pub value: f64,
}

/// Samples retained per track; two suffice for the finite difference,
/// the rest is kept for inspection.
const MAX_SAMPLES: usize = 8;

impl TrackState {
    pub fn new(
        track_id: TrackId,
        threat_class: ThreatClassId,
        altitude: f64,
        value: f64,
        first_sample: TrackSample,
    ) -> Self {
        Self {
            track_id,
            samples: vec![first_sample],
            altitude,
            threat_class,
            status: TrackStatus::Alive,
            value,
        }
    }

    pub fn position(&self) -> Point2 {
        self.samples.last().expect("track has at least one sample").pos
    }

    pub fn last_time(&self) -> f64 {
        self.samples.last().expect("track has at least one sample").time
    }

    pub fn push_sample(&mut self, time: f64, pos: Point2) {
        debug_assert!(
            time > self.last_time(),
            "sample timestamps must be strictly increasing"
        );
        self.samples.push(TrackSample { time, pos });
        if self.samples.len() > MAX_SAMPLES {
            let drop = self.samples.len() - MAX_SAMPLES;
            self.samples.drain(..drop);
        }
    }

    /// Finite-difference velocity from the last two samples. `None` until
    /// a second sample arrives.
    pub fn velocity(&self) -> Option<(Vec2, f64)> {
        if self.samples.len() < 2 {
            return None;
        }
        let a = self.samples[self.samples.len() - 2];
        let b = self.samples[self.samples.len() - 1];
        crate::geometry::estimate_velocity((a.time, a.pos), (b.time, b.pos)).ok()
    }

    /// Extrapolated path of the track; `None` while velocity is unknown or
    /// (near) zero.
    pub fn heading_ray(&self) -> Option<Ray> {
        let (v, speed) = self.velocity()?;
        if speed < TINY {
            return None;
        }
        Ray::new(self.position(), v).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DaStatus {
    FreeToFire,
    OnHold,
    Tight,
}

/// A defended asset: the protected circle plus its engagement posture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefendedAsset {
    pub da_id: DaId,
    pub footprint: Circle,
    pub priority: f64,
    pub vulnerability: f64,
    pub status: DaStatus,
    pub weapon_ids: Vec<WsId>,
    /// Maximum number of threats held concurrently during matching.
    pub quota: usize,
}

/// Time until a track reaches an asset footprint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TimeToDa {
    Closing(f64),
    /// The extrapolated path never reaches the circle (or the track is
    /// stationary outside it).
    NonClosing,
}

impl TimeToDa {
    pub fn seconds(&self) -> Option<f64> {
        match self {
            TimeToDa::Closing(t) => Some(*t),
            TimeToDa::NonClosing => None,
        }
    }
}

/// Indices of one (threat, asset) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreatIndices {
    pub intent: f64,
    pub capability: f64,
    pub opportunity: f64,
    pub time_to_da: TimeToDa,
    pub poi: Option<Point2>,
}

/// Earliest forward point of intersection between the track's extrapolated
/// path and the asset circle, with the travel time to it. A track already
/// inside the circle is at time 0; a stationary track is closing only if
/// it already sits inside.
pub fn time_to_da(track: &TrackState, footprint: &Circle) -> (TimeToDa, Option<Point2>) {
    let pos = track.position();
    match track.heading_ray() {
        Some(ray) => {
            let (_, speed) = track.velocity().expect("heading_ray implies velocity");
            let hits = circle_line_poi(footprint, &ray);
            if hits.is_empty() {
                return (TimeToDa::NonClosing, None);
            }
            let first = hits.first().expect("nonempty");
            let last = hits.last().expect("nonempty");
            if last.ray_t < 0.0 {
                // Entire crossing is behind the track: it is flying away.
                return (TimeToDa::NonClosing, None);
            }
            if first.ray_t < 0.0 {
                // Behind-origin entry point: the track is already inside.
                return (TimeToDa::Closing(0.0), Some(pos));
            }
            (TimeToDa::Closing(first.ray_t / speed), Some(first.point))
        }
        None => {
            if footprint.contains(pos) {
                (TimeToDa::Closing(0.0), Some(pos))
            } else {
                (TimeToDa::NonClosing, None)
            }
        }
    }
}

/// Intent index: weighted sum of heading alignment (1 + cos θ)/2, speed
/// clamp(speed / reference_speed, 0, 1), and arrival urgency
/// exp(−time_to_da / τ) (0 when non-closing).
///
/// A single-sample track has no motion data: its heading score defaults to
/// an uninformative 0.5 and its speed score to 0. The heading term carries
/// direction; the speed term deliberately uses plain ground speed so a
/// fast crossing track still registers energy.
pub fn intent_index(track: &TrackState, da: &DefendedAsset, weights: &WeightsConfig) -> f64 {
    let pos = track.position();
    let to_center = da.footprint.center - pos;
    let dist = to_center.norm();

    let (heading_score, speed_score) = match track.velocity() {
        Some((v, speed)) if speed > TINY => {
            let heading = if dist < TINY {
                1.0
            } else {
                let cos = (v.dot(to_center) / (speed * dist)).clamp(-1.0, 1.0);
                (1.0 + cos) / 2.0
            };
            (heading, (speed / weights.reference_speed).clamp(0.0, 1.0))
        }
        _ => (0.5, 0.0),
    };

    let time_score = match time_to_da(track, &da.footprint).0 {
        TimeToDa::Closing(t) => (-t / weights.intent_time_tau).exp(),
        TimeToDa::NonClosing => 0.0,
    };

    weights.intent_heading * heading_score
        + weights.intent_closing_speed * speed_score
        + weights.intent_time * time_score
}

/// Capability index: the class's base capability scaled by how fast the
/// track currently flies relative to its class nominal speed, clamped to
/// [0.5, 1.5] then to [0, 1]. Unrecognized classes use the unknown-row
/// record; with no library data at all the track is treated as maximally
/// capable.
pub fn capability_index(track: &TrackState, libraries: &Libraries) -> f64 {
    let Some(rec) = libraries.threat_class_or_unknown(&track.threat_class) else {
        return 1.0;
    };
    let scale = match track.velocity() {
        Some((_, speed)) if speed > TINY => (speed / rec.base_speed).clamp(0.5, 1.5),
        _ => 1.0,
    };
    (rec.base_capability * scale).clamp(0.0, 1.0)
}

/// Opportunity: intent and capability blended with the aggregate weights,
/// renormalized over the two terms.
pub fn opportunity(intent: f64, capability: f64, weights: &WeightsConfig) -> f64 {
    let denom = weights.w_intent + weights.w_capability;
    if denom < TINY {
        return 0.5 * (intent + capability);
    }
    (weights.w_intent * intent + weights.w_capability * capability) / denom
}

/// All indices of one (threat, asset) pair.
pub fn threat_indices(
    track: &TrackState,
    da: &DefendedAsset,
    libraries: &Libraries,
    weights: &WeightsConfig,
) -> ThreatIndices {
    let intent = intent_index(track, da, weights);
    let capability = capability_index(track, libraries);
    let (ttd, poi) = time_to_da(track, &da.footprint);
    ThreatIndices {
        intent,
        capability,
        opportunity: opportunity(intent, capability, weights),
        time_to_da: ttd,
        poi,
    }
}

/// One term of the aggregate kill-probability product: a threat engaged by
/// a weapon with the given effectiveness and shot count, with the load on
/// that weapon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagedThreat {
    pub intent: f64,
    pub capability: f64,
    pub load: f64,
    pub effectiveness: f64,
    /// Shots per engagement; at least 1.
    pub shots: u32,
}

/// Aggregate kill probability of an asset over its engaged threat set:
///
/// ∏_k (1 − ((W_I·II_k + W_CI·CI_k + W_L·Load)·C_k)^B_k)
///
/// An empty set yields 1. The value is non-increasing in every intent,
/// capability, load, and effectiveness input.
pub fn kill_probability(threats: &[EngagedThreat], weights: &WeightsConfig) -> f64 {
    threats.iter().fold(1.0, |acc, t| {
        let inner = (weights.w_intent * t.intent
            + weights.w_capability * t.capability
            + weights.w_load * t.load)
            * t.effectiveness;
        acc * (1.0 - inner.powi(t.shots.max(1) as i32))
    })
}

/// Best effectiveness any operational weapon of the asset offers against
/// the threat class; 0 when the asset has no usable weapon.
pub fn da_kill_capability(
    da: &DefendedAsset,
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    threat_class: &ThreatClassId,
) -> f64 {
    da.weapon_ids
        .iter()
        .filter_map(|id| weapons.get(id))
        .filter(|ws| ws.condition == WsCondition::Up)
        .filter_map(|ws| libraries.effectiveness(&ws.weapon_class, threat_class).ok())
        .fold(0.0, f64::max)
}

/// Threat/asset pair score: kill capability, arrival urgency, and spare
/// capacity, blended with the `da_*` weight group.
pub fn da_pair_weight(
    kill_capability: f64,
    indices: &ThreatIndices,
    current_load: f64,
    weights: &WeightsConfig,
) -> f64 {
    let time_score = match indices.time_to_da {
        TimeToDa::Closing(t) => (-t / weights.intent_time_tau).exp(),
        TimeToDa::NonClosing => 0.0,
    };
    weights.da_kill_capability * kill_capability
        + weights.da_time * time_score
        + weights.da_load * (1.0 - current_load.clamp(0.0, 1.0))
}

/// Outcome of the threat→asset matching.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ThreatDaMatching {
    pub assignment: BTreeMap<TrackId, DaId>,
    pub unassigned: BTreeSet<TrackId>,
}

/// A matching instance: proposal weights for every feasible pair plus
/// per-asset quotas. Kept explicit so tests can drive the matcher with a
/// hand-written weight matrix.
#[derive(Debug, Clone, Default)]
pub struct TeProblem {
    pub threats: Vec<TrackId>,
    /// (asset, remaining quota) in id order.
    pub das: Vec<(DaId, usize)>,
    pub weights: BTreeMap<(TrackId, DaId), f64>,
}

/// Threat-proposing deferred acceptance with asset quotas.
///
/// Each threat proposes to its feasible assets in descending pair weight
/// (ties by asset id); an asset holds up to its quota, evicting its
/// lowest-weight held threat when a better proposal arrives. The result
/// has no blocking pair: no feasible (threat, asset) pair exists where the
/// threat prefers the asset to its assignment and the asset has spare
/// quota or prefers the threat to one it holds.
pub fn stable_match(problem: &TeProblem) -> ThreatDaMatching {
    // Preference lists, descending weight, ties by asset id.
    let mut prefs: BTreeMap<&TrackId, Vec<(&DaId, f64)>> = BTreeMap::new();
    for t in &problem.threats {
        let mut list: Vec<(&DaId, f64)> = problem
            .das
            .iter()
            .filter(|(_, q)| *q > 0)
            .filter_map(|(da, _)| problem.weights.get(&(t.clone(), da.clone())).map(|w| (da, *w)))
            .collect();
        list.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(b.0)));
        prefs.insert(t, list);
    }
    let quota: BTreeMap<&DaId, usize> = problem.das.iter().map(|(d, q)| (d, *q)).collect();

    let mut cursor: BTreeMap<&TrackId, usize> =
        problem.threats.iter().map(|t| (t, 0usize)).collect();
    let mut held: BTreeMap<&DaId, Vec<(f64, &TrackId)>> = BTreeMap::new();
    let mut free: VecDeque<&TrackId> = {
        let mut ts: Vec<&TrackId> = problem.threats.iter().collect();
        ts.sort();
        ts.into()
    };
    let mut unassigned = BTreeSet::new();

    // An asset prefers higher weight; ties prefer the smaller track id.
    let better = |wa: f64, ta: &TrackId, wb: f64, tb: &TrackId| {
        wa > wb || (wa == wb && ta < tb)
    };

    while let Some(t) = free.pop_front() {
        let list = &prefs[&t];
        let mut placed = false;
        while cursor[&t] < list.len() {
            let (da, w) = list[cursor[&t]];
            *cursor.get_mut(&t).unwrap() += 1;
            let slot = held.entry(da).or_default();
            if slot.len() < quota[da] {
                slot.push((w, t));
                placed = true;
                break;
            }
            // Find the worst held proposal.
            let worst = slot
                .iter()
                .enumerate()
                .min_by(|(_, (wa, ta)), (_, (wb, tb))| {
                    if better(*wa, ta, *wb, tb) {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    }
                })
                .map(|(i, _)| i)
                .expect("quota > 0");
            let (worst_w, worst_t) = slot[worst];
            if better(w, t, worst_w, worst_t) {
                slot[worst] = (w, t);
                free.push_back(worst_t);
                placed = true;
                break;
            }
        }
        if !placed {
            unassigned.insert(t.clone());
        }
    }

    let mut assignment = BTreeMap::new();
    for (da, slot) in held {
        for (_, t) in slot {
            assignment.insert(t.clone(), da.clone());
        }
    }
    ThreatDaMatching {
        assignment,
        unassigned,
    }
}

/// Indices and pair weights computed for the matching, returned alongside
/// it so ranking and scheduling reuse them.
#[derive(Debug, Clone, Default)]
pub struct TeResult {
    pub matching: ThreatDaMatching,
    /// Indices per feasible (track, asset) pair.
    pub indices: BTreeMap<(TrackId, DaId), ThreatIndices>,
    /// Mode-adjusted pair weights per feasible pair.
    pub pair_weights: BTreeMap<(TrackId, DaId), f64>,
}

impl TeResult {
    /// Indices of a track against its assigned asset.
    pub fn assigned_indices(&self, track: &TrackId) -> Option<&ThreatIndices> {
        let da = self.matching.assignment.get(track)?;
        self.indices.get(&(track.clone(), da.clone()))
    }
}

/// Whether some operational weapon of the asset has (or will have) the
/// track inside its field of fire.
fn da_can_reach(track: &TrackState, da: &DefendedAsset, weapons: &BTreeMap<WsId, WeaponSystem>) -> bool {
    da.weapon_ids
        .iter()
        .filter_map(|id| weapons.get(id))
        .filter(|ws| ws.condition == WsCondition::Up)
        .any(|ws| match track.heading_ray() {
            Some(ray) => {
                let speed = track.velocity().expect("ray implies velocity").1;
                crate::geometry::sector_intercept(&ws.sector, &ray, speed).is_some()
            }
            None => ws.sector.contains_point(track.position()),
        })
}

/// Builds the full matching problem from live state and solves it.
///
/// Feasible pairs require the asset to be FreeToFire with a kill
/// capability at or above the capability threshold, and the pairing must
/// be physically meaningful: the threat's path crosses the asset circle
/// (it threatens the asset) or some operational weapon of the asset can
/// reach the threat (it can be engaged there). Without the reach gate,
/// class-level kill capability could route a threat to an asset whose
/// weapons never see it, stranding it in stage 2.
///
/// `da_loads` carries the current load per asset in [0, 1] (missing means
/// idle) and `reserved_quota` the quota slots pinned by in-flight
/// engagements; both default to empty for one-shot use.
pub fn assign_threats_to_das(
    tracks: &[&TrackState],
    das: &[DefendedAsset],
    weapons: &BTreeMap<WsId, WeaponSystem>,
    libraries: &Libraries,
    weights: &WeightsConfig,
    da_loads: &BTreeMap<DaId, f64>,
    reserved_quota: &BTreeMap<DaId, usize>,
) -> TeResult {
    // Per-track evaluation against every asset is the data-parallel inner
    // loop; the matching itself stays sequential.
    let evaluated: Vec<Vec<(DaId, ThreatIndices, f64)>> =
        crate::exec::map_ordered(tracks, |track| {
            das.iter()
                .filter(|da| da.status == DaStatus::FreeToFire)
                .filter_map(|da| {
                    let kc = da_kill_capability(da, weapons, libraries, &track.threat_class);
                    if kc < weights.capability_threshold {
                        return None;
                    }
                    let idx = threat_indices(track, da, libraries, weights);
                    let closing = matches!(idx.time_to_da, TimeToDa::Closing(_));
                    if !closing && !da_can_reach(track, da, weapons) {
                        return None;
                    }
                    let load = da_loads.get(&da.da_id).copied().unwrap_or(0.0);
                    let base = da_pair_weight(kc, &idx, load, weights);
                    let w = base * weights.mode_factor(da.priority, track.value);
                    Some((da.da_id.clone(), idx, w))
                })
                .collect()
        });

    let mut problem = TeProblem::default();
    let mut result = TeResult::default();
    for (track, pairs) in tracks.iter().zip(evaluated) {
        problem.threats.push(track.track_id.clone());
        for (da, idx, w) in pairs {
            result
                .indices
                .insert((track.track_id.clone(), da.clone()), idx);
            result
                .pair_weights
                .insert((track.track_id.clone(), da.clone()), w);
            problem
                .weights
                .insert((track.track_id.clone(), da.clone()), w);
        }
    }
    for da in das {
        let reserved = reserved_quota.get(&da.da_id).copied().unwrap_or(0);
        problem
            .das
            .push((da.da_id.clone(), da.quota.saturating_sub(reserved)));
    }

    result.matching = stable_match(&problem);
    result
}

/// Orders matched threats for stage 2: descending refined index
/// (opportunity × assigned-asset priority × mode factor), ties by smaller
/// time to asset, then track id.
pub fn rank_threats(
    matching: &ThreatDaMatching,
    indices: &BTreeMap<(TrackId, DaId), ThreatIndices>,
    da_priority: &BTreeMap<DaId, f64>,
    threat_value: &BTreeMap<TrackId, f64>,
    weights: &WeightsConfig,
) -> Vec<TrackId> {
    let mut entries: Vec<(f64, f64, &TrackId)> = matching
        .assignment
        .iter()
        .map(|(track, da)| {
            let idx = indices
                .get(&(track.clone(), da.clone()))
                .expect("indices exist for every assigned pair");
            let prio = da_priority.get(da).copied().unwrap_or(0.0);
            let value = threat_value.get(track).copied().unwrap_or(0.0);
            let refined = idx.opportunity * prio * weights.mode_factor(prio, value);
            let ttd = idx.time_to_da.seconds().unwrap_or(f64::INFINITY);
            (refined, ttd, track)
        })
        .collect();
    entries.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.cmp(b.2))
    });
    entries.into_iter().map(|(_, _, t)| t.clone()).collect()
}

/// True when some feasible (threat, asset) pair blocks the matching; used
/// by tests as the stability oracle.
pub fn find_blocking_pair(
    problem: &TeProblem,
    matching: &ThreatDaMatching,
) -> Option<(TrackId, DaId)> {
    let held: BTreeMap<&DaId, Vec<&TrackId>> = {
        let mut m: BTreeMap<&DaId, Vec<&TrackId>> = BTreeMap::new();
        for (t, da) in &matching.assignment {
            m.entry(da).or_default().push(t);
        }
        m
    };
    let weight = |t: &TrackId, da: &DaId| problem.weights.get(&(t.clone(), da.clone()));

    for t in &problem.threats {
        for (da, quota) in &problem.das {
            let Some(&w) = weight(t, da) else { continue };
            if matching.assignment.get(t) == Some(da) {
                continue;
            }
            // Threat side: prefers `da` to its current assignment
            // (anything beats being unassigned).
            let prefers = match matching.assignment.get(t) {
                None => true,
                Some(cur) => {
                    let cw = *weight(t, cur).expect("assigned pair is feasible");
                    w > cw || (w == cw && da < cur)
                }
            };
            if !prefers {
                continue;
            }
            // Asset side: spare quota, or it prefers `t` to someone held.
            let held_here = held.get(da).map(Vec::as_slice).unwrap_or(&[]);
            if held_here.len() < *quota {
                return Some((t.clone(), da.clone()));
            }
            for other in held_here {
                let ow = *weight(other, da).expect("held pair is feasible");
                if w > ow || (w == ow && t < *other) {
                    return Some((t.clone(), da.clone()));
                }
            }
        }
    }
    None
}
