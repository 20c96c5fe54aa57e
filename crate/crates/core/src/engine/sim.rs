//! The discrete-time simulation: track kinematics, per-tick orchestration
//! of threat evaluation then weapon assignment, stochastic engagement
//! resolution with shoot-look-shoot, mode selection, and metrics.
//!
//! Each tick runs observe → orient → decide → act:
//!
//! 1. Observe: apply track observations (motion-model or wire-fed),
//!    resolve engagements whose impact time has passed, record leakers,
//!    and drop locks on unreachable targets.
//! 2. Orient: pick the defense mode, then recompute indices and the
//!    threat→asset matching for every unlocked threat (locked threats stay
//!    pinned to their asset: the lock is a physical commitment).
//! 3. Decide: clear the soft queue slots and run the proposal pass in
//!    threat-rank order.
//! 4. Act: every ready lock (stabilized, within firing cadence, solvable
//!    intercept inside the field of fire) fires one round.
//!
//! A threat that reaches an asset footprint alive is a leaker: it has
//! delivered its attack and leaves play, which keeps
//! neutralized/leaked/exited/alive mutually exclusive.

use super::metrics::{Metrics, MetricsContext};
use super::rng::SplitMix64;
use super::trace::{EngagementOutcome, EventKind, ReleaseReason, SimTrace};
use super::{apply_mode, resolve_engagement, select_mode, EngagementEvent, ModeDecision};
use crate::geometry::{sector_intercept, solve_intercept, Point2};
use crate::ids::{DaId, ThreatClassId, TrackId, WsId};
use crate::io::scenario::{MotionState, ScenarioError, ScenarioSpec, ThreatMotion};
use crate::library::Libraries;
use crate::threat_eval::{
    assign_threats_to_das, rank_threats, DefendedAsset, Mode, TrackSample, TrackState,
    TrackStatus, WeightsConfig,
};
use crate::weapon_assign::{
    assign_threats_to_ws, build_candidates, check_constraints, WaEvent, WeaponSystem, WsCondition,
    WsSchedule,
};
use std::collections::{BTreeMap, BTreeSet};

/// One externally supplied track observation for a tick. In-process runs
/// synthesize these from the scenario flight plans; wire-driven runs read
/// them off the socket.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackObservation {
    pub track_id: TrackId,
    pub threat_class: ThreatClassId,
    pub altitude: f64,
    pub value: f64,
    /// Current position; `None` on an exit notification.
    pub position: Option<Point2>,
    pub exited: bool,
}

/// The full simulation state of one run.
pub struct Simulation {
    tick: u64,
    clock: f64,
    dt: f64,
    max_time: f64,
    tracks: BTreeMap<TrackId, TrackState>,
    motions: BTreeMap<TrackId, ThreatMotion>,
    motion_meta: BTreeMap<TrackId, (ThreatClassId, f64, f64)>, // class, altitude, value
    das: BTreeMap<DaId, DefendedAsset>,
    weapons: BTreeMap<WsId, WeaponSystem>,
    libraries: Libraries,
    base_weights: WeightsConfig,
    schedule: WsSchedule,
    pending: Vec<EngagementEvent>,
    fire_seq: u64,
    mode: Mode,
    rng: SplitMix64,
    trace: SimTrace,
    seq: u64,
    last_te: BTreeMap<TrackId, DaId>,
    last_fire: BTreeMap<WsId, f64>,

    // Online metrics accumulation, kept independent of the trace so the
    // two can be cross-checked.
    neutralized: BTreeSet<TrackId>,
    leaked: BTreeSet<TrackId>,
    damaged: BTreeSet<DaId>,
    te_seen: BTreeSet<(DaId, TrackId)>,
    threat_values: BTreeMap<TrackId, f64>,
    spawn_times: BTreeMap<TrackId, f64>,
    ammo_spent: u64,
    ttk_sum: f64,
    ttk_count: usize,
}

impl Simulation {
    /// Builds a simulation that drives its own tracks from the scenario
    /// flight plans.
    pub fn from_spec(
        spec: &ScenarioSpec,
        libraries: Libraries,
        seed_override: Option<u64>,
    ) -> Result<Self, ScenarioError> {
        let mut sim = Self::from_deployment(spec, libraries, seed_override)?;
        for threat in &spec.threats {
            let value = threat.value.unwrap_or_else(|| {
                sim.libraries
                    .threat_class_or_unknown(&threat.threat_class)
                    .map(|r| r.value)
                    .unwrap_or(0.5)
            });
            sim.motions.insert(threat.track_id.clone(), threat.motion());
            sim.motion_meta.insert(
                threat.track_id.clone(),
                (threat.threat_class.clone(), threat.altitude, value),
            );
        }
        // Tick 0 is pure observation: threats airborne at time zero get
        // their first sample, no pipeline runs.
        let initial = sim.observations_from_motion();
        sim.apply_observations(&initial);
        Ok(sim)
    }

    /// Builds a simulation around the deployment only (assets, weapons,
    /// libraries); tracks arrive externally via
    /// [`Simulation::observe_initial`] and [`Simulation::step_external`].
    pub fn from_deployment(
        spec: &ScenarioSpec,
        libraries: Libraries,
        seed_override: Option<u64>,
    ) -> Result<Self, ScenarioError> {
        spec.validate_with_libraries(&libraries)?;
        let seed = seed_override.unwrap_or(spec.seed);
        Ok(Self {
            tick: 0,
            clock: 0.0,
            dt: spec.dt,
            max_time: spec.max_time,
            tracks: BTreeMap::new(),
            motions: BTreeMap::new(),
            motion_meta: BTreeMap::new(),
            das: spec.build_das(),
            weapons: spec.build_weapons(),
            libraries,
            base_weights: spec.weights.clone(),
            schedule: WsSchedule::default(),
            pending: Vec::new(),
            fire_seq: 0,
            mode: spec.weights.active_mode,
            rng: SplitMix64::new(seed),
            trace: SimTrace::new(seed, spec.hash()),
            seq: 0,
            last_te: BTreeMap::new(),
            last_fire: BTreeMap::new(),
            neutralized: BTreeSet::new(),
            leaked: BTreeSet::new(),
            damaged: BTreeSet::new(),
            te_seen: BTreeSet::new(),
            threat_values: BTreeMap::new(),
            spawn_times: BTreeMap::new(),
            ammo_spent: 0,
            ttk_sum: 0.0,
            ttk_count: 0,
        })
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn schedule(&self) -> &WsSchedule {
        &self.schedule
    }

    pub fn trace(&self) -> &SimTrace {
        &self.trace
    }

    pub fn into_trace(self) -> SimTrace {
        self.trace
    }

    pub fn tracks(&self) -> &BTreeMap<TrackId, TrackState> {
        &self.tracks
    }

    pub fn weapons(&self) -> &BTreeMap<WsId, WeaponSystem> {
        &self.weapons
    }

    pub fn alive_count(&self) -> usize {
        self.tracks
            .values()
            .filter(|t| t.status == TrackStatus::Alive)
            .count()
    }

    fn weapons_up_count(&self) -> usize {
        self.weapons
            .values()
            .filter(|w| w.condition == WsCondition::Up)
            .count()
    }

    /// All scenario threats have finished (killed, leaked, exited) and no
    /// shot is still in the air.
    pub fn finished(&self) -> bool {
        self.pending.is_empty()
            && self.motions.keys().all(|id| {
                self.tracks
                    .get(id)
                    .map(|t| t.status != TrackStatus::Alive)
                    .unwrap_or(false)
            })
    }

    /// Wire-session analogue of [`Simulation::finished`]: every track the
    /// engine has ever been told about is terminal and nothing is in the
    /// air. The engine cannot know about threats the simulator has not
    /// announced yet, so the driving side combines this with its own view.
    pub fn session_done(&self) -> bool {
        self.pending.is_empty()
            && !self.tracks.is_empty()
            && self
                .tracks
                .values()
                .all(|t| t.status != TrackStatus::Alive)
    }

    fn emit(&mut self, kind: EventKind) {
        self.seq += 1;
        self.trace.push(self.tick, self.seq, kind);
    }

    fn observations_from_motion(&self) -> Vec<TrackObservation> {
        let mut out = Vec::new();
        for (id, motion) in &self.motions {
            let (class, altitude, value) = self.motion_meta[id].clone();
            let alive = self
                .tracks
                .get(id)
                .map(|t| t.status == TrackStatus::Alive)
                .unwrap_or(true);
            match motion.state_at(self.clock) {
                MotionState::NotSpawned => {}
                MotionState::Active(pos) => {
                    if alive {
                        out.push(TrackObservation {
                            track_id: id.clone(),
                            threat_class: class,
                            altitude,
                            value,
                            position: Some(pos),
                            exited: false,
                        });
                    }
                }
                MotionState::Done => {
                    if self.tracks.contains_key(id) && alive {
                        out.push(TrackObservation {
                            track_id: id.clone(),
                            threat_class: class,
                            altitude,
                            value,
                            position: None,
                            exited: true,
                        });
                    }
                }
            }
        }
        out
    }

    /// Applies tick-0 observations without running the pipeline. Wire
    /// sessions call this for their first Tick message.
    pub fn observe_initial(&mut self, observations: &[TrackObservation]) {
        debug_assert_eq!(self.tick, 0);
        self.apply_observations(observations);
    }

    fn apply_observations(&mut self, observations: &[TrackObservation]) {
        let mut obs: Vec<&TrackObservation> = observations.iter().collect();
        obs.sort_by(|a, b| a.track_id.cmp(&b.track_id));
        for o in obs {
            match self.tracks.get_mut(&o.track_id) {
                Some(track) => {
                    if track.status != TrackStatus::Alive {
                        continue;
                    }
                    if o.exited {
                        track.status = TrackStatus::Exited;
                        self.emit(EventKind::TrackExited { track: o.track_id.clone() });
                        self.drop_terminal_track(&o.track_id, ReleaseReason::TargetExited);
                    } else if let Some(pos) = o.position {
                        if self.clock > track.last_time() {
                            track.push_sample(self.clock, pos);
                            self.emit(EventKind::TrackUpdate {
                                track: o.track_id.clone(),
                                x: pos.x,
                                y: pos.y,
                            });
                        }
                    }
                }
                None => {
                    if o.exited {
                        continue;
                    }
                    let Some(pos) = o.position else { continue };
                    let track = TrackState::new(
                        o.track_id.clone(),
                        o.threat_class.clone(),
                        o.altitude,
                        o.value,
                        TrackSample { time: self.clock, pos },
                    );
                    self.tracks.insert(o.track_id.clone(), track);
                    self.threat_values.insert(o.track_id.clone(), o.value);
                    self.spawn_times.insert(o.track_id.clone(), self.clock);
                    self.emit(EventKind::TrackSpawned {
                        track: o.track_id.clone(),
                        threat_class: o.threat_class.clone(),
                        x: pos.x,
                        y: pos.y,
                    });
                }
            }
        }
    }

    /// Releases any slots a freshly terminal (killed, leaked, exited)
    /// track still holds.
    fn drop_terminal_track(&mut self, track: &TrackId, reason: ReleaseReason) {
        if let Some(ws) = self.schedule.lock_of(track).cloned() {
            let (_, promoted) = self.schedule.release_lock(&ws, self.clock);
            self.emit(EventKind::LockReleased {
                ws,
                track: track.clone(),
                reason,
                promoted,
            });
        }
        self.schedule.remove_track(track);
    }

    /// Advances one tick, driving tracks from the scenario flight plans.
    pub fn step(&mut self) {
        self.tick += 1;
        self.clock = self.tick as f64 * self.dt;
        let obs = self.observations_from_motion();
        self.run_pipeline(&obs);
    }

    /// Advances one tick with externally supplied observations (the wire
    /// path). The caller provides everything observed since the previous
    /// tick.
    pub fn step_external(&mut self, observations: &[TrackObservation]) {
        self.tick += 1;
        self.clock = self.tick as f64 * self.dt;
        self.run_pipeline(observations);
    }

    fn run_pipeline(&mut self, observations: &[TrackObservation]) {
        // Observe.
        self.apply_observations(observations);
        self.resolve_due_engagements();
        self.scan_leaks();
        self.release_unreachable_locks();

        // Orient: mode first, then matching.
        let alive = self.alive_count();
        let weapons_up = self.weapons_up_count();
        if let ModeDecision::Set(mode) = select_mode(alive, weapons_up, &self.base_weights) {
            if mode != self.mode {
                self.emit(EventKind::ModeSwitch {
                    from: self.mode,
                    to: mode,
                    alive,
                    weapons_up,
                });
                self.mode = mode;
            }
        }
        let weights = apply_mode(self.mode, &self.base_weights);

        let te = self.run_threat_evaluation(&weights);

        // Decide: queue slots are soft; waiting threats re-propose.
        self.schedule.clear_queues();
        let ranked = {
            let da_priority: BTreeMap<DaId, f64> = self
                .das
                .iter()
                .map(|(id, da)| (id.clone(), da.priority))
                .collect();
            rank_threats(
                &te.matching,
                &te.indices,
                &da_priority,
                &self.threat_values,
                &weights,
            )
        };
        let track_refs: Vec<&TrackState> = ranked
            .iter()
            .map(|id| self.tracks.get(id).expect("ranked track exists"))
            .collect();
        let candidates = build_candidates(
            &track_refs,
            &te.matching.assignment,
            &self.das,
            &self.weapons,
            &self.libraries,
            &weights,
            self.clock,
        );
        let wa_events = assign_threats_to_ws(&ranked, &candidates, &mut self.schedule, self.clock)
            .expect("proposal pass keeps the schedule valid");
        for ev in wa_events {
            let kind = match ev {
                WaEvent::Proposal { track, ws, weight } => {
                    EventKind::WaProposal { track, ws, weight }
                }
                WaEvent::Locked { track, ws, weight } => EventKind::WaLocked { track, ws, weight },
                WaEvent::Queued { track, ws, weight } => EventKind::WaQueued { track, ws, weight },
                WaEvent::Bumped { track, ws, by } => EventKind::WaBumped { track, ws, by },
                WaEvent::Unassigned { track } => EventKind::WaUnassigned { track },
            };
            self.emit(kind);
        }

        // Act.
        self.fire_ready_locks();

        // Tick-boundary invariant.
        let violations = check_constraints(&self.schedule);
        if !violations.is_empty() {
            self.emit(EventKind::ConstraintViolations {
                violations: violations.clone(),
            });
            debug_assert!(violations.is_empty(), "schedule violated: {violations:?}");
        }
    }

    /// Recomputes the threat→asset matching for unlocked alive threats.
    /// Locked threats keep the asset of their locking weapon; their pinned
    /// slots reduce the asset's remaining quota.
    fn run_threat_evaluation(&mut self, weights: &WeightsConfig) -> crate::threat_eval::TeResult {
        let mut pinned: BTreeMap<TrackId, DaId> = BTreeMap::new();
        for (ws_id, slot) in self.schedule.slots() {
            for locked in &slot.locked {
                if let Some(ws) = self.weapons.get(ws_id) {
                    pinned.insert(locked.track.clone(), ws.da_id.clone());
                }
            }
        }

        let mut reserved: BTreeMap<DaId, usize> = BTreeMap::new();
        for da in pinned.values() {
            *reserved.entry(da.clone()).or_default() += 1;
        }

        // Load per asset: share of its weapons' schedule capacity in use.
        let mut da_loads: BTreeMap<DaId, f64> = BTreeMap::new();
        for (da_id, da) in &self.das {
            if da.weapon_ids.is_empty() {
                continue;
            }
            let used: usize = da
                .weapon_ids
                .iter()
                .map(|ws| self.schedule.scheduled_count(ws))
                .sum();
            da_loads.insert(
                da_id.clone(),
                used as f64 / (2.0 * da.weapon_ids.len() as f64),
            );
        }

        let free_tracks: Vec<&TrackState> = self
            .tracks
            .values()
            .filter(|t| t.status == TrackStatus::Alive && !pinned.contains_key(&t.track_id))
            .collect();
        let das: Vec<DefendedAsset> = self.das.values().cloned().collect();
        let mut te = assign_threats_to_das(
            &free_tracks,
            &das,
            &self.weapons,
            &self.libraries,
            weights,
            &da_loads,
            &reserved,
        );

        // Entry gate: a threat joins the pipeline only when its best
        // opportunity clears the threshold.
        let gated: Vec<TrackId> = te
            .matching
            .assignment
            .iter()
            .filter(|(track, da)| {
                let idx = &te.indices[&((*track).clone(), (*da).clone())];
                idx.opportunity <= weights.capability_threshold
            })
            .map(|(t, _)| t.clone())
            .collect();
        for t in gated {
            te.matching.assignment.remove(&t);
            te.matching.unassigned.insert(t);
        }

        // Trace assignment changes (fresh decisions only; pins carry over).
        let mut new_te = pinned.clone();
        for (track, da) in &te.matching.assignment {
            new_te.insert(track.clone(), da.clone());
        }
        for (track, da) in &te.matching.assignment {
            if self.last_te.get(track) != Some(da) {
                let opportunity = te.indices[&(track.clone(), da.clone())].opportunity;
                let weight = te.pair_weights[&(track.clone(), da.clone())];
                self.emit(EventKind::TeAssignment {
                    track: track.clone(),
                    da: da.clone(),
                    weight,
                    opportunity,
                });
            }
            self.te_seen.insert((da.clone(), track.clone()));
        }
        let dropped: Vec<TrackId> = self
            .last_te
            .keys()
            .filter(|t| {
                !new_te.contains_key(*t)
                    && self
                        .tracks
                        .get(*t)
                        .map(|tr| tr.status == TrackStatus::Alive)
                        .unwrap_or(false)
            })
            .cloned()
            .collect();
        for track in dropped {
            self.emit(EventKind::TeUnassigned { track });
        }
        self.last_te = new_te;
        te
    }

    fn resolve_due_engagements(&mut self) {
        let mut due: Vec<EngagementEvent> = Vec::new();
        self.pending.retain(|e| {
            if e.impact_time <= self.clock {
                due.push(e.clone());
                false
            } else {
                true
            }
        });
        due.sort_by(|a, b| {
            a.impact_time
                .partial_cmp(&b.impact_time)
                .unwrap()
                .then(a.fire_seq.cmp(&b.fire_seq))
        });
        for event in due {
            let alive = self
                .tracks
                .get(&event.track)
                .map(|t| t.status == TrackStatus::Alive)
                .unwrap_or(false);
            // The kill draw happens only against a live target; a shot
            // arriving after the target left play is a miss without
            // consuming randomness.
            let outcome = if alive {
                resolve_engagement(&event, &mut self.rng)
            } else {
                EngagementOutcome::Miss
            };
            self.emit(EventKind::Resolution {
                ws: event.ws.clone(),
                track: event.track.clone(),
                outcome,
                impact_time: event.impact_time,
            });
            match outcome {
                EngagementOutcome::Kill => {
                    if let Some(track) = self.tracks.get_mut(&event.track) {
                        track.status = TrackStatus::Neutralized;
                    }
                    self.neutralized.insert(event.track.clone());
                    if let Some(spawn) = self.spawn_times.get(&event.track) {
                        self.ttk_sum += event.impact_time - spawn;
                        self.ttk_count += 1;
                    }
                    self.drop_terminal_track(&event.track, ReleaseReason::Kill);
                }
                EngagementOutcome::Miss => {
                    // Shoot-look-shoot: the lock stays; the weapon
                    // re-engages once ready if the target remains
                    // reachable.
                }
            }
        }
    }

    fn scan_leaks(&mut self) {
        let mut leaks: Vec<(TrackId, DaId)> = Vec::new();
        for (track_id, track) in &self.tracks {
            if track.status != TrackStatus::Alive || self.leaked.contains(track_id) {
                continue;
            }
            for (da_id, da) in &self.das {
                if da.footprint.contains(track.position()) {
                    leaks.push((track_id.clone(), da_id.clone()));
                    break;
                }
            }
        }
        for (track_id, da_id) in leaks {
            self.leaked.insert(track_id.clone());
            self.emit(EventKind::Leak {
                track: track_id.clone(),
                da: da_id.clone(),
            });
            let vulnerability = self.das[&da_id].vulnerability;
            if !self.damaged.contains(&da_id) && self.rng.bernoulli(vulnerability) {
                self.damaged.insert(da_id.clone());
                self.emit(EventKind::DaDamaged { da: da_id.clone() });
            }
            // The leaker has delivered its attack and leaves play.
            if let Some(track) = self.tracks.get_mut(&track_id) {
                track.status = TrackStatus::Exited;
            }
            self.drop_terminal_track(&track_id, ReleaseReason::TargetExited);
        }
    }

    /// Drops locks whose target can no longer cross the weapon's field of
    /// fire. A weapon with a shot still in the air keeps its lock until
    /// resolution.
    fn release_unreachable_locks(&mut self) {
        let locked: Vec<(WsId, TrackId)> = self
            .schedule
            .slots()
            .filter_map(|(ws, slot)| {
                slot.locked.first().map(|l| (ws.clone(), l.track.clone()))
            })
            .collect();
        for (ws_id, track_id) in locked {
            if self.pending.iter().any(|e| e.ws == ws_id) {
                continue;
            }
            let Some(track) = self.tracks.get(&track_id) else { continue };
            if track.status != TrackStatus::Alive {
                continue;
            }
            let ws = &self.weapons[&ws_id];
            let reachable = match track.heading_ray() {
                Some(ray) => {
                    let speed = track.velocity().expect("ray implies velocity").1;
                    sector_intercept(&ws.sector, &ray, speed).is_some()
                }
                None => ws.sector.contains_point(track.position()),
            };
            if !reachable {
                let (_, promoted) = self.schedule.release_lock(&ws_id, self.clock);
                self.emit(EventKind::LockReleased {
                    ws: ws_id,
                    track: track_id,
                    reason: ReleaseReason::OutOfReach,
                    promoted,
                });
            }
        }
    }

    fn fire_ready_locks(&mut self) {
        let locked: Vec<(WsId, TrackId, f64)> = self
            .schedule
            .slots()
            .filter_map(|(ws, slot)| {
                slot.locked
                    .first()
                    .map(|l| (ws.clone(), l.track.clone(), l.since))
            })
            .collect();
        for (ws_id, track_id, since) in locked {
            if self.pending.iter().any(|e| e.ws == ws_id) {
                continue; // shoot-look-shoot: await the outcome first
            }
            let Some(ws) = self.weapons.get(&ws_id) else { continue };
            if ws.ammo == 0 {
                continue;
            }
            if self.clock - since < ws.stabilization_time {
                continue;
            }
            if let Some(last) = self.last_fire.get(&ws_id) {
                if self.clock - last < 1.0 / ws.rate_of_fire {
                    continue;
                }
            }
            let Some(track) = self.tracks.get(&track_id) else { continue };
            if track.status != TrackStatus::Alive {
                continue;
            }
            let vel = track.velocity().map(|(v, _)| v).unwrap_or_default();
            let Some(sol) =
                solve_intercept(track.position(), vel, ws.position, ws.projectile_speed)
            else {
                continue;
            };
            if !ws.sector.contains_point(sol.impact_point) {
                continue;
            }
            let effectiveness = self
                .libraries
                .effectiveness(&ws.weapon_class, &track.threat_class)
                .unwrap_or(0.0);
            let sskp = (ws.lethality_index * effectiveness).clamp(0.0, 1.0);

            let ws = self.weapons.get_mut(&ws_id).expect("weapon exists");
            ws.ammo -= 1;
            let ammo_left = ws.ammo;
            self.ammo_spent += 1;
            self.last_fire.insert(ws_id.clone(), self.clock);
            self.fire_seq += 1;
            let event = EngagementEvent {
                ws: ws_id.clone(),
                track: track_id.clone(),
                fire_time: self.clock,
                impact_time: self.clock + sol.time_of_flight,
                sskp,
                fire_seq: self.fire_seq,
            };
            self.emit(EventKind::Fire {
                ws: ws_id,
                track: track_id,
                fire_time: event.fire_time,
                impact_time: event.impact_time,
                sskp,
                ammo_left,
            });
            self.pending.push(event);
        }
    }

    /// Steps until every threat is resolved or max_time is reached.
    pub fn run(&mut self) {
        let max_ticks = (self.max_time / self.dt).round() as u64;
        while self.tick < max_ticks && !self.finished() {
            self.step();
        }
    }

    /// Online metrics of the run so far.
    pub fn metrics(&self) -> Metrics {
        let surviving_da_value = self
            .das
            .iter()
            .filter(|(id, _)| !self.damaged.contains(*id))
            .map(|(_, da)| da.priority)
            .fold(0.0, |a, b| a + b);
        let surviving_threat_value = self
            .threat_values
            .iter()
            .filter(|(t, _)| !self.neutralized.contains(*t))
            .map(|(_, v)| v)
            .fold(0.0, |a, b| a + b);
        let mut da_assignments: BTreeMap<DaId, usize> = BTreeMap::new();
        for (da, _) in &self.te_seen {
            *da_assignments.entry(da.clone()).or_default() += 1;
        }
        Metrics {
            threats_neutralized: self.neutralized.len(),
            leakers: self.leaked.len(),
            surviving_da_value,
            surviving_threat_value,
            ammo_spent: self.ammo_spent,
            mean_time_to_neutralize: (self.ttk_count > 0)
                .then(|| self.ttk_sum / self.ttk_count as f64),
            da_assignments,
        }
    }

    /// Static context needed to recompute metrics from the trace.
    pub fn metrics_context(&self) -> MetricsContext {
        MetricsContext {
            dt: self.dt,
            da_priorities: self
                .das
                .iter()
                .map(|(id, da)| (id.clone(), da.priority))
                .collect(),
            threat_values: self.threat_values.clone(),
        }
    }

    /// Status counts (alive, neutralized, exited) over spawned tracks;
    /// leakers are contained in the exited count.
    pub fn status_counts(&self) -> (usize, usize, usize) {
        let mut alive = 0;
        let mut neutralized = 0;
        let mut exited = 0;
        for t in self.tracks.values() {
            match t.status {
                TrackStatus::Alive => alive += 1,
                TrackStatus::Neutralized => neutralized += 1,
                TrackStatus::Exited => exited += 1,
            }
        }
        (alive, neutralized, exited)
    }
}

/// Runs a scenario start to finish.
pub fn run_scenario(
    spec: &ScenarioSpec,
    libraries: Libraries,
    seed_override: Option<u64>,
) -> Result<(SimTrace, Metrics), ScenarioError> {
    let mut sim = Simulation::from_spec(spec, libraries, seed_override)?;
    sim.run();
    let metrics = sim.metrics();
    Ok((sim.into_trace(), metrics))
}
