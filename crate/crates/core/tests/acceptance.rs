//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured figures. Run with
//! `cargo test -p tewa-core --test acceptance -- --nocapture`.

mod common;

use common::load_fixture;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;
use tewa_core::baseline::{
    exhaustive_oracle, greedy_assign, schedule_value, two_stage_assign, WaInstance,
};
use tewa_core::engine::trace::EventKind;
use tewa_core::engine::{
    resolve_engagement, run_scenario, EngagementEvent, EngagementOutcome, Simulation, SplitMix64,
};
use tewa_core::geometry::{
    circle_line_poi, euclidean_distance, sector_intercept, solve_intercept, Circle, Point2, Ray,
    Sector, Vec2,
};
use tewa_core::ids::{DaId, TrackId, WsId};
use tewa_core::io::protocol::wire_roundtrip;
use tewa_core::io::scenario::{parse_scenario, ScenarioSpec};
use tewa_core::io::trace_io::write_trace;
use tewa_core::library::Libraries;
use tewa_core::threat_eval::{
    find_blocking_pair, kill_probability, stable_match, DaStatus, DefendedAsset, EngagedThreat,
    Mode, TeProblem, TrackSample, TrackState, WeightsConfig,
};
use tewa_core::weapon_assign::{check_constraints, WeaponSystem, WsCondition};

fn unit(rng: &mut SplitMix64) -> f64 {
    rng.next_f64()
}

fn range(rng: &mut SplitMix64, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_f64()
}

/// Criterion 1a: the K=5 / I=10 / J=10 fixture. All five threats must be
/// assigned to capability-feasible assets and weapons, at least one weapon
/// stays idle, the schedule never violates its constraints, the mode stays
/// subtractive, and each pipeline tick finishes inside 100 ms.
#[test]
fn c1a_k5_fixture_reproduction() {
    let (spec, libs) = load_fixture("k5_i10_j10.json");
    let mut sim = Simulation::from_spec(&spec, libs.clone(), None).unwrap();
    let max_ticks = (spec.max_time / spec.dt).round() as u64;
    let mut max_tick_secs = 0.0f64;
    while sim.tick() < max_ticks && !sim.finished() {
        let t0 = Instant::now();
        sim.step();
        max_tick_secs = max_tick_secs.max(t0.elapsed().as_secs_f64());
        assert_eq!(sim.mode(), Mode::Subtractive, "K<J keeps subtractive mode");
        assert!(check_constraints(sim.schedule()).is_empty());
    }

    let trace = sim.trace();
    let weapons = spec.build_weapons();
    let threshold = spec.weights.capability_threshold;

    let mut te_assigned: BTreeMap<&TrackId, &DaId> = BTreeMap::new();
    let mut wa_assigned: BTreeMap<&TrackId, &WsId> = BTreeMap::new();
    let mut ws_used: BTreeSet<&WsId> = BTreeSet::new();
    for ev in &trace.events {
        match &ev.kind {
            EventKind::TeAssignment { track, da, .. } => {
                te_assigned.insert(track, da);
            }
            EventKind::WaLocked { track, ws, .. } | EventKind::WaQueued { track, ws, .. } => {
                wa_assigned.insert(track, ws);
                ws_used.insert(ws);
            }
            EventKind::ConstraintViolations { .. } => {
                panic!("constraint violation recorded in trace");
            }
            _ => {}
        }
    }
    assert_eq!(te_assigned.len(), 5, "all five threats paired with assets");
    assert_eq!(wa_assigned.len(), 5, "all five threats scheduled on weapons");
    for (track, ws_id) in &wa_assigned {
        let ws = &weapons[*ws_id];
        let class = &spec
            .threats
            .iter()
            .find(|t| &&t.track_id == track)
            .unwrap()
            .threat_class;
        let c = libs.effectiveness(&ws.weapon_class, class).unwrap();
        assert!(c >= threshold, "{track} on {ws_id}: effectiveness {c} below gate");
    }
    let idle = weapons.len() - ws_used.len();
    assert!(idle >= 1, "at least one weapon stays idle");
    assert!(
        max_tick_secs < 0.1,
        "slowest tick {max_tick_secs:.4}s exceeds 100 ms"
    );
    println!(
        "ACCEPTANCE 1a PASS: K=5 all assigned (feasible), {idle} weapons idle, \
         0 violations, mode subtractive, max tick {:.1} ms",
        max_tick_secs * 1e3
    );
}

/// Criterion 1b: the K=50 / I=10 / J=10 fixture. Every threat is
/// eventually scheduled or queued, no weapon ever holds more than two,
/// the mode is preferential whenever threats outnumber weapons, and the
/// whole run finishes inside 5 seconds.
#[test]
fn c1b_k50_fixture_reproduction() {
    let (spec, libs) = load_fixture("k50_i10_j10.json");
    let mut sim = Simulation::from_spec(&spec, libs, None).unwrap();
    let max_ticks = (spec.max_time / spec.dt).round() as u64;
    let start = Instant::now();
    let mut preferential_ticks = 0u64;
    while sim.tick() < max_ticks && !sim.finished() {
        sim.step();
        let alive = sim.alive_count();
        let up = sim
            .weapons()
            .values()
            .filter(|w| w.condition == WsCondition::Up)
            .count();
        if alive > up {
            assert_eq!(sim.mode(), Mode::Preferential, "K>J forces preferential");
        }
        if sim.mode() == Mode::Preferential {
            preferential_ticks += 1;
        }
        assert!(check_constraints(sim.schedule()).is_empty());
    }
    let wall = start.elapsed().as_secs_f64();

    let scheduled: BTreeSet<&TrackId> = sim
        .trace()
        .events
        .iter()
        .filter_map(|e| match &e.kind {
            EventKind::WaLocked { track, .. } | EventKind::WaQueued { track, .. } => Some(track),
            _ => None,
        })
        .collect();
    assert_eq!(scheduled.len(), 50, "every threat scheduled or queued at some tick");
    assert!(preferential_ticks > 0, "preferential mode engaged");
    assert!(
        !sim.trace()
            .events
            .iter()
            .any(|e| matches!(e.kind, EventKind::ConstraintViolations { .. })),
        "no violations over the full trace"
    );
    assert!(wall < 5.0, "full run took {wall:.2}s, budget 5 s");
    println!(
        "ACCEPTANCE 1b PASS: K=50 all 50 scheduled/queued, preferential for {preferential_ticks} \
         ticks, 0 violations, run {wall:.2} s"
    );
}

/// Dense-sampling oracle for a sector crossing: walk the ray in 1e-4 km
/// steps and report the first contiguous in-sector run.
fn sampled_crossing(sector: &Sector, ray: &Ray, t_hi: f64) -> Option<(f64, f64)> {
    const STEP: f64 = 1e-4;
    let mut entry: Option<f64> = None;
    let mut exit = 0.0;
    let steps = (t_hi / STEP).ceil() as u64;
    for i in 0..=steps {
        let t = i as f64 * STEP;
        if sector.contains_point(ray.point_at(t)) {
            if entry.is_none() {
                entry = Some(t);
            }
            exit = t;
        } else if entry.is_some() {
            break;
        }
    }
    entry.map(|e| (e, exit))
}

/// Criterion 2: geometry residuals on 1,000 random circle/ray instances,
/// and sector-crossing agreement with the dense sampler within 1e-3 km.
#[test]
fn c2_geometry_residuals_and_sector_oracle() {
    let mut rng = SplitMix64::new(0xC2);
    let mut crossings = 0usize;
    for _ in 0..1000 {
        let center = Point2::new(range(&mut rng, -20.0, 20.0), range(&mut rng, -20.0, 20.0));
        let radius = range(&mut rng, 1.0, 10.0);
        let circle = Circle::new(center, radius);
        let origin = Point2::new(range(&mut rng, -30.0, 30.0), range(&mut rng, -30.0, 30.0));
        // Bias most rays toward the circle so the sampler has windows to
        // check; the rest stay fully random (misses exercised too).
        let mut dir = if unit(&mut rng) < 0.7 {
            let aim = center
                + (Vec2::new(range(&mut rng, -1.0, 1.0), range(&mut rng, -1.0, 1.0))
                    * (0.8 * radius));
            aim - origin
        } else {
            let angle = range(&mut rng, 0.0, std::f64::consts::TAU);
            Vec2::new(angle.cos(), angle.sin())
        };
        if dir.norm() < 1e-9 {
            dir = Vec2::new(1.0, 0.0);
        }
        let ray = Ray::new(origin, dir).unwrap();

        for hit in circle_line_poi(&circle, &ray) {
            let residual = ((hit.point.x - center.x).powi(2) + (hit.point.y - center.y).powi(2)
                - radius * radius)
                .abs();
            assert!(residual < 1e-9, "POI residual {residual}");
        }

        let start = range(&mut rng, 0.0, std::f64::consts::TAU);
        let sweep = range(&mut rng, 0.3, std::f64::consts::TAU);
        let sector = Sector::new(circle, start, sweep);
        let speed = range(&mut rng, 0.1, 1.0);
        let t_hi = (origin - center).norm() + radius + 0.5;

        let implementation = sector_intercept(&sector, &ray, speed);
        let oracle = sampled_crossing(&sector, &ray, t_hi);
        match (implementation, oracle) {
            (Some(c), Some((entry, exit))) => {
                let impl_entry = c.entry_time * speed;
                let impl_exit = c.exit_time * speed;
                // Sub-resolution grazing windows cannot be compared
                // meaningfully against a 1e-4 walker.
                if impl_exit - impl_entry < 1e-3 || exit - entry < 1e-3 {
                    continue;
                }
                assert!(
                    (impl_entry - entry).abs() < 1e-3,
                    "entry {impl_entry} vs sampled {entry}"
                );
                assert!(
                    (impl_exit - exit).abs() < 1e-3,
                    "exit {impl_exit} vs sampled {exit}"
                );
                crossings += 1;
            }
            (None, Some((entry, exit))) => {
                assert!(exit - entry < 1e-3, "sampler found a window {entry}..{exit}");
            }
            (Some(c), None) => {
                assert!(
                    (c.exit_time - c.entry_time) * speed < 1e-3,
                    "implementation found a window the sampler missed"
                );
            }
            (None, None) => {}
        }
    }
    assert!(crossings >= 200, "only {crossings} comparable crossings generated");
    println!("ACCEPTANCE 2 PASS: 1000 instances, residual < 1e-9, {crossings} sector windows within 1e-3 km of dense sampler");
}

/// Criterion 3: zero blocking pairs over 1,000 random matching instances
/// with up to 8 threats and 8 assets, inside 10 seconds.
#[test]
fn c3_matching_stability() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0xC3);
    for case in 0..1000 {
        let n_threats = 1 + (rng.next_u64() % 8) as usize;
        let n_das = 1 + (rng.next_u64() % 8) as usize;
        let threats: Vec<TrackId> = (0..n_threats)
            .map(|i| TrackId::from(format!("t{i}").as_str()))
            .collect();
        let das: Vec<(DaId, usize)> = (0..n_das)
            .map(|i| (DaId::from(format!("d{i}").as_str()), 1 + (rng.next_u64() % 3) as usize))
            .collect();
        let mut weights = BTreeMap::new();
        for t in &threats {
            for (d, _) in &das {
                if unit(&mut rng) < 0.75 {
                    weights.insert((t.clone(), d.clone()), unit(&mut rng));
                }
            }
        }
        let problem = TeProblem { threats, das, weights };
        let matching = stable_match(&problem);
        assert!(
            find_blocking_pair(&problem, &matching).is_none(),
            "case {case}: blocking pair found"
        );
        for (d, q) in &problem.das {
            let held = matching.assignment.values().filter(|x| *x == d).count();
            assert!(held <= *q, "case {case}: quota exceeded");
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 10.0, "stability scan took {elapsed:.2}s");
    println!("ACCEPTANCE 3 PASS: 1000 instances, zero blocking pairs, {elapsed:.2} s");
}

fn random_scenario(seed: u64) -> ScenarioSpec {
    let mut rng = SplitMix64::new(seed);
    let n_das = 2 + (rng.next_u64() % 3) as usize;
    let n_threats = 3 + (rng.next_u64() % 6) as usize;
    let classes = ["fighter", "ground_attack", "helicopter", "interceptor", "transport"];

    let mut das = Vec::new();
    let mut weapons = Vec::new();
    for i in 0..n_das {
        let y = 10.0 * i as f64 + range(&mut rng, -2.0, 2.0);
        das.push(serde_json::json!({
            "da_id": format!("da{i}"),
            "center": {"x": range(&mut rng, -3.0, 3.0), "y": y},
            "radius": range(&mut rng, 2.0, 4.0),
            "priority": range(&mut rng, 0.3, 1.0),
            "vulnerability": range(&mut rng, 0.2, 0.8),
        }));
        let n_ws = 1 + (rng.next_u64() % 2) as usize;
        for j in 0..n_ws {
            weapons.push(serde_json::json!({
                "ws_id": format!("ws{i}_{j}"),
                "da_id": format!("da{i}"),
                "weapon_class": if rng.next_u64().is_multiple_of(2) { "ground_missile" } else { "rocket" },
                "position": {"x": range(&mut rng, -2.0, 2.0), "y": y + range(&mut rng, -2.0, 2.0)},
                "range": range(&mut rng, 10.0, 16.0),
                "sector_start": range(&mut rng, 0.0, std::f64::consts::TAU),
                "sector_sweep": range(&mut rng, 3.0, std::f64::consts::TAU),
                "max_elevation": 1.3,
                "projectile_speed": range(&mut rng, 0.8, 1.5),
                "rate_of_fire": range(&mut rng, 1.0, 5.0),
                "stabilization_time": range(&mut rng, 0.0, 2.0),
                "lethality_index": range(&mut rng, 0.5, 0.95),
                "ammo": 6 + (rng.next_u64() % 8) as u32,
            }));
        }
    }
    let mut threats = Vec::new();
    for k in 0..n_threats {
        let lane = (rng.next_u64() % n_das as u64) as f64;
        let y = 10.0 * lane + range(&mut rng, -3.0, 3.0);
        let from_left = rng.next_u64().is_multiple_of(2);
        let x0 = if from_left { -35.0 } else { 35.0 };
        threats.push(serde_json::json!({
            "track_id": format!("t{k}"),
            "threat_class": classes[(rng.next_u64() % classes.len() as u64) as usize],
            "altitude": range(&mut rng, 0.3, 2.0),
            "spawn_time": range(&mut rng, 0.0, 5.0),
            "path": [
                {"x": x0, "y": y, "speed": 0.0},
                {"x": -x0, "y": y + range(&mut rng, -4.0, 4.0), "speed": range(&mut rng, 0.1, 0.35)}
            ],
        }));
    }
    let doc = serde_json::json!({
        "version": 1,
        "name": format!("random_{seed}"),
        "libraries": {
            "threat_file": "libraries/threats.json",
            "weapon_file": "libraries/weapons.json",
            "correlation_file": "libraries/correlation.json",
        },
        "das": das,
        "weapons": weapons,
        "threats": threats,
        "dt": 0.1,
        "max_time": 250.0,
        "seed": seed,
    });
    parse_scenario(&doc.to_string()).unwrap()
}

fn shared_libraries() -> Libraries {
    let dir = common::scenario_dir();
    let read = |name: &str| std::fs::read_to_string(dir.join("libraries").join(name)).unwrap();
    tewa_core::library::load_libraries(
        &read("threats.json"),
        &read("weapons.json"),
        &read("correlation.json"),
    )
    .unwrap()
}

/// Criterion 4: the schedule constraints hold at every tick boundary of
/// every bundled and randomized scenario run.
#[test]
fn c4_constraint_invariance() {
    let mut runs = 0usize;
    for name in [
        "minimal.json",
        "gap.json",
        "k5_i10_j10.json",
        "k10_i10_j10.json",
        "k50_i10_j10.json",
    ] {
        let (spec, libs) = load_fixture(name);
        let mut sim = Simulation::from_spec(&spec, libs, None).unwrap();
        let max_ticks = (spec.max_time / spec.dt).round() as u64;
        while sim.tick() < max_ticks && !sim.finished() {
            sim.step();
            assert!(
                check_constraints(sim.schedule()).is_empty(),
                "{name}: violation at tick {}",
                sim.tick()
            );
        }
        runs += 1;
    }
    let libs = shared_libraries();
    for seed in 0..20u64 {
        let spec = random_scenario(seed);
        let mut sim = Simulation::from_spec(&spec, libs.clone(), None).unwrap();
        let max_ticks = (spec.max_time / spec.dt).round() as u64;
        while sim.tick() < max_ticks && !sim.finished() {
            sim.step();
            assert!(
                check_constraints(sim.schedule()).is_empty(),
                "random seed {seed}: violation at tick {}",
                sim.tick()
            );
        }
        assert!(
            !sim.trace()
                .events
                .iter()
                .any(|e| matches!(e.kind, EventKind::ConstraintViolations { .. }))
        );
        runs += 1;
    }
    println!("ACCEPTANCE 4 PASS: {runs} scenario runs, constraints clean at every tick boundary");
}

/// Criterion 5: kill-probability properties on 10,000 random inputs plus
/// the two hand-derived exact values.
#[test]
fn c5_kill_probability_properties() {
    let weights = WeightsConfig::default();
    let mut rng = SplitMix64::new(0xC5);
    for _ in 0..10_000 {
        let n = (rng.next_u64() % 5) as usize;
        let terms: Vec<EngagedThreat> = (0..n)
            .map(|_| EngagedThreat {
                intent: unit(&mut rng),
                capability: unit(&mut rng),
                load: unit(&mut rng),
                effectiveness: unit(&mut rng),
                shots: 1 + (rng.next_u64() % 3) as u32,
            })
            .collect();
        let kp = kill_probability(&terms, &weights);
        assert!((0.0..=1.0).contains(&kp), "kp {kp} out of range");

        if let Some(first) = terms.first().copied() {
            let bump = unit(&mut rng) * 0.3;
            for raised in [
                EngagedThreat { intent: (first.intent + bump).min(1.0), ..first },
                EngagedThreat { capability: (first.capability + bump).min(1.0), ..first },
                EngagedThreat { load: (first.load + bump).min(1.0), ..first },
                EngagedThreat { effectiveness: (first.effectiveness + bump).min(1.0), ..first },
            ] {
                let mut bumped = terms.clone();
                bumped[0] = raised;
                assert!(
                    kill_probability(&bumped, &weights) <= kp + 1e-12,
                    "raising an input increased the kill probability"
                );
            }
        }
    }

    // Hand-derived values, exact.
    let one = EngagedThreat {
        intent: 0.5,
        capability: 0.5,
        load: 0.5,
        effectiveness: 1.0,
        shots: 1,
    };
    assert_eq!(kill_probability(&[], &weights), 1.0);
    assert_eq!(kill_probability(&[one], &weights), 0.5);
    assert_eq!(kill_probability(&[one, one], &weights), 0.25);
    println!("ACCEPTANCE 5 PASS: 10000 inputs in [0,1], monotone, hand values 0.5 / 0.25 exact");
}

/// Builds a small synthetic battle state for the optimality comparison:
/// assets guard well-separated approach lanes, each lane is covered by a
/// homogeneous battery of its asset's weapons (as in the bundled
/// deployments), and a mixed-class raid streams in over the lanes. Lane
/// clustering produces local contention, which is where one-pass greedy
/// commits go wrong.
fn random_small_state(
    seed: u64,
) -> (Vec<TrackState>, Vec<DefendedAsset>, BTreeMap<WsId, WeaponSystem>) {
    const LANE_SPACING: f64 = 24.0;
    let mut rng = SplitMix64::new(seed);
    let n_das = 2 + (rng.next_u64() % 3) as usize;
    let n_threats = 2 + (rng.next_u64() % 7) as usize; // 2..=8
    let n_ws = 2 + (rng.next_u64() % 7) as usize; // 2..=8
    let classes = ["fighter", "ground_attack", "interceptor", "transport"];

    let mut das: Vec<DefendedAsset> = (0..n_das)
        .map(|i| DefendedAsset {
            da_id: DaId::from(format!("da{i}").as_str()),
            footprint: Circle::new(
                Point2::new(0.0, LANE_SPACING * i as f64),
                range(&mut rng, 2.0, 4.0),
            ),
            priority: range(&mut rng, 0.4, 1.0),
            vulnerability: 0.5,
            status: DaStatus::FreeToFire,
            weapon_ids: Vec::new(),
            quota: 0, // set below: twice the attached weapons (the default rule)
        })
        .collect();
    let mut weapons = BTreeMap::new();
    // One battery type per lane, with per-mount jitter.
    let lane_stats: Vec<(bool, f64, f64, f64, f64)> = (0..n_das)
        .map(|_| {
            (
                rng.next_u64().is_multiple_of(2),
                range(&mut rng, 0.55, 0.9),
                range(&mut rng, 1.5, 7.0),
                range(&mut rng, 0.0, 2.5),
                range(&mut rng, 0.9, 1.5),
            )
        })
        .collect();
    for j in 0..n_ws {
        let da_idx = j % n_das;
        let (missile, lethality, rof, stab, pspeed) = lane_stats[da_idx];
        let lane_y = LANE_SPACING * da_idx as f64;
        let pos = Point2::new(
            range(&mut rng, -3.0, 3.0),
            lane_y + range(&mut rng, -3.0, 3.0),
        );
        let ws_id = WsId::from(format!("ws{j}").as_str());
        das[da_idx].weapon_ids.push(ws_id.clone());
        weapons.insert(
            ws_id.clone(),
            WeaponSystem {
                ws_id,
                da_id: das[da_idx].da_id.clone(),
                weapon_class: if missile { "ground_missile".into() } else { "rocket".into() },
                position: pos,
                sector: Sector::full_circle(Circle::new(pos, range(&mut rng, 8.0, 12.0))),
                max_elevation: 1.3,
                projectile_speed: pspeed,
                rate_of_fire: (rof + range(&mut rng, -0.5, 0.5)).max(0.5),
                stabilization_time: (stab + range(&mut rng, -0.3, 0.3)).max(0.0),
                lethality_index: (lethality + range(&mut rng, -0.05, 0.05)).clamp(0.0, 1.0),
                condition: WsCondition::Up,
                ammo: 10,
            },
        );
    }
    for da in &mut das {
        da.quota = (2 * da.weapon_ids.len()).max(1);
    }
    let tracks: Vec<TrackState> = (0..n_threats)
        .map(|k| {
            let lane = (rng.next_u64() % n_das as u64) as f64;
            let y = LANE_SPACING * lane + range(&mut rng, -4.0, 4.0);
            let pos = Point2::new(range(&mut rng, -25.0, -15.0), y);
            let speed = range(&mut rng, 0.2, 0.32);
            let dir = Vec2::new(1.0, range(&mut rng, -0.1, 0.1));
            let vel = dir * (speed / dir.norm());
            let mut t = TrackState::new(
                TrackId::from(format!("t{k}").as_str()),
                classes[(rng.next_u64() % classes.len() as u64) as usize].into(),
                range(&mut rng, 0.5, 1.0),
                range(&mut rng, 0.2, 1.0),
                TrackSample { time: 0.0, pos: Point2::new(pos.x - vel.x, pos.y - vel.y) },
            );
            t.push_sample(1.0, pos);
            t
        })
        .collect();
    (tracks, das, weapons)
}

/// Criterion 6: over 100 seeded random instances (≤ 8 threats, ≤ 8
/// weapons), the two-stage schedule's total pair weight beats or matches
/// greedy in at least 90% of instances, and its mean is at least 95% of
/// the exhaustive optimum.
#[test]
fn c6_optimality_gap() {
    let libs = shared_libraries();
    let weights = WeightsConfig::default();
    let mut wins = 0usize;
    let mut sum_two = 0.0;
    let mut sum_oracle = 0.0;
    for seed in 0..100u64 {
        let (tracks, das, weapons) = random_small_state(1000 + seed);
        let refs: Vec<&TrackState> = tracks.iter().collect();

        // All three comparands are valued on the same composed slot
        // weights (asset pair weight x weapon pair weight).
        let instance = WaInstance::from_state(&refs, &das, &weapons, &libs, &weights);
        let (_, two_schedule, _) = two_stage_assign(&refs, &das, &weapons, &libs, &weights);
        let two = schedule_value(&two_schedule, &instance);
        let (_, greedy_schedule) = greedy_assign(&refs, &das, &weapons, &libs, &weights);
        let greedy = schedule_value(&greedy_schedule, &instance);

        let (oracle, _) = exhaustive_oracle(&instance).unwrap();

        assert!(two <= oracle + 1e-9, "two-stage cannot beat the oracle");
        assert!(greedy <= oracle + 1e-9, "greedy cannot beat the oracle");
        if two >= greedy - 1e-9 {
            wins += 1;
        }
        sum_two += two;
        sum_oracle += oracle;
    }
    let ratio = sum_two / sum_oracle;
    assert!(wins >= 90, "two-stage >= greedy in only {wins}/100 instances");
    assert!(
        ratio >= 0.95,
        "mean two-stage value is {:.1}% of the optimum",
        ratio * 100.0
    );
    println!(
        "ACCEPTANCE 6 PASS: two-stage >= greedy in {wins}/100 instances, \
         mean value {:.1}% of exhaustive optimum",
        ratio * 100.0
    );
}

/// Criterion 7: byte-identical traces on re-run, and wire-driven execution
/// identical to in-process execution decision for decision.
#[test]
fn c7_determinism_and_transport_transparency() {
    for name in [
        "minimal.json",
        "gap.json",
        "k5_i10_j10.json",
        "k10_i10_j10.json",
        "k50_i10_j10.json",
    ] {
        let (spec, libs) = load_fixture(name);
        let (trace_a, _) = run_scenario(&spec, libs.clone(), None).unwrap();
        let (trace_b, _) = run_scenario(&spec, libs, None).unwrap();
        assert_eq!(
            write_trace(&trace_a),
            write_trace(&trace_b),
            "{name}: re-run trace differs"
        );
    }
    // Transport transparency on the K=5 fixture.
    let (spec, libs) = load_fixture("k5_i10_j10.json");
    let (inproc, _) = run_scenario(&spec, libs.clone(), None).unwrap();
    let (wire, report) = wire_roundtrip(&spec, libs, None).unwrap();
    assert!(report.errors.is_empty());
    assert_eq!(
        inproc.decisions(),
        wire.decisions(),
        "wire and in-process decisions differ"
    );
    println!(
        "ACCEPTANCE 7 PASS: 5 scenarios byte-identical on re-run; wire == in-process \
         ({} decisions)",
        inproc.decisions().len()
    );
}

/// Criterion 8: 1,000 random intercepts; forward-simulating target and
/// projectile to the returned time of flight brings them within 1e-6 km.
#[test]
fn c8_intercept_accuracy() {
    let mut rng = SplitMix64::new(0xC8);
    let mut solved = 0usize;
    while solved < 1000 {
        let target = Point2::new(range(&mut rng, -30.0, 30.0), range(&mut rng, -30.0, 30.0));
        let vel = Vec2::new(range(&mut rng, -0.5, 0.5), range(&mut rng, -0.5, 0.5));
        let shooter = Point2::new(range(&mut rng, -30.0, 30.0), range(&mut rng, -30.0, 30.0));
        let speed = range(&mut rng, 0.6, 2.5);
        let Some(sol) = solve_intercept(target, vel, shooter, speed) else {
            continue;
        };
        let t = sol.time_of_flight;
        let target_at = target + vel * t;
        let dir = (sol.impact_point - shooter).normalized().unwrap();
        let projectile_at = shooter + dir * (speed * t);
        let miss = euclidean_distance(target_at, projectile_at);
        assert!(miss < 1e-6, "forward-sim residual {miss}");
        solved += 1;
    }
    println!("ACCEPTANCE 8 PASS: 1000 intercepts, forward-sim residual < 1e-6 km");
}

/// Criterion 9: 10,000 resolutions at sskp 0.7 with a fixed seed land the
/// empirical kill rate in [0.68, 0.72].
#[test]
fn c9_monte_carlo_resolution() {
    let mut rng = SplitMix64::new(0xC9);
    let event = EngagementEvent {
        ws: "ws1".into(),
        track: "t1".into(),
        fire_time: 0.0,
        impact_time: 1.0,
        sskp: 0.7,
        fire_seq: 0,
    };
    let n = 10_000;
    let kills = (0..n)
        .filter(|_| resolve_engagement(&event, &mut rng) == EngagementOutcome::Kill)
        .count();
    let rate = kills as f64 / n as f64;
    assert!(
        (0.68..=0.72).contains(&rate),
        "empirical kill rate {rate} outside [0.68, 0.72]"
    );
    println!("ACCEPTANCE 9 PASS: empirical kill rate {rate:.4} within [0.68, 0.72]");
}
