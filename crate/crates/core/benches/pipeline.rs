//! Parallel vs sequential pipeline benchmarks.
//!
//! The per-tick inner loops (pair evaluation, candidate generation) fan
//! out over rayon when the `parallel` feature is on; these benches compare
//! that against the always-sequential twins on a K=50 instance. Run with
//! `cargo bench -p tewa-core`; build with `--no-default-features` to
//! measure the fully sequential library instead.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::collections::BTreeMap;
use tewa_core::exec::{map_ordered, map_ordered_seq};
use tewa_core::geometry::{Circle, Point2, Vec2};
use tewa_core::ids::{DaId, TrackId, WsId};
use tewa_core::library::{load_libraries, Libraries};
use tewa_core::threat_eval::{
    assign_threats_to_das, threat_indices, DaStatus, DefendedAsset, TrackSample, TrackState,
    WeightsConfig,
};
use tewa_core::weapon_assign::{build_candidates, WeaponSystem, WsCondition};

fn libs() -> Libraries {
    load_libraries(
        r#"{"threat_classes": [
            {"class_id": "fighter", "name": "f", "base_capability": 0.8, "base_speed": 0.3, "value": 0.9},
            {"class_id": "unknown", "name": "u", "base_capability": 0.8, "base_speed": 0.25, "value": 0.7}
        ]}"#,
        r#"{"weapon_classes": [
            {"class_id": "missile", "name": "m", "lethality_index": 0.9, "priority": 0.8}
        ]}"#,
        r#"{"correlation": [
            {"weapon": "missile", "threat": "fighter", "c": 0.9},
            {"weapon": "missile", "threat": "unknown", "c": 0.7}
        ]}"#,
    )
    .unwrap()
}

struct Instance {
    tracks: Vec<TrackState>,
    das: Vec<DefendedAsset>,
    weapons: BTreeMap<WsId, WeaponSystem>,
    libraries: Libraries,
    weights: WeightsConfig,
}

fn instance(n_threats: usize, n_das: usize) -> Instance {
    let libraries = libs();
    let weights = WeightsConfig::default();
    let mut das = Vec::new();
    let mut weapons = BTreeMap::new();
    for i in 0..n_das {
        let center = Point2::new(30.0, 8.0 * i as f64);
        let da_id = DaId::from(format!("da{i:02}").as_str());
        let ws_id = WsId::from(format!("ws{i:02}").as_str());
        das.push(DefendedAsset {
            da_id: da_id.clone(),
            footprint: Circle::new(center, 4.0),
            priority: 0.5 + 0.05 * (i % 10) as f64,
            vulnerability: 0.5,
            status: DaStatus::FreeToFire,
            weapon_ids: vec![ws_id.clone()],
            quota: 2,
        });
        weapons.insert(
            ws_id.clone(),
            WeaponSystem {
                ws_id,
                da_id,
                weapon_class: "missile".into(),
                position: center,
                sector: tewa_core::geometry::Sector::full_circle(Circle::new(center, 14.0)),
                max_elevation: 1.3,
                projectile_speed: 1.2,
                rate_of_fire: 4.0,
                stabilization_time: 1.0,
                lethality_index: 0.9,
                condition: WsCondition::Up,
                ammo: 20,
            },
        );
    }
    let tracks: Vec<TrackState> = (0..n_threats)
        .map(|i| {
            let y = 8.0 * (i % n_das) as f64 + 0.2 * i as f64;
            let pos = Point2::new(-25.0 - (i / n_das) as f64 * 3.0, y);
            let vel = Vec2::new(0.25, 0.0);
            let mut t = TrackState::new(
                TrackId::from(format!("t{i:02}").as_str()),
                "fighter".into(),
                1.0,
                0.9,
                TrackSample { time: 0.0, pos: Point2::new(pos.x - vel.x, pos.y) },
            );
            t.push_sample(1.0, pos);
            t
        })
        .collect();
    Instance { tracks, das, weapons, libraries, weights }
}

fn bench_pair_evaluation(c: &mut Criterion) {
    // Two scales: the bundled-deployment scale, where per-task work is tiny
    // and the thread-pool overhead dominates, and a saturation raid where
    // fanning out pays.
    for (threats, das) in [(50usize, 10usize), (600, 40)] {
        let inst = instance(threats, das);
        let refs: Vec<&TrackState> = inst.tracks.iter().collect();
        let mut group = c.benchmark_group(format!("pair_evaluation_{threats}x{das}"));
        group.bench_function("parallel_feature", |b| {
            b.iter(|| {
                map_ordered(&refs, |t| {
                    inst.das
                        .iter()
                        .map(|da| threat_indices(t, da, &inst.libraries, &inst.weights).opportunity)
                        .sum::<f64>()
                })
            })
        });
        group.bench_function("sequential", |b| {
            b.iter(|| {
                map_ordered_seq(&refs, |t| {
                    inst.das
                        .iter()
                        .map(|da| threat_indices(t, da, &inst.libraries, &inst.weights).opportunity)
                        .sum::<f64>()
                })
            })
        });
        group.finish();
    }
}

fn bench_full_tick(c: &mut Criterion) {
    let inst = instance(50, 10);
    let refs: Vec<&TrackState> = inst.tracks.iter().collect();
    let das_by_id: BTreeMap<DaId, DefendedAsset> = inst
        .das
        .iter()
        .map(|da| (da.da_id.clone(), da.clone()))
        .collect();
    c.bench_function("te_plus_candidates_50x10", |b| {
        b.iter_batched(
            || (),
            |_| {
                let te = assign_threats_to_das(
                    &refs,
                    &inst.das,
                    &inst.weapons,
                    &inst.libraries,
                    &inst.weights,
                    &BTreeMap::new(),
                    &BTreeMap::new(),
                );
                build_candidates(
                    &refs,
                    &te.matching.assignment,
                    &das_by_id,
                    &inst.weapons,
                    &inst.libraries,
                    &inst.weights,
                    0.0,
                )
            },
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, bench_pair_evaluation, bench_full_tick);
criterion_main!(benches);
