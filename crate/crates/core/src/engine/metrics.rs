//! Run metrics, accumulated online and independently recomputable from the
//! trace.

use super::trace::{EngagementOutcome, EventKind, SimTrace};
use crate::ids::{DaId, TrackId};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Aggregate outcome of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub threats_neutralized: usize,
    /// Distinct threats that reached some asset footprint alive.
    pub leakers: usize,
    /// Sum of priorities of assets never damaged.
    pub surviving_da_value: f64,
    /// Sum of values of threats never neutralized.
    pub surviving_threat_value: f64,
    pub ammo_spent: u64,
    /// Mean of (kill impact time − spawn time) over neutralized threats.
    pub mean_time_to_neutralize: Option<f64>,
    /// Distinct threats ever assigned to each asset.
    pub da_assignments: BTreeMap<DaId, usize>,
}

/// Static configuration the metrics need beyond the trace itself: the
/// trace records the run, this records the deployment it ran against.
#[derive(Debug, Clone, Default)]
pub struct MetricsContext {
    pub dt: f64,
    pub da_priorities: BTreeMap<DaId, f64>,
    pub threat_values: BTreeMap<TrackId, f64>,
}

impl Metrics {
    /// Rebuilds the metrics from a trace alone; must equal the online
    /// accumulation of the run that produced it.
    pub fn recompute(trace: &SimTrace, ctx: &MetricsContext) -> Metrics {
        let mut neutralized: BTreeSet<&TrackId> = BTreeSet::new();
        let mut leaked: BTreeSet<&TrackId> = BTreeSet::new();
        let mut damaged: BTreeSet<&DaId> = BTreeSet::new();
        let mut assigned: BTreeSet<(&DaId, &TrackId)> = BTreeSet::new();
        let mut spawn_time: BTreeMap<&TrackId, f64> = BTreeMap::new();
        let mut ammo = 0u64;
        let mut ttk_sum = 0.0;
        let mut ttk_count = 0usize;

        for ev in &trace.events {
            match &ev.kind {
                EventKind::TrackSpawned { track, .. } => {
                    spawn_time.insert(track, ev.tick as f64 * ctx.dt);
                }
                EventKind::Fire { .. } => ammo += 1,
                EventKind::Resolution {
                    track,
                    outcome: EngagementOutcome::Kill,
                    impact_time,
                    ..
                } => {
                    neutralized.insert(track);
                    if let Some(spawn) = spawn_time.get(track) {
                        ttk_sum += impact_time - spawn;
                        ttk_count += 1;
                    }
                }
                EventKind::Leak { track, .. } => {
                    leaked.insert(track);
                }
                EventKind::DaDamaged { da } => {
                    damaged.insert(da);
                }
                EventKind::TeAssignment { track, da, .. } => {
                    assigned.insert((da, track));
                }
                _ => {}
            }
        }

        let surviving_da_value = ctx
            .da_priorities
            .iter()
            .filter(|(da, _)| !damaged.contains(da))
            .map(|(_, p)| p)
            .fold(0.0, |a, b| a + b);
        let surviving_threat_value = ctx
            .threat_values
            .iter()
            .filter(|(t, _)| !neutralized.contains(t))
            .map(|(_, v)| v)
            .fold(0.0, |a, b| a + b);
        let mut da_assignments: BTreeMap<DaId, usize> = BTreeMap::new();
        for (da, _) in assigned {
            *da_assignments.entry(da.clone()).or_default() += 1;
        }

        Metrics {
            threats_neutralized: neutralized.len(),
            leakers: leaked.len(),
            surviving_da_value,
            surviving_threat_value,
            ammo_spent: ammo,
            mean_time_to_neutralize: (ttk_count > 0).then(|| ttk_sum / ttk_count as f64),
            da_assignments,
        }
    }
}
