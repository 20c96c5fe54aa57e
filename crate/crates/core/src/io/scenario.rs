//! Scenario file format: deployment (assets, weapons, libraries) plus
//! threat flight plans, weights and run parameters.
//!
//! Scenarios are UTF-8 JSON with a `version: 1` header field. Libraries
//! can be written inline or referenced as separate files resolved relative
//! to the scenario's directory.

use crate::geometry::{Circle, Point2, Sector};
use crate::ids::{DaId, ThreatClassId, TrackId, WeaponClassId, WsId};
use crate::library::{CorrelationEntry, Libraries, LibraryError, ThreatClassRecord, WeaponClassRecord};
use crate::threat_eval::{DaStatus, DefendedAsset, WeightsConfig, WeightsError};
use crate::weapon_assign::{WeaponSystem, WsCondition};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;
use std::path::Path;
use thiserror::Error;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("scenario validation error: {0}")]
    Validation(String),
    #[error("library error: {0}")]
    Library(#[from] LibraryError),
    #[error("weights error: {0}")]
    Weights(#[from] WeightsError),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Inline library content: the same three arrays the standalone library
/// documents carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LibraryDoc {
    pub threat_classes: Vec<ThreatClassRecord>,
    pub weapon_classes: Vec<WeaponClassRecord>,
    pub correlation: Vec<CorrelationEntry>,
}

/// Libraries either written inline or referenced by file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LibrarySource {
    Inline(LibraryDoc),
    Files {
        threat_file: String,
        weapon_file: String,
        correlation_file: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DaSpec {
    pub da_id: DaId,
    pub center: Point2,
    pub radius: f64,
    pub priority: f64,
    pub vulnerability: f64,
    #[serde(default = "default_da_status")]
    pub status: DaStatus,
    /// Max threats held concurrently in matching; defaults to twice the
    /// number of attached weapons (at least 1).
    #[serde(default)]
    pub quota: Option<usize>,
}

fn default_da_status() -> DaStatus {
    DaStatus::FreeToFire
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WsSpec {
    pub ws_id: WsId,
    pub da_id: DaId,
    pub weapon_class: WeaponClassId,
    pub position: Point2,
    /// Field-of-fire range, km.
    pub range: f64,
    #[serde(default)]
    pub sector_start: f64,
    #[serde(default = "default_sweep")]
    pub sector_sweep: f64,
    pub max_elevation: f64,
    pub projectile_speed: f64,
    pub rate_of_fire: f64,
    pub stabilization_time: f64,
    pub lethality_index: f64,
    #[serde(default = "default_condition")]
    pub condition: WsCondition,
    pub ammo: u32,
}

fn default_sweep() -> f64 {
    TAU
}

fn default_condition() -> WsCondition {
    WsCondition::Up
}

/// One waypoint of a threat's flight plan. `speed` is the leg speed flown
/// from the previous waypoint to this one (km/s); it is ignored on the
/// first waypoint.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WaypointSpec {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub speed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThreatSpec {
    pub track_id: TrackId,
    pub threat_class: ThreatClassId,
    pub altitude: f64,
    /// Value for the subtractive objective; defaults to the class value.
    #[serde(default)]
    pub value: Option<f64>,
    #[serde(default)]
    pub spawn_time: f64,
    pub path: Vec<WaypointSpec>,
}

/// A complete scenario document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub version: u32,
    #[serde(default)]
    pub name: String,
    pub libraries: LibrarySource,
    pub das: Vec<DaSpec>,
    pub weapons: Vec<WsSpec>,
    pub threats: Vec<ThreatSpec>,
    #[serde(default)]
    pub weights: WeightsConfig,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub max_time: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_dt() -> f64 {
    0.1
}

/// Parses a scenario document and checks every structural invariant that
/// does not need the libraries resolved.
pub fn parse_scenario(document: &str) -> Result<ScenarioSpec, ScenarioError> {
    let spec: ScenarioSpec =
        serde_json::from_str(document).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    spec.validate_structure()?;
    Ok(spec)
}

/// Reads a scenario from disk, resolving referenced library files relative
/// to the scenario's directory, and validates it fully.
pub fn load_scenario(path: &Path) -> Result<(ScenarioSpec, Libraries), ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| ScenarioError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let spec = parse_scenario(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let libraries = spec.resolve_libraries(base)?;
    spec.validate_with_libraries(&libraries)?;
    Ok((spec, libraries))
}

impl ScenarioSpec {
    fn validate_structure(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::Validation(msg));
        if self.version != SCENARIO_VERSION {
            return fail(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            ));
        }
        if !self.max_time.is_finite() || self.max_time <= 0.0 {
            return fail(format!("max_time must be positive, got {}", self.max_time));
        }
        if !self.dt.is_finite() || self.dt <= 0.0 {
            return fail(format!("dt must be positive, got {}", self.dt));
        }
        self.weights.validate()?;

        let mut da_ids = BTreeSet::new();
        for da in &self.das {
            if !da_ids.insert(&da.da_id) {
                return fail(format!("duplicate asset id {}", da.da_id));
            }
            if !da.radius.is_finite() || da.radius <= 0.0 {
                return fail(format!("asset {} radius must be positive", da.da_id));
            }
            for (field, v) in [("priority", da.priority), ("vulnerability", da.vulnerability)] {
                if !(0.0..=1.0).contains(&v) {
                    return fail(format!("asset {} {field} {v} outside [0, 1]", da.da_id));
                }
            }
            if da.quota == Some(0) {
                return fail(format!("asset {} quota must be at least 1", da.da_id));
            }
        }

        let mut ws_ids = BTreeSet::new();
        for ws in &self.weapons {
            if !ws_ids.insert(&ws.ws_id) {
                return fail(format!("duplicate weapon id {}", ws.ws_id));
            }
            if !da_ids.contains(&ws.da_id) {
                return fail(format!(
                    "weapon {} references unknown asset {}",
                    ws.ws_id, ws.da_id
                ));
            }
            if !ws.range.is_finite() || ws.range <= 0.0 {
                return fail(format!("weapon {} range must be positive", ws.ws_id));
            }
            if !ws.sector_sweep.is_finite() || ws.sector_sweep <= 0.0 || ws.sector_sweep > TAU + 1e-12 {
                return fail(format!("weapon {} sweep outside (0, 2π]", ws.ws_id));
            }
            if !ws.projectile_speed.is_finite() || ws.projectile_speed <= 0.0 {
                return fail(format!("weapon {} projectile_speed must be positive", ws.ws_id));
            }
            if !ws.rate_of_fire.is_finite() || ws.rate_of_fire <= 0.0 {
                return fail(format!("weapon {} rate_of_fire must be positive", ws.ws_id));
            }
            if ws.stabilization_time < 0.0 {
                return fail(format!("weapon {} stabilization_time negative", ws.ws_id));
            }
            if !(0.0..=1.0).contains(&ws.lethality_index) {
                return fail(format!("weapon {} lethality outside [0, 1]", ws.ws_id));
            }
        }

        let mut track_ids = BTreeSet::new();
        for threat in &self.threats {
            if !track_ids.insert(&threat.track_id) {
                return fail(format!("duplicate track id {}", threat.track_id));
            }
            if threat.path.is_empty() {
                return fail(format!("threat {} has an empty path", threat.track_id));
            }
            for wp in &threat.path[1..] {
                if !wp.speed.is_finite() || wp.speed <= 0.0 {
                    return fail(format!(
                        "threat {} has a leg with non-positive speed",
                        threat.track_id
                    ));
                }
            }
            if let Some(v) = threat.value {
                if !(0.0..=1.0).contains(&v) {
                    return fail(format!("threat {} value {v} outside [0, 1]", threat.track_id));
                }
            }
            if threat.spawn_time < 0.0 {
                return fail(format!("threat {} spawn_time negative", threat.track_id));
            }
        }
        Ok(())
    }

    /// Loads the libraries, inline or from files next to the scenario.
    pub fn resolve_libraries(&self, base_dir: &Path) -> Result<Libraries, ScenarioError> {
        match &self.libraries {
            LibrarySource::Inline(doc) => Ok(Libraries::from_parts(
                doc.threat_classes.clone(),
                doc.weapon_classes.clone(),
                doc.correlation.clone(),
            )?),
            LibrarySource::Files {
                threat_file,
                weapon_file,
                correlation_file,
            } => {
                let read = |rel: &str| -> Result<String, ScenarioError> {
                    let p = base_dir.join(rel);
                    std::fs::read_to_string(&p).map_err(|e| ScenarioError::Io {
                        path: p.display().to_string(),
                        source: e,
                    })
                };
                Ok(crate::library::load_libraries(
                    &read(threat_file)?,
                    &read(weapon_file)?,
                    &read(correlation_file)?,
                )?)
            }
        }
    }

    /// Checks the references that need resolved libraries: weapon classes
    /// must be declared and threat classes must resolve at least through
    /// the unknown row.
    pub fn validate_with_libraries(&self, libraries: &Libraries) -> Result<(), ScenarioError> {
        for ws in &self.weapons {
            if libraries.weapon_class(&ws.weapon_class).is_none() {
                return Err(ScenarioError::Validation(format!(
                    "weapon {} has undeclared class {}",
                    ws.ws_id, ws.weapon_class
                )));
            }
        }
        for threat in &self.threats {
            if !libraries.resolves_threat_class(&threat.threat_class) {
                return Err(ScenarioError::Validation(format!(
                    "threat {} class {} resolves nowhere (no library entry, no unknown row)",
                    threat.track_id, threat.threat_class
                )));
            }
        }
        Ok(())
    }

    /// Materializes the defended assets, deriving weapon attachment lists
    /// and default quotas.
    pub fn build_das(&self) -> BTreeMap<DaId, DefendedAsset> {
        let mut by_da: BTreeMap<&DaId, Vec<WsId>> = BTreeMap::new();
        for ws in &self.weapons {
            by_da.entry(&ws.da_id).or_default().push(ws.ws_id.clone());
        }
        self.das
            .iter()
            .map(|spec| {
                let weapon_ids = by_da.get(&spec.da_id).cloned().unwrap_or_default();
                let quota = spec.quota.unwrap_or((2 * weapon_ids.len()).max(1));
                (
                    spec.da_id.clone(),
                    DefendedAsset {
                        da_id: spec.da_id.clone(),
                        footprint: Circle::new(spec.center, spec.radius),
                        priority: spec.priority,
                        vulnerability: spec.vulnerability,
                        status: spec.status,
                        weapon_ids,
                        quota,
                    },
                )
            })
            .collect()
    }

    pub fn build_weapons(&self) -> BTreeMap<WsId, WeaponSystem> {
        self.weapons
            .iter()
            .map(|spec| {
                (
                    spec.ws_id.clone(),
                    WeaponSystem {
                        ws_id: spec.ws_id.clone(),
                        da_id: spec.da_id.clone(),
                        weapon_class: spec.weapon_class.clone(),
                        position: spec.position,
                        sector: Sector::new(
                            Circle::new(spec.position, spec.range),
                            spec.sector_start,
                            spec.sector_sweep.min(TAU),
                        ),
                        max_elevation: spec.max_elevation,
                        projectile_speed: spec.projectile_speed,
                        rate_of_fire: spec.rate_of_fire,
                        stabilization_time: spec.stabilization_time,
                        lethality_index: spec.lethality_index,
                        condition: spec.condition,
                        ammo: spec.ammo,
                    },
                )
            })
            .collect()
    }

    /// Canonical hash of the spec, recorded in trace headers.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let canonical = serde_json::to_string(self).expect("spec serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

/// Where a threat is at a given absolute time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MotionState {
    NotSpawned,
    Active(Point2),
    /// Past the last waypoint.
    Done,
}

/// Piecewise-linear flight plan; velocity is deliberately reconstructed by
/// the pipeline from positions, not read from here.
#[derive(Debug, Clone)]
pub struct ThreatMotion {
    spawn_time: f64,
    start: Point2,
    /// (to, speed, leg start offset, duration) per leg.
    legs: Vec<(Point2, Point2, f64, f64, f64)>,
    total: f64,
}

impl ThreatSpec {
    pub fn motion(&self) -> ThreatMotion {
        let start = Point2::new(self.path[0].x, self.path[0].y);
        let mut legs = Vec::new();
        let mut t = 0.0;
        let mut prev = start;
        for wp in &self.path[1..] {
            let to = Point2::new(wp.x, wp.y);
            let dist = crate::geometry::euclidean_distance(prev, to);
            let duration = dist / wp.speed;
            legs.push((prev, to, wp.speed, t, duration));
            t += duration;
            prev = to;
        }
        ThreatMotion {
            spawn_time: self.spawn_time,
            start,
            legs,
            total: t,
        }
    }
}

impl ThreatMotion {
    pub fn state_at(&self, time: f64) -> MotionState {
        if time < self.spawn_time {
            return MotionState::NotSpawned;
        }
        let t = time - self.spawn_time;
        if self.legs.is_empty() {
            // Single-waypoint plan: the threat loiters at its spawn point.
            return MotionState::Active(self.start);
        }
        if t >= self.total {
            return MotionState::Done;
        }
        for (from, to, _, leg_start, duration) in &self.legs {
            if t < leg_start + duration {
                let frac = (t - leg_start) / duration;
                return MotionState::Active(*from + (*to - *from) * frac);
            }
        }
        MotionState::Done
    }
}
