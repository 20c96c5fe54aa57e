//! Threat and weapon class libraries with their two-way effectiveness
//! correlation.
//!
//! The correlation table stores, per (weapon class, threat class) pair, an
//! effectiveness value C in [0, 1] that both gates candidate weapons and
//! weights the matching. A reserved threat class id `"unknown"` supplies a
//! fallback row so unrecognized threat types still resolve; unknowns are
//! deliberately scored with conservative (high) capability — failing open.

use crate::ids::{ThreatClassId, WeaponClassId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LibraryError {
    #[error("library document is not valid JSON: {0}")]
    Parse(String),
    #[error("duplicate class id {0:?}")]
    DuplicateClassId(String),
    #[error("duplicate correlation entry for weapon {weapon} / threat {threat}")]
    DuplicateCorrelation { weapon: WeaponClassId, threat: ThreatClassId },
    #[error("{field} = {value} is outside [0, 1]")]
    OutOfRangeValue { field: String, value: f64 },
    #[error("base_speed of threat class {0} must be positive")]
    NonPositiveSpeed(ThreatClassId),
    #[error("correlation references undeclared weapon class {0}")]
    UndeclaredWeaponClass(WeaponClassId),
    #[error("correlation references undeclared threat class {0}")]
    UndeclaredThreatClass(ThreatClassId),
    #[error("no correlation resolves for weapon {weapon} / threat {threat} (no explicit entry, no unknown row)")]
    MissingCorrelation { weapon: WeaponClassId, threat: ThreatClassId },
    #[error("unknown weapon class {0}")]
    UnknownWeaponClass(WeaponClassId),
}

/// One entry of the threat library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThreatClassRecord {
    pub class_id: ThreatClassId,
    pub name: String,
    /// Baseline ability to damage an asset, in [0, 1].
    pub base_capability: f64,
    /// Nominal cruise speed, km/s.
    pub base_speed: f64,
    /// Value of neutralizing this class, in [0, 1]; drives the
    /// subtractive objective.
    pub value: f64,
}

/// One entry of the weapon library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeaponClassRecord {
    pub class_id: WeaponClassId,
    pub name: String,
    pub lethality_index: f64,
    pub priority: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelationEntry {
    pub weapon: WeaponClassId,
    pub threat: ThreatClassId,
    pub c: f64,
}

#[derive(Debug, Clone, Deserialize)]
struct ThreatLibraryDoc {
    threat_classes: Vec<ThreatClassRecord>,
}

#[derive(Debug, Clone, Deserialize)]
struct WeaponLibraryDoc {
    weapon_classes: Vec<WeaponClassRecord>,
}

#[derive(Debug, Clone, Deserialize)]
struct CorrelationDoc {
    correlation: Vec<CorrelationEntry>,
}

/// Effectiveness lookup C(weapon class, threat class), plus the
/// unknown-threat fallback row.
#[derive(Debug, Clone, Default)]
pub struct CorrelationTable {
    entries: BTreeMap<(WeaponClassId, ThreatClassId), f64>,
    unknown_row: BTreeMap<WeaponClassId, f64>,
}

/// Loaded class libraries plus their correlation table. Immutable after
/// load; freely shared across threads.
#[derive(Debug, Clone, Default)]
pub struct Libraries {
    threats: BTreeMap<ThreatClassId, ThreatClassRecord>,
    weapons: BTreeMap<WeaponClassId, WeaponClassRecord>,
    table: CorrelationTable,
}

fn check_unit(field: &str, value: f64) -> Result<(), LibraryError> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(LibraryError::OutOfRangeValue {
            field: field.to_owned(),
            value,
        });
    }
    Ok(())
}

/// Parses and validates the three library documents (JSON with top-level
/// arrays `threat_classes`, `weapon_classes`, `correlation`).
pub fn load_libraries(
    threat_doc: &str,
    weapon_doc: &str,
    correlation_doc: &str,
) -> Result<Libraries, LibraryError> {
    let threats: ThreatLibraryDoc =
        serde_json::from_str(threat_doc).map_err(|e| LibraryError::Parse(e.to_string()))?;
    let weapons: WeaponLibraryDoc =
        serde_json::from_str(weapon_doc).map_err(|e| LibraryError::Parse(e.to_string()))?;
    let correlation: CorrelationDoc =
        serde_json::from_str(correlation_doc).map_err(|e| LibraryError::Parse(e.to_string()))?;
    Libraries::from_parts(
        threats.threat_classes,
        weapons.weapon_classes,
        correlation.correlation,
    )
}

impl Libraries {
    pub fn from_parts(
        threat_classes: Vec<ThreatClassRecord>,
        weapon_classes: Vec<WeaponClassRecord>,
        correlation: Vec<CorrelationEntry>,
    ) -> Result<Self, LibraryError> {
        let mut threats = BTreeMap::new();
        for rec in threat_classes {
            check_unit("base_capability", rec.base_capability)?;
            check_unit("value", rec.value)?;
            if !rec.base_speed.is_finite() || rec.base_speed <= 0.0 {
                return Err(LibraryError::NonPositiveSpeed(rec.class_id));
            }
            if threats.insert(rec.class_id.clone(), rec.clone()).is_some() {
                return Err(LibraryError::DuplicateClassId(rec.class_id.0));
            }
        }
        let mut weapons = BTreeMap::new();
        for rec in weapon_classes {
            check_unit("lethality_index", rec.lethality_index)?;
            check_unit("priority", rec.priority)?;
            if weapons.insert(rec.class_id.clone(), rec.clone()).is_some() {
                return Err(LibraryError::DuplicateClassId(rec.class_id.0));
            }
        }

        let mut table = CorrelationTable::default();
        for entry in correlation {
            check_unit("correlation c", entry.c)?;
            if !weapons.contains_key(&entry.weapon) {
                return Err(LibraryError::UndeclaredWeaponClass(entry.weapon));
            }
            if entry.threat.is_unknown() {
                if table.unknown_row.insert(entry.weapon.clone(), entry.c).is_some() {
                    return Err(LibraryError::DuplicateCorrelation {
                        weapon: entry.weapon,
                        threat: entry.threat,
                    });
                }
            } else {
                if !threats.contains_key(&entry.threat) {
                    return Err(LibraryError::UndeclaredThreatClass(entry.threat));
                }
                let key = (entry.weapon.clone(), entry.threat.clone());
                if table.entries.insert(key, entry.c).is_some() {
                    return Err(LibraryError::DuplicateCorrelation {
                        weapon: entry.weapon,
                        threat: entry.threat,
                    });
                }
            }
        }

        // Closure: every declared (weapon, threat) pair must resolve,
        // explicitly or via the weapon's unknown row.
        for w in weapons.keys() {
            for t in threats.keys() {
                if t.is_unknown() {
                    continue;
                }
                let explicit = table.entries.contains_key(&(w.clone(), t.clone()));
                if !explicit && !table.unknown_row.contains_key(w) {
                    return Err(LibraryError::MissingCorrelation {
                        weapon: w.clone(),
                        threat: t.clone(),
                    });
                }
            }
        }

        Ok(Self {
            threats,
            weapons,
            table,
        })
    }

    pub fn threat_class(&self, id: &ThreatClassId) -> Option<&ThreatClassRecord> {
        self.threats.get(id)
    }

    /// The record for `id`, or the reserved `"unknown"` record when the
    /// class is not in the library.
    pub fn threat_class_or_unknown(&self, id: &ThreatClassId) -> Option<&ThreatClassRecord> {
        self.threats
            .get(id)
            .or_else(|| self.threats.get(ThreatClassId::UNKNOWN))
    }

    pub fn weapon_class(&self, id: &WeaponClassId) -> Option<&WeaponClassRecord> {
        self.weapons.get(id)
    }

    pub fn weapon_class_ids(&self) -> impl Iterator<Item = &WeaponClassId> {
        self.weapons.keys()
    }

    pub fn threat_class_ids(&self) -> impl Iterator<Item = &ThreatClassId> {
        self.threats.keys()
    }

    /// Whether a scenario threat class resolves: either declared or
    /// covered by an unknown row on every weapon.
    pub fn resolves_threat_class(&self, id: &ThreatClassId) -> bool {
        if self.threats.contains_key(id) {
            return true;
        }
        self.threats.contains_key(ThreatClassId::UNKNOWN)
            && self
                .weapons
                .keys()
                .all(|w| self.table.unknown_row.contains_key(w))
    }

    /// Effectiveness C(weapon, threat). Unrecognized threat classes fall
    /// back to the weapon's unknown-threat row; a weapon with no data for
    /// the pair at all scores 0 (it cannot claim capability).
    pub fn effectiveness(
        &self,
        weapon: &WeaponClassId,
        threat: &ThreatClassId,
    ) -> Result<f64, LibraryError> {
        if !self.weapons.contains_key(weapon) {
            return Err(LibraryError::UnknownWeaponClass(weapon.clone()));
        }
        if let Some(&c) = self.table.entries.get(&(weapon.clone(), threat.clone())) {
            return Ok(c);
        }
        Ok(self.table.unknown_row.get(weapon).copied().unwrap_or(0.0))
    }

    /// Weapon classes ordered by descending effectiveness against
    /// `threat`, ties broken by descending weapon priority, then by id.
    pub fn preferred_weapons(&self, threat: &ThreatClassId) -> Vec<WeaponClassId> {
        let mut order: Vec<(f64, f64, &WeaponClassId)> = self
            .weapons
            .values()
            .map(|w| {
                let c = self
                    .effectiveness(&w.class_id, threat)
                    .expect("declared weapon");
                (c, w.priority, &w.class_id)
            })
            .collect();
        order.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .unwrap()
                .then(b.1.partial_cmp(&a.1).unwrap())
                .then(a.2.cmp(b.2))
        });
        order.into_iter().map(|(_, _, id)| id.clone()).collect()
    }
}
