//! Deterministic threat evaluation and weapon assignment (TEWA) engine.
//!
//! The crate implements a two-stage pipeline: threats are first paired with
//! defended assets by a quota-aware stable matching over weighted proposals,
//! then scheduled onto the weapon systems of their assigned asset under
//! hard capacity constraints (one locked target plus one queued target per
//! weapon). A discrete-time simulation loop drives the pipeline tick by
//! tick with shoot-look-shoot engagement resolution, and a greedy
//! target-by-target assigner plus an exhaustive enumeration oracle exist
//! for solution-quality comparison.
//!
//! Everything is deterministic: the same scenario and seed reproduce a
//! byte-identical event trace on any platform.
//!
//! With the default `parallel` feature, per-tick pair evaluation fans out
//! across threads via rayon; results are collected in input order so the
//! outcome is identical to the sequential fallback
//! (`--no-default-features`).

pub mod baseline;
pub mod engine;
pub mod exec;
pub mod geometry;
pub mod ids;
pub mod io;
pub mod library;
pub mod threat_eval;
pub mod weapon_assign;

pub use engine::{Metrics, SimTrace, Simulation};
pub use io::scenario::ScenarioSpec;
pub use threat_eval::WeightsConfig;
