use std::path::PathBuf;
use tewa_core::io::scenario::{load_scenario, ScenarioSpec};
use tewa_core::library::Libraries;

pub fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

pub fn load_fixture(name: &str) -> (ScenarioSpec, Libraries) {
    let path = scenario_dir().join(name);
    load_scenario(&path).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}
