//! `tewa` — scenario runner and protocol server for the TEWA engine.
//!
//! Subcommands: `run` a scenario and report metrics, `batch` a directory
//! of scenarios, `compare` the two-stage assignment against the greedy
//! baseline (and the exhaustive optimum on small instances), `serve` the
//! engine to an external simulator over a socket, and `validate` a
//! scenario file.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use tewa_core::baseline::{
    exhaustive_oracle, greedy_assign, schedule_value, two_stage_assign, OracleError, WaInstance,
};
use tewa_core::engine::{Metrics, Simulation};
use tewa_core::io::protocol::serve_protocol;
use tewa_core::io::scenario::{load_scenario, ScenarioSpec};
use tewa_core::io::trace_io::write_trace;
use tewa_core::library::Libraries;
use tewa_core::threat_eval::{TrackState, TrackStatus};

#[derive(Parser)]
#[command(name = "tewa", version, about = "Threat evaluation and weapon assignment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario to completion and report metrics.
    Run {
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the event trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the metrics document to this file.
        #[arg(long)]
        metrics_json: Option<PathBuf>,
    },
    /// Run every scenario in a directory and aggregate the metrics.
    Batch {
        dir: PathBuf,
        /// Print only the aggregate summary row.
        #[arg(long)]
        summary: bool,
        /// Override every scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare the two-stage assignment against the greedy baseline on one
    /// scenario snapshot (plus the exhaustive optimum when small enough).
    Compare {
        scenario: PathBuf,
        /// Snapshot time in seconds; defaults to just after every threat
        /// is airborne.
        #[arg(long)]
        at: Option<f64>,
    },
    /// Serve the engine to an external simulator over newline-delimited
    /// JSON on a TCP socket.
    Serve {
        /// Deployment scenario (threats in the file are ignored; tracks
        /// arrive over the wire).
        deployment: PathBuf,
        /// Listen address, e.g. 127.0.0.1:4000.
        #[arg(long)]
        listen: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Exit after a single session instead of accepting the next one.
        #[arg(long)]
        once: bool,
        /// Write each session's trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Parse and validate a scenario file.
    Validate { scenario: PathBuf },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { scenario, seed, trace, metrics_json } => run(&scenario, seed, trace, metrics_json),
        Command::Batch { dir, summary, seed } => batch(&dir, summary, seed),
        Command::Compare { scenario, at } => compare(&scenario, at),
        Command::Serve { deployment, listen, seed, once, trace } => {
            serve(&deployment, &listen, seed, once, trace)
        }
        Command::Validate { scenario } => validate(&scenario),
    }
}

fn load(path: &Path) -> Result<(ScenarioSpec, Libraries)> {
    load_scenario(path).with_context(|| format!("loading scenario {}", path.display()))
}

fn print_metrics_table(name: &str, metrics: &Metrics) {
    println!("scenario                 {name}");
    println!("threats neutralized      {}", metrics.threats_neutralized);
    println!("leakers                  {}", metrics.leakers);
    println!("surviving asset value    {:.3}", metrics.surviving_da_value);
    println!("surviving threat value   {:.3}", metrics.surviving_threat_value);
    println!("ammo spent               {}", metrics.ammo_spent);
    match metrics.mean_time_to_neutralize {
        Some(t) => println!("mean time to neutralize  {t:.2} s"),
        None => println!("mean time to neutralize  -"),
    }
    let loads: Vec<String> = metrics
        .da_assignments
        .iter()
        .map(|(da, n)| format!("{da}:{n}"))
        .collect();
    println!("assignments per asset    {}", if loads.is_empty() { "-".into() } else { loads.join(" ") });
}

fn run(path: &Path, seed: Option<u64>, trace_out: Option<PathBuf>, metrics_out: Option<PathBuf>) -> Result<()> {
    let (spec, libs) = load(path)?;
    let (trace, metrics) = tewa_core::engine::run_scenario(&spec, libs, seed)?;
    print_metrics_table(&spec.name, &metrics);
    let doc = serde_json::json!({ "scenario": spec.name, "seed": trace.header.seed, "metrics": metrics });
    println!("metrics-json: {doc}");
    if let Some(out) = trace_out {
        std::fs::write(&out, write_trace(&trace))
            .with_context(|| format!("writing trace {}", out.display()))?;
        println!("trace written            {} ({} events)", out.display(), trace.events.len());
    }
    if let Some(out) = metrics_out {
        std::fs::write(&out, serde_json::to_string_pretty(&doc)?)
            .with_context(|| format!("writing metrics {}", out.display()))?;
    }
    Ok(())
}

fn batch(dir: &Path, summary_only: bool, seed: Option<u64>) -> Result<()> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no scenario files (*.json) in {}", dir.display());
    }

    // Independent scenarios run on parallel workers when available.
    let results: Vec<Result<(String, Metrics)>> = run_all(&paths, seed);

    let mut totals = (0usize, 0usize, 0u64);
    let mut failures = 0usize;
    for result in &results {
        match result {
            Ok((name, m)) => {
                if !summary_only {
                    println!(
                        "{name:24} neutralized {:3}  leakers {:3}  ammo {:4}  surviving(asset/threat) {:.2}/{:.2}",
                        m.threats_neutralized, m.leakers, m.ammo_spent,
                        m.surviving_da_value, m.surviving_threat_value
                    );
                }
                totals.0 += m.threats_neutralized;
                totals.1 += m.leakers;
                totals.2 += m.ammo_spent;
            }
            Err(e) => {
                eprintln!("error: {e:#}");
                failures += 1;
            }
        }
    }
    println!(
        "summary: {} scenarios, {} neutralized, {} leakers, {} rounds",
        results.len() - failures,
        totals.0,
        totals.1,
        totals.2
    );
    if failures > 0 {
        bail!("{failures} scenario(s) failed");
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn run_all(paths: &[PathBuf], seed: Option<u64>) -> Vec<Result<(String, Metrics)>> {
    use rayon::prelude::*;
    paths.par_iter().map(|p| run_one(p, seed)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(paths: &[PathBuf], seed: Option<u64>) -> Vec<Result<(String, Metrics)>> {
    paths.iter().map(|p| run_one(p, seed)).collect()
}

fn run_one(path: &Path, seed: Option<u64>) -> Result<(String, Metrics)> {
    let (spec, libs) = load(path)?;
    let (_, metrics) = tewa_core::engine::run_scenario(&spec, libs, seed)?;
    Ok((spec.name.clone(), metrics))
}

fn compare(path: &Path, at: Option<f64>) -> Result<()> {
    let (spec, libs) = load(path)?;
    let mut sim = Simulation::from_spec(&spec, libs.clone(), None)?;
    // Advance to the snapshot: by default one tick past the last spawn so
    // every track exists and has a velocity estimate.
    let latest_spawn = spec
        .threats
        .iter()
        .map(|t| t.spawn_time)
        .fold(0.0f64, f64::max);
    let target = at.unwrap_or(latest_spawn + 2.0 * spec.dt);
    let ticks = (target / spec.dt).ceil() as u64;
    for _ in 0..ticks {
        sim.step();
    }

    let tracks: Vec<&TrackState> = sim
        .tracks()
        .values()
        .filter(|t| t.status == TrackStatus::Alive)
        .collect();
    if tracks.is_empty() {
        bail!("no live threats at t = {:.1} s", sim.clock());
    }
    let das: Vec<_> = spec.build_das().into_values().collect();
    let weapons = spec.build_weapons();

    let instance = WaInstance::from_state(&tracks, &das, &weapons, &libs, &spec.weights);
    let (two_matching, two_schedule, _) =
        two_stage_assign(&tracks, &das, &weapons, &libs, &spec.weights);
    let (greedy_matching, greedy_schedule) =
        greedy_assign(&tracks, &das, &weapons, &libs, &spec.weights);

    println!(
        "one-shot assignment comparison at t = {:.1} s ({} live threats)",
        sim.clock(),
        tracks.len()
    );
    println!("{:12} {:24} {:24}", "threat", "two-stage (asset/weapon)", "greedy (asset/weapon)");
    for track in &tracks {
        let id = &track.track_id;
        let describe = |assignment: &std::collections::BTreeMap<_, _>, schedule: &tewa_core::weapon_assign::WsSchedule| {
            match assignment.get(id) {
                Some(da) => {
                    let ws = schedule
                        .slots()
                        .find(|(_, slot)| {
                            slot.locked.iter().chain(slot.queue.iter()).any(|s| &s.track == id)
                        })
                        .map(|(ws, _)| ws.to_string())
                        .unwrap_or_else(|| "-".into());
                    format!("{da}/{ws}")
                }
                None => "(unassigned)".into(),
            }
        };
        println!(
            "{:12} {:24} {:24}",
            id.to_string(),
            describe(&two_matching.assignment, &two_schedule),
            describe(&greedy_matching.assignment, &greedy_schedule),
        );
    }
    let two = schedule_value(&two_schedule, &instance);
    let greedy = schedule_value(&greedy_schedule, &instance);
    print!("total pair weight: two-stage {two:.4}, greedy {greedy:.4}");
    match exhaustive_oracle(&instance) {
        Ok((oracle, _)) => println!(", exhaustive optimum {oracle:.4}"),
        Err(OracleError::InstanceTooLarge) => println!(" (instance too large for the oracle)"),
    }
    if !greedy_matching.unassigned.is_empty() {
        println!("greedy left unassigned:    {:?}", greedy_matching.unassigned);
    }
    if !two_matching.unassigned.is_empty() {
        println!("two-stage left unassigned: {:?}", two_matching.unassigned);
    }
    Ok(())
}

fn serve(
    deployment: &Path,
    listen: &str,
    seed: Option<u64>,
    once: bool,
    trace_out: Option<PathBuf>,
) -> Result<()> {
    let (spec, libs) = load(deployment)?;
    let listener = TcpListener::bind(listen).with_context(|| format!("binding {listen}"))?;
    println!("listening on {} (deployment {})", listener.local_addr()?, spec.name);
    loop {
        let trace = serve_protocol(&listener, &spec, libs.clone(), seed)?;
        println!(
            "session closed: {} events, {} decisions",
            trace.events.len(),
            trace.decisions().len()
        );
        if let Some(out) = &trace_out {
            std::fs::write(out, write_trace(&trace))
                .with_context(|| format!("writing trace {}", out.display()))?;
            println!("trace written to {}", out.display());
        }
        if once {
            return Ok(());
        }
    }
}

fn validate(path: &Path) -> Result<()> {
    let (spec, libs) = load(path)?;
    println!(
        "OK {} ({} threats, {} assets, {} weapons, {} threat classes, {} weapon classes)",
        spec.name,
        spec.threats.len(),
        spec.das.len(),
        spec.weapons.len(),
        libs.threat_class_ids().count(),
        libs.weapon_class_ids().count(),
    );
    Ok(())
}
