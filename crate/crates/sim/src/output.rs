//! Result files: raw per-run CSV, seed-aggregated CSV and a JSON manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::sweep::{AggregateRow, RunRecord};

pub const RAW_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum OutputError {
    #[error("no results to write")]
    Empty,
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

#[derive(Serialize)]
struct RawRow<'a> {
    t_max: f64,
    policy: &'a str,
    seed: u64,
    avg_learner_utility: f64,
    avg_revenue: f64,
    avg_energy: f64,
    total_payment: f64,
    total_revenue: f64,
    avg_learning_loss: f64,
    participants: usize,
    infeasible: usize,
    converged: bool,
    concave: bool,
    cycles: String,
    associated: String,
    orchestrator_participants: String,
    nash_learner_gain: Option<f64>,
    nash_orchestrator_gain: Option<f64>,
    epsilon_nash: Option<bool>,
}

#[derive(Serialize)]
struct AggregateCsvRow<'a> {
    t_max: f64,
    policy: &'a str,
    seeds: usize,
    avg_learner_utility: f64,
    avg_revenue: f64,
    avg_energy: f64,
    total_payment: f64,
    avg_learning_loss: f64,
    participants: f64,
    converged_runs: usize,
}

const RAW_COLUMNS: &[(&str, &str)] = &[
    ("t_max", "deadline in seconds"),
    ("policy", "fba-opt, dba-ee or random"),
    ("seed", "scenario seed"),
    (
        "avg_learner_utility",
        "normalized learner utility, mean over all learners",
    ),
    ("avg_revenue", "G C rho tau n, mean over all learners"),
    (
        "avg_energy",
        "joules over all cycles, mean over all learners",
    ),
    ("total_payment", "sum of orchestrator payments"),
    ("total_revenue", "sum of learner revenues"),
    (
        "avg_learning_loss",
        "c1 / (G tau^c2), idle bound for non-participants, mean over learners",
    ),
    ("participants", "learners with n > 0"),
    (
        "infeasible",
        "learners whose weight exchange alone exceeds the deadline",
    ),
    ("converged", "every leader solve met its tolerance"),
    ("concave", "every participant satisfies tau G C rho n >= 2"),
    ("cycles", "global cycles per orchestrator, ';'-separated"),
    (
        "associated",
        "associated learners per orchestrator, ';'-separated",
    ),
    (
        "orchestrator_participants",
        "participating learners per orchestrator, ';'-separated",
    ),
    (
        "nash_learner_gain",
        "largest learner deviation gain, empty unless audited",
    ),
    (
        "nash_orchestrator_gain",
        "largest orchestrator deviation gain, empty unless audited",
    ),
    (
        "epsilon_nash",
        "both gains within epsilon, empty unless audited",
    ),
];

const AGGREGATE_COLUMNS: &[(&str, &str)] = &[
    ("t_max", "deadline in seconds"),
    ("policy", "fba-opt, dba-ee or random"),
    ("seeds", "runs averaged"),
    ("avg_learner_utility", "seed mean"),
    ("avg_revenue", "seed mean"),
    ("avg_energy", "seed mean"),
    ("total_payment", "seed mean"),
    ("avg_learning_loss", "seed mean"),
    ("participants", "seed mean"),
    ("converged_runs", "runs whose leader solves all converged"),
];

fn joined<T: ToString>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

/// SHA-256 of the canonical TOML rendering of `config`, output directory
/// excluded.
pub fn config_hash(config: &RunConfig) -> String {
    let mut config = config.clone();
    config.output = Default::default();
    let digest = Sha256::digest(config.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: impl Iterator<Item = T>) -> Result<(), OutputError> {
    let err = |source| OutputError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for row in rows {
        w.serialize(row).map_err(err)?;
    }
    w.flush().map_err(|source| OutputError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_raw(path: &Path, records: &[RunRecord]) -> Result<(), OutputError> {
    write_csv(
        path,
        records.iter().map(|r| {
            let m = &r.metrics;
            RawRow {
                t_max: m.t_max,
                policy: m.policy.name(),
                seed: m.seed,
                avg_learner_utility: m.avg_learner_utility,
                avg_revenue: m.avg_revenue,
                avg_energy: m.avg_energy,
                total_payment: m.total_payment,
                total_revenue: m.total_revenue,
                avg_learning_loss: m.avg_learning_loss,
                participants: m.participants,
                infeasible: m.infeasible,
                converged: m.converged,
                concave: r.concave,
                cycles: joined(m.orchestrators.iter().map(|o| o.cycles)),
                associated: joined(m.orchestrators.iter().map(|o| o.associated)),
                orchestrator_participants: joined(m.orchestrators.iter().map(|o| o.participants)),
                nash_learner_gain: r.nash.map(|n| n.max_learner_gain),
                nash_orchestrator_gain: r.nash.map(|n| n.max_orchestrator_gain),
                epsilon_nash: r.nash.map(|n| n.is_epsilon_nash),
            }
        }),
    )
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<(), OutputError> {
    write_csv(
        path,
        rows.iter().map(|r| AggregateCsvRow {
            t_max: r.t_max,
            policy: r.policy.name(),
            seeds: r.seeds,
            avg_learner_utility: r.avg_learner_utility,
            avg_revenue: r.avg_revenue,
            avg_energy: r.avg_energy,
            total_payment: r.total_payment,
            avg_learning_loss: r.avg_learning_loss,
            participants: r.participants,
            converged_runs: r.converged_runs,
        }),
    )
}

fn columns(list: &[(&str, &str)]) -> serde_json::Value {
    list.iter()
        .map(|(name, doc)| serde_json::json!({ "name": name, "description": doc }))
        .collect()
}

pub fn write_manifest(path: &Path, config: &RunConfig) -> Result<(), OutputError> {
    let manifest = serde_json::json!({
        "config_hash": config_hash(config),
        "seeds": config.sweep.seeds,
        "t_max": config.sweep.t_max,
        "policies": config.sweep.policies,
        "mode": config.scenario.task.mode,
        "files": {
            RAW_FILE: { "columns": columns(RAW_COLUMNS) },
            AGGREGATE_FILE: { "columns": columns(AGGREGATE_COLUMNS) },
        },
        "config": config,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(path, text + "\n").map_err(|source| OutputError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Writes all three files into `dir`, creating it if needed.
pub fn emit_results(
    dir: &Path,
    config: &RunConfig,
    records: &[RunRecord],
    rows: &[AggregateRow],
) -> Result<Vec<PathBuf>, OutputError> {
    if records.is_empty() || rows.is_empty() {
        return Err(OutputError::Empty);
    }
    fs::create_dir_all(dir).map_err(|source| OutputError::Io {
        path: dir.to_owned(),
        source,
    })?;
    let raw = dir.join(RAW_FILE);
    let agg = dir.join(AGGREGATE_FILE);
    let manifest = dir.join(MANIFEST_FILE);
    write_raw(&raw, records)?;
    write_aggregate(&agg, rows)?;
    write_manifest(&manifest, config)?;
    Ok(vec![raw, agg, manifest])
}
