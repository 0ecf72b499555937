//! Cross product of deadlines, seeds and policies.

use std::collections::BTreeMap;

use mel_game::equilibrium::EquilibriumReport;
use mel_game::game::{concavity_holds, run_game, verify_profile, MetricsRecord, Policy};
use mel_game::scenario::{generate_scenario, Scenario};
use rayon::prelude::*;

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
#[error("run failed (policy {policy}, seed {seed}, t_max {t_max}): {source}")]
pub struct RunError {
    pub policy: Policy,
    pub seed: u64,
    pub t_max: f64,
    pub source: mel_game::Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub metrics: MetricsRecord,
    /// Every participant meets `tau G C rho n >= 2`.
    pub concave: bool,
    pub nash: Option<EquilibriumReport>,
}

fn run_one(
    config: &RunConfig,
    scenario: &Scenario,
    policy: Policy,
    t_max: f64,
) -> Result<RunRecord, RunError> {
    let wrap = |source| RunError {
        policy,
        seed: scenario.seed,
        t_max,
        source,
    };
    let out = run_game(scenario, policy, t_max, &config.solver).map_err(wrap)?;
    let concave = concavity_holds(&out.profile, &scenario.with_t_max(t_max));
    let nash = if config.nash.verify
        && out
            .profile
            .orchestrators
            .iter()
            .any(|o| !o.members.is_empty())
    {
        Some(
            verify_profile(
                scenario,
                &out.profile,
                t_max,
                config.nash.epsilon,
                config.nash.grid,
            )
            .map_err(wrap)?,
        )
    } else {
        None
    };
    Ok(RunRecord {
        metrics: out.metrics,
        concave,
        nash,
    })
}

/// Runs every `(t_max, seed, policy)` triple. Records come back ordered by
/// deadline, then seed, then policy, as listed in the config, whatever the
/// thread schedule.
pub fn sweep(config: &RunConfig) -> Result<Vec<RunRecord>, RunError> {
    let sw = &config.sweep;
    let scenarios = sw
        .seeds
        .par_iter()
        .map(|&seed| {
            generate_scenario(&config.scenario, seed).map_err(|source| RunError {
                policy: sw.policies[0],
                seed,
                t_max: sw.t_max[0],
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(f64, usize, Policy)> = sw
        .t_max
        .iter()
        .flat_map(|&t| {
            (0..scenarios.len()).flat_map(move |s| sw.policies.iter().map(move |&p| (t, s, p)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(t, s, p)| run_one(config, &scenarios[s], p, t))
        .collect()
}

/// Seed-averaged metrics for one `(t_max, policy)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t_max: f64,
    pub policy: Policy,
    pub seeds: usize,
    pub avg_learner_utility: f64,
    pub avg_revenue: f64,
    pub avg_energy: f64,
    pub total_payment: f64,
    pub avg_learning_loss: f64,
    pub participants: f64,
    pub converged_runs: usize,
}

/// Means over seeds, one row per `(t_max, policy)` in first-seen order.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut order: Vec<(u64, Policy)> = Vec::new();
    let mut cells: BTreeMap<(u64, Policy), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        let key = (r.metrics.t_max.to_bits(), r.metrics.policy);
        cells
            .entry(key)
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(&r.metrics);
    }
    order
        .iter()
        .map(|key| {
            let runs = &cells[key];
            let k = runs.len() as f64;
            let mean = |f: fn(&MetricsRecord) -> f64| runs.iter().map(|m| f(m)).sum::<f64>() / k;
            AggregateRow {
                t_max: f64::from_bits(key.0),
                policy: key.1,
                seeds: runs.len(),
                avg_learner_utility: mean(|m| m.avg_learner_utility),
                avg_revenue: mean(|m| m.avg_revenue),
                avg_energy: mean(|m| m.avg_energy),
                total_payment: mean(|m| m.total_payment),
                avg_learning_loss: mean(|m| m.avg_learning_loss),
                participants: mean(|m| m.participants as f64),
                converged_runs: runs.iter().filter(|m| m.converged).count(),
            }
        })
        .collect()
}
