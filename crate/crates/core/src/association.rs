//! First-round association policies.
//!
//! Every policy returns an [`AssociationMap`], which sends each learner to
//! exactly one orchestrator. Ties always go to the lowest orchestrator index.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edge::compute_coefficients;
use crate::error::{Error, Result};
use crate::learner::learner_utility;
use crate::scenario::Scenario;

/// Distance floor applied after normalization.
pub const DISTANCE_FLOOR: f64 = 1.0e-6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssociationMap(Vec<usize>);

impl AssociationMap {
    /// Fails when a learner names an orchestrator outside `0..orchestrators`.
    pub fn new(choice: Vec<usize>, orchestrators: usize) -> Result<Self> {
        if choice.iter().any(|&o| o >= orchestrators) {
            return Err(Error::InvalidConfig {
                key: "association",
                reason: "orchestrator index out of range",
            });
        }
        Ok(Self(choice))
    }

    pub fn orchestrator_of(&self, learner: usize) -> usize {
        self.0[learner]
    }

    /// Learners associated with `orchestrator`, in index order.
    pub fn members(&self, orchestrator: usize) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &o)| o == orchestrator)
            .map(|(l, _)| l)
            .collect()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `rho * C / d` on normalized inputs, with `d` floored at
/// [`DISTANCE_FLOOR`].
pub fn association_factor(rho_norm: f64, complexity_norm: f64, distance_norm: f64) -> f64 {
    rho_norm * complexity_norm / distance_norm.max(DISTANCE_FLOOR)
}

fn min_max(values: impl Iterator<Item = f64> + Clone) -> impl Fn(f64) -> f64 {
    let lo = values.clone().fold(f64::INFINITY, f64::min);
    let hi = values.fold(f64::NEG_INFINITY, f64::max);
    move |x| if hi > lo { (x - lo) / (hi - lo) } else { 1.0 }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Factor table `[learner][orchestrator]`. Prices and complexities are
/// min-max normalized across orchestrators, distances across all pairs; a
/// constant quantity normalizes to 1.
pub fn association_factors(scenario: &Scenario) -> Vec<Vec<f64>> {
    let prices = min_max(scenario.tasks.iter().map(|t| t.initial_price));
    let complexities = min_max(scenario.tasks.iter().map(|t| t.complexity));
    let distances = min_max(
        scenario
            .learners
            .iter()
            .flat_map(|l| l.distances.iter().copied()),
    );
    scenario
        .learners
        .iter()
        .map(|l| {
            scenario
                .tasks
                .iter()
                .zip(&l.distances)
                .map(|(t, &d)| {
                    association_factor(
                        prices(t.initial_price),
                        complexities(t.complexity),
                        distances(d),
                    )
                })
                .collect()
        })
        .collect()
}

pub fn fba_associate(scenario: &Scenario) -> AssociationMap {
    let choice = association_factors(scenario)
        .iter()
        .map(|row| argmax(row.iter().copied()))
        .collect();
    AssociationMap(choice)
}

pub fn dba_associate(scenario: &Scenario) -> AssociationMap {
    let choice = scenario
        .learners
        .iter()
        .map(|l| argmax(l.distances.iter().map(|d| -d)))
        .collect();
    AssociationMap(choice)
}

pub fn random_associate(scenario: &Scenario, seed: u64) -> AssociationMap {
    random_associate_with(scenario, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_associate_with<R: Rng>(scenario: &Scenario, rng: &mut R) -> AssociationMap {
    let orchestrators = scenario.orchestrators();
    let choice = scenario
        .learners
        .iter()
        .map(|_| rng.random_range(0..orchestrators))
        .collect();
    AssociationMap(choice)
}

/// First-round learner objective for `learner` joining `orchestrator` at the
/// initial price, `G_min` cycles and the fixed `(n, tau)`; `-inf` when the
/// time budget is violated.
pub fn sp1_score(
    scenario: &Scenario,
    learner: usize,
    orchestrator: usize,
    n: f64,
    tau: f64,
) -> Result<f64> {
    let task = &scenario.tasks[orchestrator];
    let coeffs = compute_coefficients(
        task,
        &scenario.learners[learner],
        orchestrator,
        &scenario.channel,
        &scenario.norms,
        task.initial_price,
    )?;
    let cycles = task.g_min as f64;
    if crate::edge::normalized_time(n, tau, cycles, &coeffs) > 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(learner_utility(&coeffs, tau, cycles, n))
}

/// Per-learner exhaustive maximizer of [`sp1_score`], falling back to the
/// FBA choice when no orchestrator is feasible. Meant for small instances.
pub fn sp1_oracle_associate(
    scenario: &Scenario,
    fixed_n: f64,
    fixed_tau: f64,
) -> Result<AssociationMap> {
    let fallback = fba_associate(scenario);
    let mut choice = Vec::with_capacity(scenario.learners.len());
    for l in 0..scenario.learners.len() {
        let scores = (0..scenario.orchestrators())
            .map(|o| sp1_score(scenario, l, o, fixed_n, fixed_tau))
            .collect::<Result<Vec<_>>>()?;
        if scores.iter().all(|s| *s == f64::NEG_INFINITY) {
            choice.push(fallback.orchestrator_of(l));
        } else {
            choice.push(argmax(scores.into_iter()));
        }
    }
    Ok(AssociationMap(choice))
}
