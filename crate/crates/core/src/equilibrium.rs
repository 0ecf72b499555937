//! Unilateral-deviation audit of a solved second round.
//!
//! Learners may deviate to any time-feasible `n` on a grid over
//! `[0, n_max]`. The orchestrator may deviate to any `(tau, rho)` on a grid
//! over each learner's box, with that learner re-responding. The leader
//! objective is separable, so its best joint deviation gains the sum of the
//! per-learner gains.

use alloc::vec::Vec;

use crate::edge::{normalized_time, NormConstants, TaskSpec};
use crate::error::{Error, Result};
use crate::learner::learner_utility;
use crate::orchestrator::{GroupMember, LeaderProblem, OrchestratorStrategy};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquilibriumReport {
    pub max_learner_gain: f64,
    pub max_orchestrator_gain: f64,
    pub is_epsilon_nash: bool,
    pub epsilon: f64,
}

impl EquilibriumReport {
    fn new(max_learner_gain: f64, max_orchestrator_gain: f64, epsilon: f64) -> Self {
        Self {
            max_learner_gain,
            max_orchestrator_gain,
            is_epsilon_nash: max_learner_gain <= epsilon && max_orchestrator_gain <= epsilon,
            epsilon,
        }
    }

    /// Worst case over several groups.
    pub fn merge(self, other: Self) -> Self {
        Self::new(
            self.max_learner_gain.max(other.max_learner_gain),
            self.max_orchestrator_gain.max(other.max_orchestrator_gain),
            self.epsilon.min(other.epsilon),
        )
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    (0..points).map(move |i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
}

/// Best gain learner `member` can get by moving away from `n`.
pub fn learner_deviation_gain(
    task: &TaskSpec,
    member: &GroupMember,
    cycles: u32,
    tau: f64,
    rho: f64,
    n: f64,
    grid_points: usize,
) -> f64 {
    let coeffs = member.coeffs.at_price(rho);
    let g = cycles as f64;
    let current = learner_utility(&coeffs, tau, g, n);
    grid(0.0, task.n_max, grid_points)
        .filter(|&m| m == 0.0 || normalized_time(m, tau, g, &coeffs) <= 1.0)
        .map(|m| learner_utility(&coeffs, tau, g, m) - current)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[allow(clippy::too_many_arguments)]
pub fn verify_nash(
    task: &TaskSpec,
    norms: &NormConstants,
    members: &[GroupMember],
    strategy: &OrchestratorStrategy,
    responses: &[f64],
    epsilon: f64,
    grid_points: usize,
) -> Result<EquilibriumReport> {
    let problem = LeaderProblem::new(task, norms, strategy.cycles, members.len())?;
    if strategy.taus.len() != members.len()
        || strategy.rhos.len() != members.len()
        || responses.len() != members.len()
    {
        return Err(Error::InvalidConfig {
            key: "profile",
            reason: "one strategy and response per learner",
        });
    }
    let mut learner_gain = f64::NEG_INFINITY;
    let mut leader_gains = Vec::with_capacity(members.len());
    for (i, member) in members.iter().enumerate() {
        let (tau, rho, n) = (strategy.taus[i], strategy.rhos[i], responses[i]);
        learner_gain = learner_gain.max(learner_deviation_gain(
            task,
            member,
            strategy.cycles,
            tau,
            rho,
            n,
            grid_points,
        ));

        let current = problem.term_utility(tau, rho, n);
        let mut best = f64::NEG_INFINITY;
        for t in grid(task.tau_min, task.tau_max, grid_points) {
            for r in grid(member.bounds.low, member.bounds.high, grid_points) {
                best = best.max(problem.respond(&member.coeffs, t, r).0);
            }
        }
        leader_gains.push(best - current);
    }
    let positive: f64 = leader_gains.iter().filter(|g| **g > 0.0).sum();
    let leader_gain = if positive > 0.0 {
        positive
    } else {
        leader_gains
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(EquilibriumReport::new(learner_gain, leader_gain, epsilon))
}
