//! End-to-end play of both rounds for one scenario, policy and deadline.
//!
//! * `FbaOpt`: factor-based association, `G` from the weakest learner, the
//!   leader solver, learner best responses.
//! * `DbaEe`: nearest-orchestrator association, `tau_min`, `G_min`, the
//!   initial price, learner best responses.
//! * `Random`: uniform association, `G` as in `FbaOpt`, `(tau, rho)` uniform
//!   in each learner's box, learner best responses. Draws depend only on the
//!   scenario seed, so every deadline sees the same draws.
//!
//! Metrics average over all learners; a learner that stays out counts as zero
//! utility, revenue and energy, and contributes the idle loss bound.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::association::{dba_associate, fba_associate, random_associate_with, AssociationMap};
use crate::edge::{
    compute_coefficients, energies, normalized_time, times, Coefficients, LearningMode,
};
use crate::equilibrium::{verify_nash, EquilibriumReport};
use crate::error::{Error, Result};
use crate::learner::{learner_best_response, learner_utility};
use crate::orchestrator::{
    global_cycles, learner_loss, price_bounds, solve_orchestrator, weakest_learner, GroupMember,
    LeaderProblem, OrchestratorStrategy, PriceBounds, SolverConfig,
};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Policy {
    #[cfg_attr(feature = "serde", serde(rename = "fba-opt"))]
    FbaOpt,
    #[cfg_attr(feature = "serde", serde(rename = "dba-ee"))]
    DbaEe,
    #[cfg_attr(feature = "serde", serde(rename = "random"))]
    Random,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::FbaOpt, Policy::DbaEe, Policy::Random];

    pub fn name(self) -> &'static str {
        match self {
            Policy::FbaOpt => "fba-opt",
            Policy::DbaEe => "dba-ee",
            Policy::Random => "random",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or(Error::InvalidConfig {
                key: "policies",
                reason: "expected fba-opt, dba-ee or random",
            })
    }
}

/// One learner's side of the played game.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerOutcome {
    pub orchestrator: usize,
    pub tau: f64,
    pub rho: f64,
    pub n: f64,
    /// `round(n * N)`.
    pub samples: u64,
    /// Coefficients at the played price.
    pub coeffs: Coefficients,
    pub bounds: PriceBounds,
    /// Weight exchange alone exceeds the deadline.
    pub time_infeasible: bool,
    pub utility: f64,
    /// `G C rho tau n`.
    pub revenue: f64,
    /// Joules over all cycles.
    pub energy: f64,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrchestratorOutcome {
    pub strategy: OrchestratorStrategy,
    /// Associated learners in index order.
    pub members: Vec<usize>,
    pub weakest: Option<usize>,
    /// Leader solver met its tolerance; always true for the baselines.
    pub converged: bool,
    pub utility: f64,
    pub payment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyProfile {
    pub association: AssociationMap,
    pub learners: Vec<LearnerOutcome>,
    pub orchestrators: Vec<OrchestratorOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrchestratorMetrics {
    pub cycles: u32,
    pub associated: usize,
    pub participants: usize,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricsRecord {
    pub t_max: f64,
    pub policy: Policy,
    pub seed: u64,
    pub avg_learner_utility: f64,
    pub avg_revenue: f64,
    pub avg_energy: f64,
    pub total_payment: f64,
    pub total_revenue: f64,
    pub avg_learning_loss: f64,
    pub participants: usize,
    pub infeasible: usize,
    pub converged: bool,
    pub orchestrators: Vec<OrchestratorMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameOutcome {
    pub profile: StrategyProfile,
    pub metrics: MetricsRecord,
}

struct Group {
    members: Vec<usize>,
    group: Vec<GroupMember>,
}

fn group_for(
    scenario: &Scenario,
    o: usize,
    members: Vec<usize>,
    price_epsilon: f64,
) -> Result<Group> {
    let task = &scenario.tasks[o];
    let group = members
        .iter()
        .map(|&l| {
            let coeffs = compute_coefficients(
                task,
                &scenario.learners[l],
                o,
                &scenario.channel,
                &scenario.norms,
                task.initial_price,
            )?;
            let mut bounds = price_bounds(&coeffs, task)?;
            if task.mode == LearningMode::Fl {
                bounds = bounds.widened(price_epsilon * task.initial_price);
            }
            Ok(GroupMember { coeffs, bounds })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Group { members, group })
}

/// `G` from the weakest member's response at the initial price and
/// `tau_min`, assuming full participation when it would stay out.
fn weakest_cycles(scenario: &Scenario, o: usize, g: &Group) -> Result<(usize, u32)> {
    let task = &scenario.tasks[o];
    let freqs: Vec<f64> = g
        .members
        .iter()
        .map(|&l| scenario.learners[l].cpu_freq)
        .collect();
    let dists: Vec<f64> = g
        .members
        .iter()
        .map(|&l| scenario.learners[l].distances[o])
        .collect();
    let w = weakest_learner(&freqs, &dists)?;
    let coeffs = &g.group[w].coeffs;
    let br = learner_best_response(coeffs, task.tau_min, task.g_min as f64, task.n_max);
    let n = if br.n > 0.0 { br.n } else { task.n_max };
    Ok((w, global_cycles(coeffs, task.tau_min, n, task.g_min)?))
}

fn policy_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

fn draw(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    lo + (hi - lo) * u
}

pub fn run_game(
    scenario: &Scenario,
    policy: Policy,
    t_max: f64,
    solver: &SolverConfig,
) -> Result<GameOutcome> {
    let scenario = scenario.with_t_max(t_max);
    scenario.validate()?;
    let mut rng = policy_rng(scenario.seed);
    let association = match policy {
        Policy::FbaOpt => fba_associate(&scenario),
        Policy::DbaEe => dba_associate(&scenario),
        Policy::Random => random_associate_with(&scenario, &mut rng),
    };

    let mut learners: Vec<Option<LearnerOutcome>> = alloc::vec![None; scenario.learners.len()];
    let mut orchestrators = Vec::with_capacity(scenario.orchestrators());
    for o in 0..scenario.orchestrators() {
        let task = &scenario.tasks[o];
        let members = association.members(o);
        if members.is_empty() {
            orchestrators.push(OrchestratorOutcome {
                strategy: OrchestratorStrategy {
                    cycles: task.g_min,
                    taus: Vec::new(),
                    rhos: Vec::new(),
                },
                members,
                weakest: None,
                converged: true,
                utility: -crate::orchestrator::idle_loss(task) / scenario.norms.f_max,
                payment: 0.0,
            });
            continue;
        }
        let g = group_for(&scenario, o, members, solver.price_epsilon)?;
        let (weakest, cycles, taus, rhos, converged) = match policy {
            Policy::FbaOpt => {
                let (w, cycles) = weakest_cycles(&scenario, o, &g)?;
                let sol = solve_orchestrator(task, &scenario.norms, cycles, &g.group, solver)?;
                (
                    Some(w),
                    cycles,
                    sol.strategy.taus,
                    sol.strategy.rhos,
                    sol.converged,
                )
            }
            Policy::DbaEe => {
                let k = g.members.len();
                let taus = alloc::vec![task.tau_min; k];
                let rhos = alloc::vec![task.initial_price; k];
                (None, task.g_min, taus, rhos, true)
            }
            Policy::Random => {
                let (w, cycles) = weakest_cycles(&scenario, o, &g)?;
                let mut taus = Vec::with_capacity(g.members.len());
                let mut rhos = Vec::with_capacity(g.members.len());
                for m in &g.group {
                    taus.push(draw(&mut rng, task.tau_min, task.tau_max));
                    rhos.push(draw(&mut rng, m.bounds.low, m.bounds.high));
                }
                (Some(w), cycles, taus, rhos, true)
            }
        };

        let problem = LeaderProblem::new(task, &scenario.norms, cycles, g.members.len())?;
        let gf = cycles as f64;
        let mut utility = 0.0;
        let mut payment = 0.0;
        for (i, &l) in g.members.iter().enumerate() {
            let (tau, rho) = (taus[i], rhos[i]);
            let member = &g.group[i];
            let coeffs = member.coeffs.at_price(rho);
            let br = learner_best_response(&coeffs, tau, gf, task.n_max);
            let n = br.n;
            let revenue = gf * task.complexity * rho * tau * n;
            let energy = if n > 0.0 {
                let profile = &scenario.learners[l];
                let t = times(n, tau, task, profile, coeffs.rate)?;
                gf * energies(n, tau, task, profile, &scenario.channel, t.upload).total()
            } else {
                0.0
            };
            utility += problem.term_utility(tau, rho, n);
            payment += revenue;
            learners[l] = Some(LearnerOutcome {
                orchestrator: o,
                tau,
                rho,
                n,
                samples: libm::round(n * task.dataset_size) as u64,
                coeffs,
                bounds: member.bounds,
                time_infeasible: br.time_infeasible,
                utility: learner_utility(&coeffs, tau, gf, n),
                revenue,
                energy,
                loss: learner_loss(task, cycles, tau, n),
            });
        }
        orchestrators.push(OrchestratorOutcome {
            strategy: OrchestratorStrategy { cycles, taus, rhos },
            members: g.members,
            weakest,
            converged,
            utility,
            payment,
        });
    }

    let learners: Vec<LearnerOutcome> = learners
        .into_iter()
        .map(|l| l.expect("every learner is associated"))
        .collect();
    let metrics = metrics(&scenario, policy, t_max, &learners, &orchestrators);
    Ok(GameOutcome {
        profile: StrategyProfile {
            association,
            learners,
            orchestrators,
        },
        metrics,
    })
}

fn metrics(
    scenario: &Scenario,
    policy: Policy,
    t_max: f64,
    learners: &[LearnerOutcome],
    orchestrators: &[OrchestratorOutcome],
) -> MetricsRecord {
    let count = learners.len() as f64;
    let mean = |f: fn(&LearnerOutcome) -> f64| learners.iter().map(f).sum::<f64>() / count;
    // same grouping and order as the payment accumulated per orchestrator
    let total_revenue: f64 = orchestrators
        .iter()
        .map(|o| {
            o.members
                .iter()
                .fold(0.0, |acc, &l| acc + learners[l].revenue)
        })
        .sum();
    let total_payment: f64 = orchestrators.iter().map(|o| o.payment).sum();
    MetricsRecord {
        t_max,
        policy,
        seed: scenario.seed,
        avg_learner_utility: mean(|l| l.utility),
        avg_revenue: mean(|l| l.revenue),
        avg_energy: mean(|l| l.energy),
        total_payment,
        total_revenue,
        avg_learning_loss: mean(|l| l.loss),
        participants: learners.iter().filter(|l| l.n > 0.0).count(),
        infeasible: learners.iter().filter(|l| l.time_infeasible).count(),
        converged: orchestrators.iter().all(|o| o.converged),
        orchestrators: orchestrators
            .iter()
            .map(|o| OrchestratorMetrics {
                cycles: o.strategy.cycles,
                associated: o.members.len(),
                participants: o.members.iter().filter(|&&l| learners[l].n > 0.0).count(),
            })
            .collect(),
    }
}

/// Equilibrium audit over every non-empty group of a played profile.
pub fn verify_profile(
    scenario: &Scenario,
    profile: &StrategyProfile,
    t_max: f64,
    epsilon: f64,
    grid_points: usize,
) -> Result<EquilibriumReport> {
    let scenario = scenario.with_t_max(t_max);
    let mut report: Option<EquilibriumReport> = None;
    for (o, orch) in profile.orchestrators.iter().enumerate() {
        if orch.members.is_empty() {
            continue;
        }
        let task = &scenario.tasks[o];
        let members: Vec<GroupMember> = orch
            .members
            .iter()
            .map(|&l| GroupMember {
                coeffs: profile.learners[l].coeffs,
                bounds: profile.learners[l].bounds,
            })
            .collect();
        let responses: Vec<f64> = orch
            .members
            .iter()
            .map(|&l| profile.learners[l].n)
            .collect();
        let r = verify_nash(
            task,
            &scenario.norms,
            &members,
            &orch.strategy,
            &responses,
            epsilon,
            grid_points,
        )?;
        report = Some(match report {
            Some(acc) => acc.merge(r),
            None => r,
        });
    }
    report.ok_or(Error::EmptyGroup)
}

/// Every participant satisfies `tau G C rho n >= 2`, and someone participates.
pub fn concavity_holds(profile: &StrategyProfile, scenario: &Scenario) -> bool {
    let mut any = false;
    for (o, orch) in profile.orchestrators.iter().enumerate() {
        let c = scenario.tasks[o].complexity;
        for (i, &l) in orch.members.iter().enumerate() {
            let n = profile.learners[l].n;
            if n > 0.0 {
                any = true;
                let cond = crate::surrogate::concavity_condition(
                    orch.strategy.taus[i],
                    orch.strategy.cycles as f64,
                    c,
                    orch.strategy.rhos[i],
                    n,
                );
                if !cond {
                    return false;
                }
            }
        }
    }
    any
}

/// Largest normalized time over participants.
pub fn max_participant_time(profile: &StrategyProfile) -> f64 {
    profile
        .orchestrators
        .iter()
        .flat_map(|o| o.members.iter().map(move |&l| (o.strategy.cycles, l)))
        .filter(|&(_, l)| profile.learners[l].n > 0.0)
        .map(|(g, l)| {
            let lo = &profile.learners[l];
            normalized_time(lo.n, lo.tau, g as f64, &lo.coeffs)
        })
        .fold(0.0, f64::max)
}
