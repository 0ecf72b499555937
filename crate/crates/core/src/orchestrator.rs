//! Leader side of the second round.
//!
//! An orchestrator fixes its global cycle count from the weakest associated
//! learner, bounds each learner's price so that participation is possible for
//! some admissible iteration count, and then picks per-learner
//! `(tau, rho)` maximizing
//!
//! ```text
//! U = -1/(F_max |L|) * sum_l loss_l  -  G C / P_max * sum_l rho_l tau_l n_l
//! ```
//!
//! with `n_l` the learner's best response. A learner that stays out
//! contributes the loss bound at `(tau_min, G_min)`, the same convention used
//! for an orchestrator nobody joined.
//!
//! The objective is separable across learners. Once a learner participates,
//! its share `n` no longer depends on the price, so the payment term only
//! falls as `rho` drops: for each `tau` the best price is the lowest one the
//! learner still accepts (the participation frontier). The solver therefore
//! runs projected gradient ascent in `tau` along that frontier, and guards it
//! with a frontier scan and a box grid.

use alloc::vec::Vec;

use crate::edge::{normalized_time, Coefficients, NormConstants, TaskSpec};
use crate::error::{Error, Result};
use crate::learner::{learner_best_response, participation_cap, BestResponse};
use crate::math;

/// Index of the learner with the smallest normalized `f / d`. Frequencies and
/// distances are divided by their group maxima. Ties go to the lowest index.
pub fn weakest_learner(freqs: &[f64], distances: &[f64]) -> Result<usize> {
    if freqs.is_empty() || freqs.len() != distances.len() {
        return Err(Error::EmptyGroup);
    }
    let f_max = freqs.iter().copied().fold(f64::MIN, f64::max);
    let d_max = distances.iter().copied().fold(f64::MIN, f64::max);
    let mut best = 0;
    let mut best_ratio = f64::INFINITY;
    for (i, (&f, &d)) in freqs.iter().zip(distances).enumerate() {
        let ratio = (f / f_max) / (d / d_max);
        if ratio < best_ratio {
            best = i;
            best_ratio = ratio;
        }
    }
    Ok(best)
}

/// `max(G_min, floor(1 / (A2 tau n + A1 n + A0)))` for the weakest learner.
pub fn global_cycles(weak: &Coefficients, tau: f64, n: f64, g_min: u32) -> Result<u32> {
    let per_cycle = normalized_time(n, tau, 1.0, weak);
    if !(per_cycle > 0.0) {
        return Err(Error::ZeroDenominator("global cycles"));
    }
    let fit = math::floor(1.0 / per_cycle);
    let fit = if fit >= u32::MAX as f64 {
        u32::MAX
    } else {
        fit as u32
    };
    Ok(fit.max(g_min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceBounds {
    pub low: f64,
    pub high: f64,
}

impl PriceBounds {
    /// Opens a collapsed interval to `[low, low + min_width]`. Used in FL mode,
    /// where `zeta1 = 0` removes the iteration dependence of both bounds.
    pub fn widened(self, min_width: f64) -> Self {
        if self.high - self.low < min_width {
            Self {
                low: self.low,
                high: self.low + min_width,
            }
        } else {
            self
        }
    }

    pub fn contains(&self, rho: f64) -> bool {
        rho >= self.low && rho <= self.high
    }
}

/// Price interval from the break-even condition `zeta2(rho) tau >= zeta1`:
/// the low end breaks even at `tau_max`, the high end at `tau_min`.
pub fn price_bounds(coeffs: &Coefficients, task: &TaskSpec) -> Result<PriceBounds> {
    if !(coeffs.price_slope > 0.0) {
        return Err(Error::ZeroDenominator("price bounds"));
    }
    let at = |tau: f64| (coeffs.zeta1 / tau + coeffs.energy_offset) / coeffs.price_slope;
    Ok(PriceBounds {
        low: at(task.tau_max),
        high: at(task.tau_min),
    })
}

/// One learner's share of the orchestrator objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerTerm {
    pub tau: f64,
    pub rho: f64,
    pub n: f64,
}

/// Loss bound charged for a learner: `c1 / (G tau^c2)` when it trains, the
/// `(tau_min, G_min)` bound when it does not.
pub fn learner_loss(task: &TaskSpec, cycles: u32, tau: f64, n: f64) -> f64 {
    if n > 0.0 {
        task.c1 / (cycles as f64 * math::powf(tau, task.c2))
    } else {
        idle_loss(task)
    }
}

pub fn idle_loss(task: &TaskSpec) -> f64 {
    task.c1 / (task.g_min as f64 * math::powf(task.tau_min, task.c2))
}

/// Normalized orchestrator utility for fixed responses.
pub fn orchestrator_utility(
    task: &TaskSpec,
    norms: &NormConstants,
    cycles: u32,
    terms: &[LearnerTerm],
) -> Result<f64> {
    let problem = LeaderProblem::new(task, norms, cycles, terms.len())?;
    Ok(terms
        .iter()
        .map(|t| problem.term_utility(t.tau, t.rho, t.n))
        .sum())
}

/// The orchestrator objective for one group, split per learner.
#[derive(Debug, Clone, Copy)]
pub struct LeaderProblem<'a> {
    pub task: &'a TaskSpec,
    pub norms: &'a NormConstants,
    pub cycles: u32,
    pub group_size: usize,
}

impl<'a> LeaderProblem<'a> {
    pub fn new(
        task: &'a TaskSpec,
        norms: &'a NormConstants,
        cycles: u32,
        group_size: usize,
    ) -> Result<Self> {
        if group_size == 0 {
            return Err(Error::EmptyGroup);
        }
        Ok(Self {
            task,
            norms,
            cycles,
            group_size,
        })
    }

    fn quality_weight(&self) -> f64 {
        1.0 / (self.norms.f_max * self.group_size as f64)
    }

    fn payment_weight(&self) -> f64 {
        self.cycles as f64 * self.task.complexity / self.norms.p_max
    }

    pub fn term_utility(&self, tau: f64, rho: f64, n: f64) -> f64 {
        let loss = learner_loss(self.task, self.cycles, tau, n);
        -self.quality_weight() * loss - self.payment_weight() * rho * tau * n
    }

    /// Learner best response at `(tau, rho)` and the resulting term.
    pub fn respond(&self, base: &Coefficients, tau: f64, rho: f64) -> (f64, BestResponse) {
        let br = learner_best_response(
            &base.at_price(rho),
            tau,
            self.cycles as f64,
            self.task.n_max,
        );
        (self.term_utility(tau, rho, br.n), br)
    }

    /// Lowest admissible price at which the learner participates at `tau`,
    /// or `None` when no price in the box buys participation.
    pub fn frontier_price(
        &self,
        base: &Coefficients,
        bounds: &PriceBounds,
        tau: f64,
    ) -> Option<f64> {
        let cycles = self.cycles as f64;
        let cap = participation_cap(base, tau, cycles, self.task.n_max);
        if !(cap > 0.0) || !(base.price_slope > 0.0) {
            return None;
        }
        let need = ((base.zeta1 + base.zeta0 / cap) / tau + base.energy_offset) / base.price_slope;
        let mut rho = need.max(bounds.low);
        // step over the break-even point when rounding lands just short of it
        let mut nudge = rho.abs() * 1e-14 + f64::MIN_POSITIVE;
        for _ in 0..64 {
            if rho > bounds.high {
                return None;
            }
            let br = learner_best_response(&base.at_price(rho), tau, cycles, self.task.n_max);
            if br.n > 0.0 {
                return Some(rho);
            }
            rho += nudge;
            nudge *= 4.0;
        }
        None
    }

    fn frontier_value(
        &self,
        base: &Coefficients,
        bounds: &PriceBounds,
        tau: f64,
    ) -> Option<(f64, f64)> {
        let rho = self.frontier_price(base, bounds, tau)?;
        Some((self.respond(base, tau, rho).0, rho))
    }

    /// Derivative of the frontier value in `tau`, ignoring the rounding nudge.
    fn frontier_slope(&self, base: &Coefficients, bounds: &PriceBounds, tau: f64) -> f64 {
        let cycles = self.cycles as f64;
        let task = self.task;
        let slack = 1.0 - cycles * base.a0;
        let per_unit = cycles * (base.a2 * tau + base.a1);
        let (n, dn) = if per_unit > 0.0 && slack / per_unit < task.n_max {
            (
                slack / per_unit,
                -slack * base.a2 / (cycles * (base.a2 * tau + base.a1).powi_2()),
            )
        } else {
            (task.n_max, 0.0)
        };
        let dquality =
            self.quality_weight() * task.c1 * task.c2 / (cycles * math::powf(tau, task.c2 + 1.0));
        let raw = ((base.zeta1 + base.zeta0 / n) / tau + base.energy_offset) / base.price_slope;
        let dspend = if raw >= bounds.low {
            (base.zeta1 * dn + base.energy_offset * (n + tau * dn)) / base.price_slope
        } else {
            bounds.low * (n + tau * dn)
        };
        dquality - self.payment_weight() * dspend
    }
}

trait Square {
    fn powi_2(self) -> f64;
}

impl Square for f64 {
    #[inline]
    fn powi_2(self) -> f64 {
        self * self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverConfig {
    /// Stop once the projected gradient is below this.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Points per axis of the box grid checked after the ascent.
    pub refine_grid: usize,
    /// Points on the participation frontier checked after the ascent.
    pub frontier_samples: usize,
    /// Width, as a multiple of the initial price, given to a price box that
    /// collapses to a point (FL mode).
    pub price_epsilon: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_steps: 10_000,
            refine_grid: 32,
            frontier_samples: 256,
            price_epsilon: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        crate::edge::positive("solver.tolerance", self.tolerance)?;
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig {
                key: "solver.max_steps",
                reason: "must be at least 1",
            });
        }
        if self.refine_grid < 2 {
            return Err(Error::InvalidConfig {
                key: "solver.refine_grid",
                reason: "must be at least 2",
            });
        }
        crate::edge::non_negative("solver.price_epsilon", self.price_epsilon)
    }
}

/// A learner as its orchestrator sees it in the second round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMember {
    /// Coefficients at any price; `zeta2` is re-evaluated per candidate.
    pub coeffs: Coefficients,
    pub bounds: PriceBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrchestratorStrategy {
    pub cycles: u32,
    pub taus: Vec<f64>,
    pub rhos: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrchestratorSolution {
    pub strategy: OrchestratorStrategy,
    /// Best responses at the returned strategy.
    pub responses: Vec<f64>,
    pub utility: f64,
    /// Every per-learner ascent met the projected-gradient tolerance.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    tau: f64,
    rho: f64,
    value: f64,
}

impl Candidate {
    fn keep_better(&mut self, other: Candidate) {
        if other.value > self.value {
            *self = other;
        }
    }
}

pub fn solve_orchestrator(
    task: &TaskSpec,
    norms: &NormConstants,
    cycles: u32,
    members: &[GroupMember],
    config: &SolverConfig,
) -> Result<OrchestratorSolution> {
    let problem = LeaderProblem::new(task, norms, cycles, members.len())?;
    let mut taus = Vec::with_capacity(members.len());
    let mut rhos = Vec::with_capacity(members.len());
    let mut responses = Vec::with_capacity(members.len());
    let mut utility = 0.0;
    let mut converged = true;
    for member in members {
        let (best, ok) = solve_member(&problem, member, config);
        let (value, br) = problem.respond(&member.coeffs, best.tau, best.rho);
        taus.push(best.tau);
        rhos.push(best.rho);
        responses.push(br.n);
        utility += value;
        converged &= ok;
    }
    Ok(OrchestratorSolution {
        strategy: OrchestratorStrategy { cycles, taus, rhos },
        responses,
        utility,
        converged,
    })
}

fn grid_point(lo: f64, hi: f64, i: usize, count: usize) -> f64 {
    if count <= 1 || hi <= lo {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (count - 1) as f64
    }
}

fn solve_member(
    problem: &LeaderProblem<'_>,
    member: &GroupMember,
    config: &SolverConfig,
) -> (Candidate, bool) {
    let task = problem.task;
    let (base, bounds) = (&member.coeffs, &member.bounds);
    let eval = |tau: f64, rho: f64| Candidate {
        tau,
        rho,
        value: problem.respond(base, tau, rho).0,
    };

    let mut best = eval(task.tau_min, bounds.low);
    let mut converged = true;

    if let Some((lo, hi)) = frontier_interval(problem, base, bounds) {
        let (ascent, ok) = frontier_ascent(problem, base, bounds, lo, hi, config);
        converged = ok;
        best.keep_better(ascent);
        let samples = config.frontier_samples.max(2);
        for i in 0..samples {
            let tau = grid_point(lo, hi, i, samples);
            if let Some((value, rho)) = problem.frontier_value(base, bounds, tau) {
                best.keep_better(Candidate { tau, rho, value });
            }
        }
    }

    let k = config.refine_grid.max(2);
    for i in 0..k {
        let tau = grid_point(task.tau_min, task.tau_max, i, k);
        for j in 0..k {
            best.keep_better(eval(tau, grid_point(bounds.low, bounds.high, j, k)));
        }
    }
    (best, converged)
}

/// `[tau_lo, tau_max]` on which some in-box price buys participation. The
/// frontier price falls with `tau`, so the set is an interval ending at
/// `tau_max`.
fn frontier_interval(
    problem: &LeaderProblem<'_>,
    base: &Coefficients,
    bounds: &PriceBounds,
) -> Option<(f64, f64)> {
    let task = problem.task;
    problem.frontier_price(base, bounds, task.tau_max)?;
    if problem.frontier_price(base, bounds, task.tau_min).is_some() {
        return Some((task.tau_min, task.tau_max));
    }
    let (mut bad, mut good) = (task.tau_min, task.tau_max);
    for _ in 0..100 {
        let mid = 0.5 * (bad + good);
        if mid <= bad || mid >= good {
            break;
        }
        if problem.frontier_price(base, bounds, mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some((good, task.tau_max))
}

fn frontier_ascent(
    problem: &LeaderProblem<'_>,
    base: &Coefficients,
    bounds: &PriceBounds,
    lo: f64,
    hi: f64,
    config: &SolverConfig,
) -> (Candidate, bool) {
    let value_at = |tau: f64| problem.frontier_value(base, bounds, tau);
    let clamp = |tau: f64| tau.clamp(lo, hi);

    let mut tau = 0.5 * (lo + hi);
    let Some((mut value, mut rho)) = value_at(tau) else {
        return (
            Candidate {
                tau: hi,
                rho: bounds.low,
                value: f64::NEG_INFINITY,
            },
            false,
        );
    };
    if hi <= lo {
        return (Candidate { tau, rho, value }, true);
    }

    let mut converged = false;
    'outer: for _ in 0..config.max_steps {
        let slope = problem.frontier_slope(base, bounds, tau);
        let projected = clamp(tau + slope) - tau;
        if math::abs(projected) < config.tolerance {
            converged = true;
            break;
        }
        let mut step = (hi - lo) / math::abs(slope);
        loop {
            let next = clamp(tau + step * slope);
            if next == tau {
                // no representable move left along the ascent direction
                converged = math::abs(slope) * (hi - lo) <= 1e-12 * value.abs().max(1e-300);
                break 'outer;
            }
            if let Some((v, r)) = value_at(next) {
                if v >= value + 1e-4 * slope * (next - tau) {
                    tau = next;
                    value = v;
                    rho = r;
                    break;
                }
            }
            step *= 0.5;
        }
    }
    (Candidate { tau, rho, value }, converged)
}
