//! Seeded scenario generation.
//!
//! Learners are dropped at uniform distances from every orchestrator and pick
//! one CPU frequency from a fixed menu. Orchestrators differ by model depth:
//! both the weight count and the per-sample cycle count scale with it.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edge::{ChannelParams, LearnerProfile, LearningMode, NormConstants, TaskSpec};
use crate::error::{Error, Result};
use crate::math;

/// Task parameters shared by every orchestrator; per-orchestrator values
/// come from the depth and initial price lists of [`ScenarioConfig`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TaskTemplate {
    pub dataset_size: f64,
    pub feature_len: f64,
    pub bits_per_feature: f64,
    pub bits_per_weight: f64,
    pub weights_per_layer: f64,
    pub cycles_per_layer: f64,
    pub c1: f64,
    pub c2: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub g_min: u32,
    pub n_max: f64,
    /// Replaced by each sweep point.
    pub t_max: f64,
    pub mode: LearningMode,
}

impl Default for TaskTemplate {
    fn default() -> Self {
        Self {
            dataset_size: 6000.0,
            feature_len: 784.0,
            bits_per_feature: 8.0,
            bits_per_weight: 32.0,
            weights_per_layer: 2.0e4,
            cycles_per_layer: 1.2e5,
            c1: 1.0,
            c2: 1.0,
            tau_min: 1.0,
            tau_max: 10.0,
            g_min: 1,
            n_max: 0.1,
            t_max: 20.0,
            mode: LearningMode::Pl,
        }
    }
}

impl TaskTemplate {
    pub fn build(&self, depth: u32, initial_price: f64) -> TaskSpec {
        TaskSpec {
            dataset_size: self.dataset_size,
            feature_len: self.feature_len,
            bits_per_feature: self.bits_per_feature,
            bits_per_weight: self.bits_per_weight,
            weight_count: self.weights_per_layer * depth as f64,
            complexity: self.cycles_per_layer * depth as f64,
            c1: self.c1,
            c2: self.c2,
            initial_price,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            g_min: self.g_min,
            n_max: self.n_max,
            t_max: self.t_max,
            mode: self.mode,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub learners: usize,
    /// Hidden layers of each orchestrator's model.
    pub depths: Vec<u32>,
    /// Price per CPU cycle each orchestrator broadcasts in the first round.
    pub initial_prices: Vec<f64>,
    pub task: TaskTemplate,
    /// Metres, `[min, max]`.
    pub distance_range: [f64; 2],
    /// Hz; each learner draws one uniformly.
    pub cpu_freqs: Vec<f64>,
    /// Joules per unit participation, `[min, max]`.
    pub recv_energy_range: [f64; 2],
    pub hw_mu: f64,
    pub hw_xi: f64,
    /// Draw a unit-mean Rayleigh coefficient per link instead of `g = 1`.
    pub rayleigh_fading: bool,
    pub channel: ChannelParams,
    pub norms: NormConstants,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            learners: 50,
            depths: vec![3, 4, 5],
            initial_prices: vec![1.2e-5, 1.3e-5, 1.4e-5],
            task: TaskTemplate::default(),
            distance_range: [5.0, 50.0],
            cpu_freqs: vec![2.4e9, 1.4e9, 1.0e9],
            recv_energy_range: [0.1, 0.3],
            hw_mu: 1.0e-27,
            hw_xi: 2.0,
            rayleigh_fading: true,
            channel: ChannelParams::default(),
            norms: NormConstants::default(),
        }
    }
}

fn range_ok(key: &'static str, [lo, hi]: [f64; 2], strictly_positive: bool) -> Result<()> {
    let lo_ok = if strictly_positive {
        lo > 0.0
    } else {
        lo >= 0.0
    };
    if !(lo_ok && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidConfig {
            key,
            reason: "expected 0 <= min <= max (min > 0 for distances)",
        });
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn orchestrators(&self) -> usize {
        self.depths.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.learners == 0 {
            return Err(Error::InvalidConfig {
                key: "scenario.learners",
                reason: "must be at least 1",
            });
        }
        if self.depths.is_empty() || self.depths.contains(&0) {
            return Err(Error::InvalidConfig {
                key: "scenario.depths",
                reason: "need at least one orchestrator, each with depth >= 1",
            });
        }
        if self.initial_prices.len() != self.depths.len() {
            return Err(Error::InvalidConfig {
                key: "scenario.initial_prices",
                reason: "one price per orchestrator",
            });
        }
        if self
            .initial_prices
            .iter()
            .any(|p| !(*p > 0.0 && p.is_finite()))
        {
            return Err(Error::InvalidConfig {
                key: "scenario.initial_prices",
                reason: "prices must be positive",
            });
        }
        range_ok("scenario.distance_range", self.distance_range, true)?;
        range_ok("scenario.recv_energy_range", self.recv_energy_range, false)?;
        if self.cpu_freqs.is_empty() || self.cpu_freqs.iter().any(|f| !(*f > 0.0 && f.is_finite()))
        {
            return Err(Error::InvalidConfig {
                key: "scenario.cpu_freqs",
                reason: "need at least one positive frequency",
            });
        }
        crate::edge::non_negative("scenario.hw_mu", self.hw_mu)?;
        crate::edge::positive("scenario.hw_xi", self.hw_xi)?;
        self.channel.validate()?;
        self.norms.validate()?;
        self.task
            .build(self.depths[0], self.initial_prices[0])
            .validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub tasks: Vec<TaskSpec>,
    pub learners: Vec<LearnerProfile>,
    pub channel: ChannelParams,
    pub norms: NormConstants,
    pub seed: u64,
}

impl Scenario {
    pub fn orchestrators(&self) -> usize {
        self.tasks.len()
    }

    pub fn with_t_max(&self, t_max: f64) -> Self {
        Self {
            tasks: self.tasks.iter().map(|t| t.with_t_max(t_max)).collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::InvalidConfig {
                key: "scenario.tasks",
                reason: "need at least one orchestrator",
            });
        }
        for task in &self.tasks {
            task.validate()?;
        }
        for learner in &self.learners {
            learner.validate(self.tasks.len())?;
        }
        self.channel.validate()?;
        self.norms.validate()
    }
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

/// Unit-mean Rayleigh amplitude, floored away from zero.
fn rayleigh(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random();
    let scale = math::sqrt(2.0 / core::f64::consts::PI);
    (scale * math::sqrt(-2.0 * math::ln(1.0 - u))).max(1.0e-6)
}

pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let tasks = config
        .depths
        .iter()
        .zip(&config.initial_prices)
        .map(|(&depth, &price)| config.task.build(depth, price))
        .collect::<Vec<_>>();
    let orchestrators = tasks.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let learners = (0..config.learners)
        .map(|_| {
            let cpu_freq = config.cpu_freqs[rng.random_range(0..config.cpu_freqs.len())];
            let recv_energy = uniform(&mut rng, config.recv_energy_range);
            let distances = (0..orchestrators)
                .map(|_| uniform(&mut rng, config.distance_range))
                .collect();
            let fading = (0..orchestrators)
                .map(|_| {
                    if config.rayleigh_fading {
                        rayleigh(&mut rng)
                    } else {
                        1.0
                    }
                })
                .collect();
            LearnerProfile {
                cpu_freq,
                hw_mu: config.hw_mu,
                hw_xi: config.hw_xi,
                recv_energy,
                distances,
                fading,
            }
        })
        .collect();
    Ok(Scenario {
        tasks,
        learners,
        channel: config.channel,
        norms: config.norms,
        seed,
    })
}
