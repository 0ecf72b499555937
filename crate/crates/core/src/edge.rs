//! Wireless, compute and energy models of a learner–orchestrator link.
//!
//! Everything here is a pure function of its inputs. Participation `n` is a
//! continuous fraction of the task dataset in `[0, 1]`; times are seconds and
//! energies joules. [`compute_coefficients`] folds the models into the six
//! normalized scalars the game works with:
//!
//! | scalar | meaning                                          |
//! |--------|--------------------------------------------------|
//! | `a0`   | weight exchange time per cycle, fraction of `T_max` |
//! | `a1`   | data reception time per unit `n`                  |
//! | `a2`   | training time per unit `n` per local iteration    |
//! | `zeta0`| normalized upload energy per cycle                |
//! | `zeta1`| reception energy per unit `n`                     |
//! | `zeta2`| normalized revenue minus compute energy per iteration |

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum LearningMode {
    /// Parallelized learning: the orchestrator ships data to learners.
    #[default]
    Pl,
    /// Federated learning: data stays on the learner, so nothing is received.
    Fl,
}

/// Static channel shared by every link. The per-link fading coefficient lives
/// on [`LearnerProfile`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ChannelParams {
    /// Hz.
    pub bandwidth: f64,
    /// W.
    pub noise_var: f64,
    pub pathloss_exp: f64,
    /// W.
    pub tx_power: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            bandwidth: 1.0e6,
            noise_var: 1.0e-10,
            pathloss_exp: 4.0,
            tx_power: 0.1,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        positive("channel.bandwidth", self.bandwidth)?;
        positive("channel.noise_var", self.noise_var)?;
        positive("channel.pathloss_exp", self.pathloss_exp)?;
        positive("channel.tx_power", self.tx_power)
    }
}

/// One orchestrator's learning task.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSpec {
    /// Samples in the orchestrator's dataset.
    pub dataset_size: f64,
    pub feature_len: f64,
    pub bits_per_feature: f64,
    pub bits_per_weight: f64,
    pub weight_count: f64,
    /// CPU cycles to train on one sample.
    pub complexity: f64,
    pub c1: f64,
    pub c2: f64,
    /// Broadcast price per CPU cycle used in the first round.
    pub initial_price: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub g_min: u32,
    pub n_max: f64,
    /// Seconds available for the whole learning process.
    pub t_max: f64,
    pub mode: LearningMode,
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        non_negative("task.dataset_size", self.dataset_size)?;
        non_negative("task.feature_len", self.feature_len)?;
        non_negative("task.bits_per_feature", self.bits_per_feature)?;
        non_negative("task.bits_per_weight", self.bits_per_weight)?;
        non_negative("task.weight_count", self.weight_count)?;
        positive("task.complexity", self.complexity)?;
        positive("task.c1", self.c1)?;
        positive("task.c2", self.c2)?;
        non_negative("task.initial_price", self.initial_price)?;
        if !(self.tau_min >= 1.0) {
            return Err(Error::domain("task.tau_min", self.tau_min));
        }
        if !(self.tau_max >= self.tau_min) {
            return Err(Error::domain("task.tau_max", self.tau_max));
        }
        if self.g_min < 1 {
            return Err(Error::domain("task.g_min", self.g_min as f64));
        }
        if !(self.n_max > 0.0 && self.n_max <= 1.0) {
            return Err(Error::domain("task.n_max", self.n_max));
        }
        positive("task.t_max", self.t_max)
    }

    pub fn with_t_max(&self, t_max: f64) -> Self {
        Self {
            t_max,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerProfile {
    /// Hz.
    pub cpu_freq: f64,
    pub hw_mu: f64,
    pub hw_xi: f64,
    /// Joules per unit participation fraction. Ignored in FL mode.
    pub recv_energy: f64,
    /// Metres to each orchestrator.
    pub distances: alloc::vec::Vec<f64>,
    /// Frozen fading coefficient `g` of the link to each orchestrator.
    pub fading: alloc::vec::Vec<f64>,
}

impl LearnerProfile {
    pub fn validate(&self, orchestrators: usize) -> Result<()> {
        positive("learner.cpu_freq", self.cpu_freq)?;
        non_negative("learner.recv_energy", self.recv_energy)?;
        if self.distances.len() != orchestrators || self.fading.len() != orchestrators {
            return Err(Error::InvalidConfig {
                key: "learner.distances",
                reason: "one distance and fading value per orchestrator",
            });
        }
        for &d in &self.distances {
            positive("learner.distances", d)?;
        }
        Ok(())
    }

    /// Reception energy as the task's mode sees it.
    pub fn effective_recv_energy(&self, mode: LearningMode) -> f64 {
        match mode {
            LearningMode::Pl => self.recv_energy,
            LearningMode::Fl => 0.0,
        }
    }
}

/// Scales that bring energy, revenue, payment and loss onto a common footing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct NormConstants {
    pub e_max: f64,
    pub r_max: f64,
    pub p_max: f64,
    pub f_max: f64,
}

impl Default for NormConstants {
    fn default() -> Self {
        Self {
            e_max: 1.0,
            r_max: 10.0,
            p_max: 1000.0,
            f_max: 1.0,
        }
    }
}

impl NormConstants {
    pub fn validate(&self) -> Result<()> {
        positive("norms.e_max", self.e_max)?;
        positive("norms.r_max", self.r_max)?;
        positive("norms.p_max", self.p_max)?;
        positive("norms.f_max", self.f_max)
    }
}

/// Normalized per-link coefficients. `zeta2` is evaluated at one price; use
/// [`Coefficients::at_price`] to move it, since
/// `zeta2(rho) = price_slope * rho - energy_offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub zeta0: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    /// `C / R_max`.
    pub price_slope: f64,
    /// `mu C / (f^xi E_max)`.
    pub energy_offset: f64,
    /// bits/s.
    pub rate: f64,
    pub gain: f64,
}

impl Coefficients {
    pub fn zeta2_at(&self, rho: f64) -> f64 {
        self.price_slope * rho - self.energy_offset
    }

    pub fn at_price(&self, rho: f64) -> Self {
        Self {
            zeta2: self.zeta2_at(rho),
            ..*self
        }
    }
}

/// `h = d^-nu * g^2`.
pub fn channel_gain(distance: f64, pathloss_exp: f64, fading: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain("distance", distance));
    }
    Ok(math::powf(distance, -pathloss_exp) * fading * fading)
}

/// Shannon rate `W log2(1 + h P / sigma^2)` in bits/s.
pub fn link_rate(gain: f64, channel: &ChannelParams) -> f64 {
    debug_assert!(gain >= 0.0);
    if gain == 0.0 {
        return 0.0;
    }
    channel.bandwidth * math::log2(1.0 + gain * channel.tx_power / channel.noise_var)
}

/// Bits of training data shipped for participation `n`; zero in FL mode.
pub fn bits_data(n: f64, task: &TaskSpec) -> Result<f64> {
    check_fraction(n)?;
    Ok(match task.mode {
        LearningMode::Pl => n * task.dataset_size * task.feature_len * task.bits_per_feature,
        LearningMode::Fl => 0.0,
    })
}

pub fn bits_weights(task: &TaskSpec) -> f64 {
    task.weight_count * task.bits_per_weight
}

/// Per-cycle durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTimes {
    /// Orchestrator to learner: data plus model.
    pub send: f64,
    /// Learner to orchestrator: updated model.
    pub upload: f64,
    pub compute: f64,
}

impl LinkTimes {
    pub fn total(&self) -> f64 {
        self.send + self.upload + self.compute
    }
}

pub fn times(
    n: f64,
    tau: f64,
    task: &TaskSpec,
    learner: &LearnerProfile,
    rate: f64,
) -> Result<LinkTimes> {
    let data = bits_data(n, task)?;
    let weights = bits_weights(task);
    let transfer = |bits: f64| -> Result<f64> {
        if bits == 0.0 {
            Ok(0.0)
        } else if rate > 0.0 {
            Ok(bits / rate)
        } else {
            Err(Error::InfeasibleLink { bits })
        }
    };
    Ok(LinkTimes {
        send: transfer(data + weights)?,
        upload: transfer(weights)?,
        compute: tau * n * task.dataset_size * task.complexity / learner.cpu_freq,
    })
}

/// Per-cycle energies in joules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Energies {
    pub upload: f64,
    pub receive: f64,
    pub compute: f64,
}

impl Energies {
    pub fn total(&self) -> f64 {
        self.upload + self.receive + self.compute
    }
}

pub fn energies(
    n: f64,
    tau: f64,
    task: &TaskSpec,
    learner: &LearnerProfile,
    channel: &ChannelParams,
    t_upload: f64,
) -> Energies {
    let cycles = tau * n * task.dataset_size * task.complexity;
    Energies {
        upload: channel.tx_power * t_upload,
        receive: learner.effective_recv_energy(task.mode) * n,
        compute: learner.hw_mu * cycles / math::powf(learner.cpu_freq, learner.hw_xi),
    }
}

/// Loss bound `c1 / (G tau^c2)`; smaller is better.
pub fn learning_loss(tau: f64, cycles: f64, task: &TaskSpec) -> Result<f64> {
    if !(tau >= 1.0) {
        return Err(Error::domain("tau", tau));
    }
    if !(cycles >= 1.0) {
        return Err(Error::domain("global cycles", cycles));
    }
    Ok(task.c1 / (cycles * math::powf(tau, task.c2)))
}

/// Learning quality, the negated loss bound. Concave and increasing in both
/// arguments for `c1, c2 > 0`.
pub fn learning_quality(tau: f64, cycles: f64, task: &TaskSpec) -> Result<f64> {
    learning_loss(tau, cycles, task).map(|loss| -loss)
}

pub fn compute_coefficients(
    task: &TaskSpec,
    learner: &LearnerProfile,
    orchestrator: usize,
    channel: &ChannelParams,
    norms: &NormConstants,
    rho: f64,
) -> Result<Coefficients> {
    let distance = *learner
        .distances
        .get(orchestrator)
        .ok_or(Error::InvalidConfig {
            key: "learner.distances",
            reason: "no distance to this orchestrator",
        })?;
    let fading = learner.fading.get(orchestrator).copied().unwrap_or(1.0);
    let gain = channel_gain(distance, channel.pathloss_exp, fading)?;
    let rate = link_rate(gain, channel);
    if !(rate > 0.0) {
        return Err(Error::InfeasibleLink {
            bits: bits_weights(task),
        });
    }

    let a0 = 2.0 * bits_weights(task) / (task.t_max * rate);
    let a1 = match task.mode {
        LearningMode::Pl => {
            task.dataset_size * task.feature_len * task.bits_per_feature / (task.t_max * rate)
        }
        LearningMode::Fl => 0.0,
    };
    let a2 = task.dataset_size * task.complexity / (task.t_max * learner.cpu_freq);
    let price_slope = task.complexity / norms.r_max;
    let energy_offset = learner.hw_mu * task.complexity
        / (math::powf(learner.cpu_freq, learner.hw_xi) * norms.e_max);

    Ok(Coefficients {
        a0,
        a1,
        a2,
        zeta0: channel.tx_power * a0 / norms.e_max,
        zeta1: learner.effective_recv_energy(task.mode),
        zeta2: price_slope * rho - energy_offset,
        price_slope,
        energy_offset,
        rate,
        gain,
    })
}

/// Time used by `G` cycles as a fraction of `T_max`; feasible iff `<= 1`.
pub fn normalized_time(n: f64, tau: f64, cycles: f64, coeffs: &Coefficients) -> f64 {
    cycles * (coeffs.a2 * tau * n + coeffs.a1 * n + coeffs.a0)
}

fn check_fraction(n: f64) -> Result<()> {
    if (0.0..=1.0).contains(&n) {
        Ok(())
    } else {
        Err(Error::domain("participation fraction", n))
    }
}

pub(crate) fn positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, value))
    }
}

pub(crate) fn non_negative(what: &'static str, value: f64) -> Result<()> {
    if value >= 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(what, value))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::{learner, task};
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn channel_gain_examples() {
        assert_eq!(channel_gain(1.0, 4.0, 1.0).unwrap(), 1.0);
        assert_eq!(channel_gain(2.0, 2.0, 1.0).unwrap(), 0.25);
        // 10^-4 * 0.25
        assert!(close(channel_gain(10.0, 4.0, 0.5).unwrap(), 2.5e-5));
        assert!(channel_gain(0.0, 4.0, 1.0).is_err());
        assert!(channel_gain(-3.0, 4.0, 1.0).is_err());
    }

    #[test]
    fn link_rate_examples() {
        let ch = ChannelParams {
            bandwidth: 1.0e6,
            noise_var: 1.0,
            pathloss_exp: 4.0,
            tx_power: 1.0,
        };
        assert_eq!(link_rate(0.0, &ch), 0.0);
        assert!(close(link_rate(1.0, &ch), 1.0e6));
        let ch2 = ChannelParams {
            bandwidth: 2.0e6,
            ..ch
        };
        assert!(close(link_rate(3.0, &ch2), 4.0e6));
    }

    #[test]
    fn bits_examples() {
        let t = task();
        assert_eq!(bits_data(0.0, &t).unwrap(), 0.0);
        assert!(close(bits_data(0.5, &t).unwrap(), 3.136e6));
        let fl = TaskSpec {
            mode: LearningMode::Fl,
            ..t.clone()
        };
        assert_eq!(bits_data(0.5, &fl).unwrap(), 0.0);
        assert!(bits_data(1.5, &t).is_err());
        assert!(bits_data(-0.1, &t).is_err());

        assert!(close(bits_weights(&t), 3.2e5));
        let zero = TaskSpec {
            weight_count: 0.0,
            ..t.clone()
        };
        assert_eq!(bits_weights(&zero), 0.0);
        let unit = TaskSpec {
            weight_count: 1.0,
            bits_per_weight: 1.0,
            ..t
        };
        assert_eq!(bits_weights(&unit), 1.0);
    }

    #[test]
    fn times_examples() {
        let l = learner();
        let no_weights = TaskSpec {
            weight_count: 0.0,
            ..task()
        };
        let t = times(0.0, 1.0, &no_weights, &l, 1.0e6).unwrap();
        assert_eq!((t.send, t.upload, t.compute), (0.0, 0.0, 0.0));

        // B_data = 1e6 and B_weights = 1e6 over a 1 Mbit/s link
        let t1 = TaskSpec {
            dataset_size: 1.0e6,
            feature_len: 1.0,
            bits_per_feature: 1.0,
            weight_count: 1.0e6,
            bits_per_weight: 1.0,
            ..task()
        };
        let t = times(1.0, 1.0, &t1, &l, 1.0e6).unwrap();
        assert!(close(t.send, 2.0));
        assert!(close(t.upload, 1.0));

        let t = times(0.1, 2.0, &task(), &l, 1.0e6).unwrap();
        assert!(close(t.compute, 0.2));

        assert!(matches!(
            times(0.1, 1.0, &task(), &l, 0.0),
            Err(Error::InfeasibleLink { .. })
        ));
    }

    #[test]
    fn energies_examples() {
        let l = learner();
        let ch = ChannelParams::default();
        let e = energies(0.0, 1.0, &task(), &l, &ch, 0.0);
        assert_eq!((e.receive, e.compute), (0.0, 0.0));

        let e = energies(0.0, 1.0, &task(), &l, &ch, 1.0);
        assert!(close(e.upload, 0.1));

        // mu tau n N C / f^xi = 1e-27 * (0.1 * 1000 * 1e6) / 1e18
        let e = energies(0.1, 1.0, &task(), &l, &ch, 0.0);
        assert!(close(e.compute, 1.0e-37));
        assert!(close(e.receive, 0.02));

        let fl = TaskSpec {
            mode: LearningMode::Fl,
            ..task()
        };
        assert_eq!(energies(0.3, 1.0, &fl, &l, &ch, 0.0).receive, 0.0);
    }

    #[test]
    fn quality_examples() {
        let unit = TaskSpec {
            c1: 1.0,
            c2: 1.0,
            ..task()
        };
        assert_eq!(learning_quality(1.0, 1.0, &unit).unwrap(), -1.0);
        let t = TaskSpec {
            c1: 2.0,
            c2: 1.0,
            ..task()
        };
        assert!(close(learning_quality(5.0, 4.0, &t).unwrap(), -0.1));
        assert!(
            learning_quality(2.0, 1.0, &unit).unwrap() > learning_quality(1.0, 1.0, &unit).unwrap()
        );
        assert!(learning_quality(0.5, 1.0, &unit).is_err());
        assert!(learning_quality(1.0, 0.0, &unit).is_err());
    }

    fn unit_channel_learner(rate_target: f64) -> (ChannelParams, LearnerProfile) {
        // h = 1 at d = 1, so rate = W log2(1 + P / sigma^2) = W when P = sigma^2.
        let ch = ChannelParams {
            bandwidth: rate_target,
            noise_var: 1.0,
            pathloss_exp: 4.0,
            tx_power: 1.0,
        };
        let l = LearnerProfile {
            distances: alloc::vec![1.0],
            fading: alloc::vec![1.0],
            ..learner()
        };
        (ch, l)
    }

    #[test]
    fn coefficient_examples() {
        // B_weights = 1e5, T_max = 1, R = 1e6 -> A0 = 0.2
        let (ch, l) = unit_channel_learner(1.0e6);
        let t = TaskSpec {
            weight_count: 1.0e5,
            bits_per_weight: 1.0,
            t_max: 1.0,
            ..task()
        };
        let norms = NormConstants {
            e_max: 1.0,
            ..NormConstants::default()
        };
        let c = compute_coefficients(&t, &l, 0, &ch, &norms, 0.0).unwrap();
        assert!(close(c.a0, 0.2));
        assert!(close(c.rate, 1.0e6));

        // P = 0.1, A0 = 0.2, E_max = 1 -> zeta0 = 0.02
        let ch01 = ChannelParams {
            tx_power: 0.1,
            noise_var: 0.1,
            ..ch
        };
        let c = compute_coefficients(&t, &l, 0, &ch01, &norms, 0.0).unwrap();
        assert!(close(c.a0, 0.2));
        assert!(close(c.zeta0, 0.02));

        let fl = TaskSpec {
            mode: LearningMode::Fl,
            ..t.clone()
        };
        let c = compute_coefficients(&fl, &l, 0, &ch, &norms, 1.0).unwrap();
        assert_eq!(c.a1, 0.0);
        assert_eq!(c.zeta1, 0.0);

        // A2 = N C / (T_max f), zeta2 = C rho / R_max - mu C / (f^xi E_max)
        let c = compute_coefficients(&t, &l, 0, &ch, &norms, 2.0e-6).unwrap();
        assert!(close(c.a2, 1000.0 * 1.0e6 / 1.0e9));
        let expected = 1.0e6 * 2.0e-6 / norms.r_max - 1.0e-27 * 1.0e6 / 1.0e18;
        assert!(close(c.zeta2, expected));
        assert!(close(c.at_price(4.0e-6).zeta2, c.zeta2_at(4.0e-6)));
        assert_eq!(c.zeta1, 0.2);
    }

    #[test]
    fn coefficients_reject_dead_link() {
        let (ch, mut l) = unit_channel_learner(1.0e6);
        l.fading[0] = 0.0;
        let err =
            compute_coefficients(&task(), &l, 0, &ch, &NormConstants::default(), 1.0).unwrap_err();
        assert!(matches!(err, Error::InfeasibleLink { .. }));
    }

    #[test]
    fn normalized_time_examples() {
        let c = Coefficients {
            a0: 0.2,
            a1: 0.05,
            a2: 0.1,
            zeta0: 0.0,
            zeta1: 0.0,
            zeta2: 0.0,
            price_slope: 1.0,
            energy_offset: 0.0,
            rate: 1.0,
            gain: 1.0,
        };
        assert_eq!(normalized_time(0.0, 3.0, 1.0, &c), 0.2);
        assert!(close(normalized_time(0.5, 2.0, 2.0, &c), 0.65));
        // exactly 1.0 is still feasible
        let edge = Coefficients {
            a0: 0.5,
            a1: 0.0,
            a2: 0.0,
            ..c
        };
        assert!(normalized_time(0.0, 1.0, 2.0, &edge) <= 1.0);
    }

    #[test]
    fn task_validation() {
        assert!(task().validate().is_ok());
        assert!(TaskSpec {
            n_max: 1.5,
            ..task()
        }
        .validate()
        .is_err());
        assert!(TaskSpec {
            n_max: 0.0,
            ..task()
        }
        .validate()
        .is_err());
        assert!(TaskSpec {
            tau_min: 0.5,
            ..task()
        }
        .validate()
        .is_err());
        assert!(TaskSpec {
            tau_max: 0.9,
            ..task()
        }
        .validate()
        .is_err());
        assert!(TaskSpec { g_min: 0, ..task() }.validate().is_err());
        assert!(TaskSpec { c1: 0.0, ..task() }.validate().is_err());
        assert!(TaskSpec {
            t_max: -1.0,
            ..task()
        }
        .validate()
        .is_err());
        assert!(learner().validate(2).is_ok());
        assert!(learner().validate(3).is_err());
    }

    proptest! {
        #[test]
        fn gain_decreases_with_distance(d1 in 0.1f64..500.0, d2 in 0.1f64..500.0, nu in 0.5f64..6.0) {
            prop_assume!((d1 - d2).abs() > 1e-6);
            let (near, far) = if d1 < d2 { (d1, d2) } else { (d2, d1) };
            prop_assert!(channel_gain(near, nu, 1.0).unwrap() > channel_gain(far, nu, 1.0).unwrap());
        }

        #[test]
        fn rate_monotone_in_gain_and_power(h1 in 0.0f64..1.0, h2 in 0.0f64..1.0, p in 0.01f64..2.0) {
            let ch = ChannelParams { noise_var: 1e-3, tx_power: p, ..ChannelParams::default() };
            let (lo, hi) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
            prop_assert!(link_rate(lo, &ch) <= link_rate(hi, &ch));
            let louder = ChannelParams { tx_power: p * 1.5, ..ch };
            prop_assert!(link_rate(hi, &ch) <= link_rate(hi, &louder));
        }

        #[test]
        fn participation_only_adds_time(n in 0.0f64..1.0, tau in 1.0f64..20.0, g in 1.0f64..50.0,
                                         a0 in 0.0f64..0.1, a1 in 0.0f64..0.1, a2 in 0.0f64..0.1) {
            let c = Coefficients { a0, a1, a2, zeta0: 0.0, zeta1: 0.0, zeta2: 0.0,
                                   price_slope: 1.0, energy_offset: 0.0, rate: 1.0, gain: 1.0 };
            let t = normalized_time(n, tau, g, &c);
            prop_assert!(t >= g * a0);
            prop_assert!(t >= 0.0);
        }

        #[test]
        fn quality_concave_in_tau(t1 in 1.0f64..10.0, t2 in 1.0f64..10.0, g in 1.0f64..20.0,
                                  c1 in 0.1f64..5.0, c2 in 0.1f64..3.0) {
            let t = TaskSpec { c1, c2, ..task() };
            let mid = learning_quality(0.5 * (t1 + t2), g, &t).unwrap();
            let avg = 0.5 * (learning_quality(t1, g, &t).unwrap() + learning_quality(t2, g, &t).unwrap());
            prop_assert!(mid >= avg - 1e-12);
        }

        #[test]
        fn fl_mode_zeroes_reception(n in 0.0f64..1.0, rho in 0.0f64..1e-4) {
            let t = TaskSpec { mode: LearningMode::Fl, ..task() };
            let l = learner();
            let ch = ChannelParams::default();
            prop_assert_eq!(bits_data(n, &t).unwrap(), 0.0);
            prop_assert_eq!(energies(n, 2.0, &t, &l, &ch, 1.0).receive, 0.0);
            let c = compute_coefficients(&t, &l, 1, &ch, &NormConstants::default(), rho).unwrap();
            prop_assert_eq!(c.a1, 0.0);
            prop_assert_eq!(c.zeta1, 0.0);
        }
    }
}
