//! Follower side of the second round.
//!
//! Given the orchestrator's iterations `tau`, price (through `zeta2`) and
//! global cycles `G`, a learner maximizes `n (zeta2 tau - zeta1)` subject to
//! `G (A2 tau n + A1 n + A0) <= 1` and `0 <= n <= n_max`. The problem is a
//! one-variable LP: with a positive net coefficient the learner fills the time
//! budget up to `n_max`, otherwise it stays out. Participation is also dropped
//! when the fixed per-cycle upload cost `zeta0` would make the utility
//! negative, i.e. when the time-limited amount falls below
//! `n_min = zeta0 / (zeta2 tau - zeta1)`.

use crate::edge::Coefficients;

/// `zeta2 tau - zeta1`: net normalized revenue per unit participation.
pub fn net_coefficient(coeffs: &Coefficients, tau: f64) -> f64 {
    coeffs.zeta2 * tau - coeffs.zeta1
}

/// Smallest profitable participation; infinite when the net coefficient is
/// not positive.
pub fn min_participation(coeffs: &Coefficients, tau: f64) -> f64 {
    let net = net_coefficient(coeffs, tau);
    if net > 0.0 {
        coeffs.zeta0 / net
    } else {
        f64::INFINITY
    }
}

/// Largest participation the time budget admits, capped at `n_max`. Zero
/// when weight exchange alone already fills the budget.
pub fn participation_cap(coeffs: &Coefficients, tau: f64, cycles: f64, n_max: f64) -> f64 {
    let slack = 1.0 - cycles * coeffs.a0;
    if slack <= 0.0 {
        return 0.0;
    }
    let per_unit = cycles * (coeffs.a2 * tau + coeffs.a1);
    if per_unit <= 0.0 {
        n_max
    } else {
        (slack / per_unit).min(n_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub n: f64,
    /// `G * A0 >= 1`: no time is left for any participation.
    pub time_infeasible: bool,
}

pub fn learner_best_response(
    coeffs: &Coefficients,
    tau: f64,
    cycles: f64,
    n_max: f64,
) -> BestResponse {
    if cycles * coeffs.a0 >= 1.0 {
        return BestResponse {
            n: 0.0,
            time_infeasible: true,
        };
    }
    let net = net_coefficient(coeffs, tau);
    let mut n = 0.0;
    if net > 0.0 {
        let cap = participation_cap(coeffs, tau, cycles, n_max);
        // ties at zero utility participate
        if cap > 0.0 && cap * net >= coeffs.zeta0 {
            n = cap;
        }
    }
    BestResponse {
        n,
        time_infeasible: false,
    }
}

/// Normalized learner utility `G (n (zeta2 tau - zeta1) - zeta0)`; a learner
/// that stays out pays nothing.
pub fn learner_utility(coeffs: &Coefficients, tau: f64, cycles: f64, n: f64) -> f64 {
    if n > 0.0 {
        cycles * (n * net_coefficient(coeffs, tau) - coeffs.zeta0)
    } else {
        0.0
    }
}

#[cfg(test)]
pub(crate) fn coeffs(
    a0: f64,
    a1: f64,
    a2: f64,
    zeta0: f64,
    zeta1: f64,
    zeta2: f64,
) -> Coefficients {
    Coefficients {
        a0,
        a1,
        a2,
        zeta0,
        zeta1,
        zeta2,
        price_slope: 1.0,
        energy_offset: 0.0,
        rate: 1.0e6,
        gain: 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edge::normalized_time;
    use proptest::prelude::*;

    #[test]
    fn net_coefficient_examples() {
        assert_eq!(
            net_coefficient(&coeffs(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), 3.0),
            0.0
        );
        let c = coeffs(0.0, 0.0, 0.0, 0.0, 0.5, 0.2);
        assert!((net_coefficient(&c, 5.0) - 0.5).abs() < 1e-15);
        let neg = coeffs(0.0, 0.0, 0.0, 0.0, 0.1, -0.01);
        for tau in [1.0, 2.0, 50.0] {
            assert!(net_coefficient(&neg, tau) < 0.0);
        }
    }

    #[test]
    fn loss_making_price_means_no_participation() {
        // zeta2 tau - zeta1 = 0.1 * 1 - 0.2 = -0.1
        let c = coeffs(0.01, 0.01, 0.01, 0.0, 0.2, 0.1);
        let br = learner_best_response(&c, 1.0, 1.0, 1.0);
        assert_eq!(br.n, 0.0);
        assert!(!br.time_infeasible);
    }

    #[test]
    fn ample_time_caps_at_n_max() {
        let c = coeffs(0.01, 0.01, 0.01, 0.0, 0.1, 0.5);
        assert_eq!(learner_best_response(&c, 2.0, 1.0, 0.3).n, 0.3);
    }

    #[test]
    fn saturates_the_time_budget() {
        let c = coeffs(0.1, 0.2, 0.3, 0.001, 0.1, 0.5);
        let br = learner_best_response(&c, 2.0, 2.0, 1.0);
        // (1 - 0.2) / (2 * (0.6 + 0.2)) = 0.5
        assert!((br.n - 0.5).abs() < 1e-15);
        assert!((normalized_time(br.n, 2.0, 2.0, &c) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fl_mode_uses_time_equality() {
        // A1 = zeta1 = 0
        let c = coeffs(0.1, 0.0, 0.2, 0.0, 0.0, 0.3);
        let br = learner_best_response(&c, 2.0, 2.0, 1.0);
        assert!((br.n - (1.0 - 0.2) / (2.0 * 0.2 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn weight_exchange_fills_budget() {
        let c = coeffs(0.5, 0.0, 0.1, 0.0, 0.0, 1.0);
        let br = learner_best_response(&c, 1.0, 2.0, 1.0);
        assert_eq!(br.n, 0.0);
        assert!(br.time_infeasible);
    }

    #[test]
    fn fixed_cost_cuts_thin_participation() {
        // cap = 1 / 100 = 0.01, net = 1, utility = 0.01 - 0.05 < 0
        let c = coeffs(0.0, 0.0, 100.0, 0.05, 0.0, 1.0);
        assert_eq!(learner_best_response(&c, 1.0, 1.0, 1.0).n, 0.0);
        assert!(min_participation(&c, 1.0) > participation_cap(&c, 1.0, 1.0, 1.0));
        // forced participation just below n_min loses money
        let n = 0.99 * min_participation(&c, 1.0);
        assert!(learner_utility(&c, 1.0, 1.0, n) < 0.0);
    }

    #[test]
    fn utility_examples() {
        let c = coeffs(0.0, 0.0, 0.0, 0.1, 0.5, 0.4);
        assert_eq!(learner_utility(&c, 5.0, 2.0, 0.0), 0.0);
        assert!((learner_utility(&c, 5.0, 2.0, 0.5) - 1.3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn participation_is_profitable_and_feasible(
            a0 in 0.0f64..0.3, a1 in 0.0f64..0.5, a2 in 0.0f64..0.5,
            z0 in 0.0f64..0.05, z1 in 0.0f64..1.0, z2 in -0.5f64..1.0,
            tau in 1.0f64..10.0, g in 1u32..4, n_max in 0.01f64..1.0,
        ) {
            let c = coeffs(a0, a1, a2, z0, z1, z2);
            let g = g as f64;
            let br = learner_best_response(&c, tau, g, n_max);
            prop_assert!(br.n >= 0.0 && br.n <= n_max);
            if br.n > 0.0 {
                prop_assert!(learner_utility(&c, tau, g, br.n) >= 0.0);
                prop_assert!(normalized_time(br.n, tau, g, &c) <= 1.0 + 1e-9);
                if br.n < n_max {
                    prop_assert!((normalized_time(br.n, tau, g, &c) - 1.0).abs() <= 1e-9);
                }
            }
        }
    }
}
