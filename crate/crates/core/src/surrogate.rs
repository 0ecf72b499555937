//! Smooth surrogate of the leader objective for one learner.
//!
//! Here participation follows the closed-form rule
//! `n = A (1 - G c) / (G (a B + b A))` with `A = zeta2(rho)`, `B = zeta1`,
//! `a = A2`, `b = A1`, `c = A0`, which does not depend on `tau`. When
//! `a B + b A = 0` (FL mode) the time constraint alone fixes
//! `n = (1 - G c) / (G a tau)`. With `c2 = 1` the objective is
//!
//! ```text
//! U(tau, rho) = -k / (G tau) - (G C / P_max) rho tau n
//! ```
//!
//! where `k = c1 / (F_max |L|)`. The Hessian is only guaranteed negative
//! semidefinite under conditions the caller checks numerically; see
//! [`concavity_condition`] for the product test.

use crate::edge::{Coefficients, NormConstants, TaskSpec};
use crate::error::{Error, Result};

/// Participation and its partial derivatives in `tau` and `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Participation {
    pub n: f64,
    pub d_tau: f64,
    pub d_rho: f64,
    pub d_tau_tau: f64,
    pub d_tau_rho: f64,
    pub d_rho_rho: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surrogate {
    pub cycles: f64,
    pub complexity: f64,
    /// `c1 / (F_max |L|)`.
    pub quality_weight: f64,
    pub p_max: f64,
}

impl Surrogate {
    /// Unit weights: `c1 / F_max = 1`, `P_max = 1`.
    pub fn unit(cycles: f64, complexity: f64) -> Self {
        Self {
            cycles,
            complexity,
            quality_weight: 1.0,
            p_max: 1.0,
        }
    }

    pub fn for_group(
        task: &TaskSpec,
        norms: &NormConstants,
        cycles: u32,
        group_size: usize,
    ) -> Result<Self> {
        if group_size == 0 {
            return Err(Error::EmptyGroup);
        }
        Ok(Self {
            cycles: cycles as f64,
            complexity: task.complexity,
            quality_weight: task.c1 / (norms.f_max * group_size as f64),
            p_max: norms.p_max,
        })
    }

    fn payment_weight(&self) -> f64 {
        self.cycles * self.complexity / self.p_max
    }

    pub fn participation(&self, base: &Coefficients, tau: f64, rho: f64) -> Result<Participation> {
        let g = self.cycles;
        let slack = (1.0 - g * base.a0) / g;
        if slack <= 0.0 {
            return Ok(Participation::default());
        }
        let (a, b, big_b) = (base.a2, base.a1, base.zeta1);
        let big_a = base.zeta2_at(rho);
        let alpha = base.price_slope;
        let den = a * big_b + b * big_a;
        if den != 0.0 {
            let n = big_a * slack / den;
            let d_rho = big_b * a * alpha * slack / (den * den);
            let d_rho_rho = -2.0 * a * alpha * alpha * b * big_b * slack / (den * den * den);
            return Ok(Participation {
                n,
                d_rho,
                d_rho_rho,
                ..Participation::default()
            });
        }
        if a == 0.0 {
            return Err(Error::ZeroDenominator("surrogate participation"));
        }
        let n = slack / (a * tau);
        Ok(Participation {
            n,
            d_tau: -n / tau,
            d_tau_tau: 2.0 * n / (tau * tau),
            ..Participation::default()
        })
    }

    pub fn utility(&self, base: &Coefficients, tau: f64, rho: f64) -> Result<f64> {
        let p = self.participation(base, tau, rho)?;
        Ok(-self.quality_weight / (self.cycles * tau) - self.payment_weight() * rho * tau * p.n)
    }

    /// `(dU/dtau, dU/drho)`.
    pub fn utility_gradient(&self, base: &Coefficients, tau: f64, rho: f64) -> Result<[f64; 2]> {
        let p = self.participation(base, tau, rho)?;
        let w = self.payment_weight();
        let d_tau =
            self.quality_weight / (self.cycles * tau * tau) - w * rho * (p.n + tau * p.d_tau);
        let d_rho = -w * tau * (p.n + rho * p.d_rho);
        Ok([d_tau, d_rho])
    }

    /// Symmetric Hessian in `(tau, rho)`.
    pub fn utility_hessian(
        &self,
        base: &Coefficients,
        tau: f64,
        rho: f64,
    ) -> Result<[[f64; 2]; 2]> {
        let p = self.participation(base, tau, rho)?;
        let w = self.payment_weight();
        let tt = -2.0 * self.quality_weight / (self.cycles * tau * tau * tau)
            - w * rho * (2.0 * p.d_tau + tau * p.d_tau_tau);
        let tr = -w * (p.n + tau * p.d_tau + rho * p.d_rho + rho * tau * p.d_tau_rho);
        let rr = -w * tau * (2.0 * p.d_rho + rho * p.d_rho_rho);
        Ok([[tt, tr], [tr, rr]])
    }
}

pub fn determinant(h: &[[f64; 2]; 2]) -> f64 {
    h[0][0] * h[1][1] - h[0][1] * h[1][0]
}

/// `tau G C rho n >= 2`.
pub fn concavity_condition(tau: f64, cycles: f64, complexity: f64, rho: f64, n: f64) -> bool {
    tau * cycles * complexity * rho * n >= 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::coeffs;
    use proptest::prelude::*;

    fn base(a0: f64, a1: f64, a2: f64, zeta1: f64, alpha: f64, beta: f64) -> Coefficients {
        let mut c = coeffs(a0, a1, a2, 0.0, zeta1, 0.0);
        c.price_slope = alpha;
        c.energy_offset = beta;
        c
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-12)
    }

    fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-6 * x.abs().max(1e-3);
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn concavity_condition_examples() {
        assert!(!concavity_condition(1.0, 1.0, 1.0, 1.0, 1.0));
        assert!(concavity_condition(2.0, 1.0, 1.0, 1.0, 1.0));
        assert!(!concavity_condition(1.999, 1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn price_free_participation_has_zero_slope() {
        let s = Surrogate::unit(2.0, 1.0);
        let c = base(0.1, 0.2, 0.3, 0.4, 0.0, -0.5);
        let p = s.participation(&c, 3.0, 0.7).unwrap();
        assert_eq!(p.d_rho, 0.0);
        assert_eq!(p.d_rho_rho, 0.0);
    }

    #[test]
    fn exhausted_time_gives_no_participation() {
        let s = Surrogate::unit(2.0, 1.0);
        let c = base(0.5, 0.2, 0.3, 0.4, 1.0, 0.0);
        assert_eq!(
            s.participation(&c, 3.0, 0.7).unwrap(),
            Participation::default()
        );
    }

    #[test]
    fn closed_form_matches_saturated_time() {
        // at zeta1 = 0 the closed form reduces to (1 - G c) / (G b)
        let s = Surrogate::unit(2.0, 1.0);
        let c = base(0.1, 0.2, 0.3, 0.0, 1.0, 0.0);
        let p = s.participation(&c, 3.0, 0.5).unwrap();
        assert!(rel_close(p.n, 0.8 / (2.0 * 0.2), 1e-14));
    }

    #[test]
    fn fl_branch_follows_time_equality() {
        let s = Surrogate::unit(2.0, 1.0);
        let c = base(0.1, 0.0, 0.2, 0.0, 1.0, 0.0);
        let p = s.participation(&c, 4.0, 0.5).unwrap();
        assert!(rel_close(p.n, 0.8 / (2.0 * 0.2 * 4.0), 1e-14));
        assert_eq!(p.d_rho, 0.0);
        let g = s.utility_gradient(&c, 4.0, 0.5).unwrap();
        let fd = central(|t| s.utility(&c, t, 0.5).unwrap(), 4.0);
        assert!(rel_close(g[0], fd, 1e-6));
    }

    #[test]
    fn utility_matches_leader_objective_at_same_participation() {
        use crate::edge::{fixtures, NormConstants};
        use crate::orchestrator::{orchestrator_utility, LearnerTerm};
        let task = TaskSpec {
            c1: 1.0,
            c2: 1.0,
            complexity: 2.0,
            ..fixtures::task()
        };
        let norms = NormConstants {
            f_max: 1.0,
            p_max: 1.0,
            ..NormConstants::default()
        };
        let s = Surrogate::for_group(&task, &norms, 3, 1).unwrap();
        let c = base(0.05, 0.01, 0.02, 0.3, 1.0, 0.05);
        let (tau, rho) = (4.0, 0.6);
        let n = s.participation(&c, tau, rho).unwrap().n;
        assert!(n > 0.0);
        let direct =
            orchestrator_utility(&task, &norms, 3, &[LearnerTerm { tau, rho, n }]).unwrap();
        assert!(rel_close(s.utility(&c, tau, rho).unwrap(), direct, 1e-13));
    }

    #[test]
    fn hessian_is_symmetric_with_negative_curvature_in_tau() {
        let s = Surrogate::unit(3.0, 2.0);
        let c = base(0.05, 0.01, 0.02, 0.3, 1.0, 0.05);
        let h = s.utility_hessian(&c, 2.5, 0.8).unwrap();
        assert_eq!(h[0][1], h[1][0]);
        assert!(h[0][0] < 0.0);
    }

    #[test]
    fn product_condition_does_not_give_semidefinite_hessian() {
        // The cross term -G C (rho n' + n) dominates once tau G C rho n >= 2,
        // so det(H) <= -(G C n)^2 there: the Hessian is indefinite.
        let s = Surrogate::unit(2.0, 1.0);
        let c = base(0.01, 0.01, 0.01, 0.2, 1.0, 0.0);
        let (tau, rho) = (5.0, 1.0);
        let n = s.participation(&c, tau, rho).unwrap().n;
        assert!(concavity_condition(tau, 2.0, 1.0, rho, n));
        let h = s.utility_hessian(&c, tau, rho).unwrap();
        assert!(determinant(&h) < 0.0);
        assert!(determinant(&h) <= -(2.0 * n) * (2.0 * n));
    }

    proptest! {
        #[test]
        fn gradient_matches_central_differences(
            a0 in 0.0f64..0.2, a1 in 0.001f64..0.2, a2 in 0.001f64..0.2,
            z1 in 0.0f64..0.5, alpha in 0.1f64..2.0, beta in 0.0f64..0.2,
            g in 1u32..4, cplx in 0.5f64..2.0,
            tau in 1.5f64..9.5, rho in 0.3f64..2.0,
        ) {
            let s = Surrogate::unit(g as f64, cplx);
            let c = base(a0, a1, a2, z1, alpha, beta);
            let grad = s.utility_gradient(&c, tau, rho).unwrap();
            let fd_tau = central(|t| s.utility(&c, t, rho).unwrap(), tau);
            let fd_rho = central(|r| s.utility(&c, tau, r).unwrap(), rho);
            prop_assert!(rel_close(grad[0], fd_tau, 1e-5), "{} vs {}", grad[0], fd_tau);
            prop_assert!(rel_close(grad[1], fd_rho, 1e-5), "{} vs {}", grad[1], fd_rho);
        }

        #[test]
        fn hessian_matches_gradient_differences(
            a0 in 0.0f64..0.2, a1 in 0.001f64..0.2, a2 in 0.001f64..0.2,
            z1 in 0.0f64..0.5, alpha in 0.1f64..2.0, beta in 0.0f64..0.2,
            g in 1u32..4, tau in 1.5f64..9.5, rho in 0.3f64..2.0,
        ) {
            let s = Surrogate::unit(g as f64, 1.0);
            let c = base(a0, a1, a2, z1, alpha, beta);
            let h = s.utility_hessian(&c, tau, rho).unwrap();
            let dtt = central(|t| s.utility_gradient(&c, t, rho).unwrap()[0], tau);
            let drt = central(|r| s.utility_gradient(&c, tau, r).unwrap()[0], rho);
            let drr = central(|r| s.utility_gradient(&c, tau, r).unwrap()[1], rho);
            prop_assert!(rel_close(h[0][0], dtt, 1e-4));
            prop_assert!(rel_close(h[0][1], drt, 1e-4));
            prop_assert!(rel_close(h[1][1], drr, 1e-4) || (h[1][1] - drr).abs() < 1e-7);
        }
    }
}
