//! Two-round Stackelberg incentive game for multi-orchestrator mobile edge
//! learning.
//!
//! Orchestrators own learning tasks and pay learners per CPU cycle; learners
//! pick one orchestrator (first round) and then the share of the task's
//! dataset they train on (second round). The crate is split along the game:
//!
//! * [`edge`] holds the wireless, compute and energy models and turns a
//!   (task, learner) pair into the six normalized [`edge::Coefficients`].
//! * [`learner`] is the follower side: closed-form best response and utility.
//! * [`orchestrator`] is the leader side: global cycles, price box, utility and
//!   the per-learner (iterations, price) solver.
//! * [`surrogate`] carries the analytic gradient and Hessian of the leader
//!   objective under the closed-form participation rule.
//! * [`equilibrium`] audits a solved profile for unilateral deviations.
//! * [`association`] implements the first-round policies.
//! * [`scenario`] and [`game`] generate scenarios and run whole games.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod association;
pub mod edge;
pub mod equilibrium;
mod error;
pub mod game;
pub mod learner;
mod math;
pub mod orchestrator;
pub mod scenario;
pub mod surrogate;

pub use error::{Error, Result};
