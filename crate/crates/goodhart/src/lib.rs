//! Allocation rules on manipulable data.
//!
//! When a decision rule `Y(x) = beta * x + beta0` feeds on data `x` that the
//! affected agents produce, steeper rules provoke more gaming and degrade the
//! data (Goodhart's law). This crate solves and compares the resulting
//! policies in a two-dimensional-type environment:
//!
//! * the **naive** rule fit to pre-manipulation data,
//! * the best **constant** rule that ignores the data,
//! * **fixed points** of the designer's best response — the simultaneous-play
//!   outcome, ex-post optimal but manipulated,
//! * the **commitment optimum**, which deliberately flattens the rule below
//!   every positive fixed point: the second-order misallocation cost is beaten
//!   by the first-order gain in data informativeness.
//!
//! Everything analytic is backed by closed forms ([`model`], [`solve`],
//! [`sweep`]); a seeded Monte Carlo layer ([`sim`]) verifies each of them
//! empirically. The [`noise`] module implements the estimation-with-noise
//! recipe: add calibrated measurement noise to the training regressor so that
//! plain OLS refitting lands exactly on the commitment-optimal slope, then
//! shift to keep allocations centered. The [`binary`] module solves a
//! binary-action variant where information dies by pooling at the top.
//!
//! Start with the runnable examples:
//!
//! ```bash
//! cargo run -p goodhart --example solve_benchmarks
//! cargo run -p goodhart --example figure_data
//! cargo run -p goodhart --example comparative_statics
//! cargo run -p goodhart --example response_dynamics
//! cargo run -p goodhart --example population_check
//! cargo run -p goodhart --example noise_calibration
//! cargo run -p goodhart --example binary_actions
//! ```
//!
//! or with the CLI, `cargo run -p goodhart -- solve --k 1 --rho 0`.

// Negated float comparisons like `!(x < y)` are NaN-rejecting guards here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binary;
pub mod cli;
pub mod emit;
pub mod error;
pub mod model;
pub mod noise;
pub mod rng;
pub mod roots;
pub mod sim;
pub mod solve;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{
    normalized_loss, normalized_loss_derivative, normalized_loss_second_derivative, ActionMoments,
    AgentType, ModelParams, Policy, WelfareBreakdown,
};
pub use solve::{
    constant_policy, fixed_points, iterate_best_response, naive_policy, optimal_policy, solve_all,
    DynamicsStatus, DynamicsTrace, PolicySolution,
};
