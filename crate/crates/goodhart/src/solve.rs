//! Benchmark policies and the commitment optimum.
//!
//! Four rules are compared throughout: the naive rule fit to pre-manipulation
//! data, the best constant rule, fixed points of the designer's best response
//! (the simultaneous-play outcome), and the commitment optimum that minimizes
//! expected squared allocation error knowing how agents will respond.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{normalized_loss_second_derivative, ModelParams, Policy};
use crate::roots::Cubic;

/// The rule a designer fits to data gathered before anyone games it: slope 1,
/// intercept 0, for every environment.
pub fn naive_policy() -> Policy {
    Policy {
        beta: 1.0,
        beta0: 0.0,
    }
}

/// The loss-minimizing constant rule `(0, mu_eta)`, with loss `sigma_eta^2`.
pub fn constant_policy(params: &ModelParams) -> Policy {
    Policy {
        beta: 0.0,
        beta0: params.mu_eta(),
    }
}

/// All real fixed-point slopes of the best response for an environment with
/// susceptibility `k` and correlation `rho`: real roots of
/// `k^2 b^3 + 2 k rho b^2 + (1 - k rho) b - 1`, ascending. At least one is
/// positive; when `rho >= 0` exactly one is nonnegative and it lies in (0, 1).
pub fn fixed_point_betas(k: f64, rho: f64) -> Vec<f64> {
    Cubic {
        c3: k * k,
        c2: 2.0 * k * rho,
        c1: 1.0 - k * rho,
        c0: -1.0,
    }
    .real_roots()
}

/// [`fixed_point_betas`] for a fully specified environment.
pub fn fixed_points(params: &ModelParams) -> Vec<f64> {
    fixed_point_betas(params.k(), params.rho())
}

/// The commitment-optimal slope: the smallest nonnegative root of the
/// normalized loss derivative. It lies in (0, 2) and satisfies the
/// second-order condition; anything else is a solver bug, reported as such.
pub fn optimal_beta(k: f64, rho: f64) -> Result<f64> {
    let derivative = Cubic {
        c3: 4.0 * k * k,
        c2: 6.0 * rho * k,
        c1: 2.0 - 4.0 * rho * k,
        c0: -2.0,
    };
    let beta = derivative
        .real_roots()
        .into_iter()
        .find(|&b| b >= 0.0)
        .ok_or_else(|| {
            Error::SolverFailure(format!(
                "no nonnegative root of the loss derivative at k = {k}, rho = {rho}"
            ))
        })?;
    if !(0.0 < beta && beta < 2.0) {
        return Err(Error::SolverFailure(format!(
            "optimal slope {beta} escaped (0, 2) at k = {k}, rho = {rho}"
        )));
    }
    if normalized_loss_second_derivative(k, rho, beta) <= 0.0 {
        return Err(Error::SolverFailure(format!(
            "second-order condition failed at beta = {beta}, k = {k}, rho = {rho}"
        )));
    }
    Ok(beta)
}

/// The commitment-optimal policy: optimal slope paired with the centered
/// intercept `(1 - beta) mu_eta - m beta^2 mu_gamma`.
pub fn optimal_policy(params: &ModelParams) -> Result<Policy> {
    let beta = optimal_beta(params.k(), params.rho())?;
    Ok(Policy {
        beta,
        beta0: params.loss_minimizing_intercept(beta),
    })
}

/// A fixed point with its welfare loss and the (always positive) slope of the
/// envelope loss there.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixedPointInfo {
    pub policy: Policy,
    pub loss: f64,
    pub loss_slope: f64,
}

/// Consistency flags and derived quantities attached to a [`PolicySolution`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolutionDiagnostics {
    /// Best-response slope to the optimal policy; exceeds the optimal slope.
    pub best_response_at_optimal: f64,
    /// Second derivative of the normalized loss at the optimum (positive).
    pub loss_second_derivative_at_optimal: f64,
    /// Optimal slope is strictly below every positive fixed point.
    pub optimal_below_positive_fixed_points: bool,
    /// `best_response(beta*) > beta*`: commitment underutilizes the data.
    pub best_response_exceeds_optimal: bool,
}

/// Bundle of all benchmark policies for one environment.
#[derive(Debug, Clone, Serialize)]
pub struct PolicySolution {
    pub naive: Policy,
    pub naive_loss: f64,
    pub constant: Policy,
    pub constant_loss: f64,
    /// Fixed points ascending by slope.
    pub fixed_points: Vec<FixedPointInfo>,
    pub optimal: Policy,
    pub optimal_loss: f64,
    pub diagnostics: SolutionDiagnostics,
}

/// Solves every benchmark for one environment.
pub fn solve_all(params: &ModelParams) -> Result<PolicySolution> {
    let naive = naive_policy();
    let constant = constant_policy(params);
    let optimal = optimal_policy(params)?;

    let mut fps = Vec::new();
    for beta in fixed_points(params) {
        let policy = params.best_response_policy(beta);
        // Report the fixed point itself as the slope; the best-response
        // intercept at a fixed point is the centered one.
        let policy = Policy {
            beta,
            beta0: policy.beta0,
        };
        fps.push(FixedPointInfo {
            policy,
            loss: params.welfare_loss(policy),
            loss_slope: params.loss_slope_at_fixed_point(beta)?,
        });
    }

    let best_response_at_optimal = params.best_response_beta(optimal.beta);
    let diagnostics = SolutionDiagnostics {
        best_response_at_optimal,
        loss_second_derivative_at_optimal: normalized_loss_second_derivative(
            params.k(),
            params.rho(),
            optimal.beta,
        ),
        optimal_below_positive_fixed_points: fps
            .iter()
            .filter(|fp| fp.policy.beta > 0.0)
            .all(|fp| optimal.beta < fp.policy.beta),
        best_response_exceeds_optimal: best_response_at_optimal > optimal.beta,
    };

    Ok(PolicySolution {
        naive,
        naive_loss: params.welfare_loss(naive),
        constant,
        constant_loss: params.welfare_loss(constant),
        fixed_points: fps,
        optimal,
        optimal_loss: params.welfare_loss(optimal),
        diagnostics,
    })
}

/// Terminal state of a best-response iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DynamicsStatus {
    Converged,
    Cycling,
    MaxIterations,
}

/// Trace of repeatedly replacing the slope with the best response to it.
#[derive(Debug, Clone, Serialize)]
pub struct DynamicsTrace {
    /// `(iteration index, slope)` pairs, starting at `(0, beta_start)`.
    pub steps: Vec<(usize, f64)>,
    pub status: DynamicsStatus,
}

impl DynamicsTrace {
    pub fn terminal_beta(&self) -> f64 {
        self.steps.last().expect("trace always holds the start").1
    }
}

/// Iterates `beta <- best_response(beta)` from `beta_start`. Converged when
/// the residual drops below `tol`; recurrence of an earlier iterate (within
/// 1e-10) without convergence is reported as cycling. Non-convergence is a
/// status, not an error.
///
/// A recurrence only counts as a cycle when the orbit since the recurred
/// iterate kept a persistent amplitude; an oscillating approach to a fixed
/// point also revisits old iterates to within 1e-10 once it is nearly
/// converged, and that keeps iterating instead.
pub fn iterate_best_response(
    params: &ModelParams,
    beta_start: f64,
    max_iter: usize,
    tol: f64,
) -> DynamicsTrace {
    const RECURRENCE_TOL: f64 = 1e-10;
    const CYCLE_AMPLITUDE: f64 = 1e-6;
    let mut steps = vec![(0, beta_start)];
    let mut beta = beta_start;
    for iter in 1..=max_iter {
        let next = params.best_response_beta(beta);
        if (next - beta).abs() < tol {
            return DynamicsTrace {
                steps,
                status: DynamicsStatus::Converged,
            };
        }
        if let Some(j) = steps
            .iter()
            .position(|&(_, b)| (b - next).abs() < RECURRENCE_TOL)
        {
            let amplitude = steps[j..]
                .iter()
                .map(|&(_, b)| (b - next).abs())
                .fold(0.0, f64::max);
            if amplitude > CYCLE_AMPLITUDE {
                steps.push((iter, next));
                return DynamicsTrace {
                    steps,
                    status: DynamicsStatus::Cycling,
                };
            }
        }
        steps.push((iter, next));
        beta = next;
    }
    DynamicsTrace {
        steps,
        status: DynamicsStatus::MaxIterations,
    }
}
