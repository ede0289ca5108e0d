//! Model primitives and closed-form quantities.
//!
//! An agent of type `(eta, gamma)` facing a linear allocation rule
//! `Y(x) = beta * x + beta0` produces the observable action
//! `x = eta + m * beta * gamma`. The designer wants the allocation to match
//! `eta` under squared loss. This module holds the environment parameters and
//! every closed form built on them: the agent strategy, moments of `x`, the
//! designer's best-response (OLS) coefficients, welfare loss and its
//! information/misallocation decomposition, and the normalized loss `L` whose
//! minimizer is the commitment-optimal slope.

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on `|best_response(beta) - beta|` for fixed-point membership.
pub const FIXED_POINT_TOL: f64 = 1e-8;

/// Environment primitives: moments of the type distribution plus the stakes
/// parameter `m`. Fields are validated at construction and immutable after.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModelParams {
    mu_eta: f64,
    mu_gamma: f64,
    sigma_eta: f64,
    sigma_gamma: f64,
    rho: f64,
    m: f64,
}

impl ModelParams {
    /// Validates `sigma_eta > 0`, `sigma_gamma > 0`, `m > 0`, `rho` strictly
    /// inside `(-1, 1)`, and finiteness of everything. Boundary values are
    /// rejected rather than treated as limits: they break the variance and
    /// best-response denominators.
    pub fn new(
        mu_eta: f64,
        mu_gamma: f64,
        sigma_eta: f64,
        sigma_gamma: f64,
        rho: f64,
        m: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("mu_eta", mu_eta),
            ("mu_gamma", mu_gamma),
            ("sigma_eta", sigma_eta),
            ("sigma_gamma", sigma_gamma),
            ("rho", rho),
            ("m", m),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if sigma_eta <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma_eta must be positive, got {sigma_eta}"
            )));
        }
        if sigma_gamma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma_gamma must be positive, got {sigma_gamma}"
            )));
        }
        if m <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "m must be positive, got {m}"
            )));
        }
        if !(-1.0 < rho && rho < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie strictly inside (-1, 1), got {rho}"
            )));
        }
        Ok(Self {
            mu_eta,
            mu_gamma,
            sigma_eta,
            sigma_gamma,
            rho,
            m,
        })
    }

    /// Shorthand environment with unit variances, zero means, and `m = k`,
    /// so that the susceptibility statistic equals `k` exactly. Every
    /// slope-level quantity depends on the primitives only through `(k, rho)`,
    /// which makes this the canonical parameterization for sweeps.
    pub fn from_k_rho(k: f64, rho: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "k must be positive, got {k}"
            )));
        }
        Self::new(0.0, 0.0, 1.0, 1.0, rho, k)
    }

    pub fn mu_eta(&self) -> f64 {
        self.mu_eta
    }

    pub fn mu_gamma(&self) -> f64 {
        self.mu_gamma
    }

    pub fn sigma_eta(&self) -> f64 {
        self.sigma_eta
    }

    pub fn sigma_gamma(&self) -> f64 {
        self.sigma_gamma
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Susceptibility to manipulation, `k = m * sigma_gamma / sigma_eta`.
    /// Always recomputed from the primitives; strictly positive.
    pub fn k(&self) -> f64 {
        self.m * self.sigma_gamma / self.sigma_eta
    }

    /// The action an agent of the given type takes against `policy`:
    /// `x = eta + m * beta * gamma`. Independent of the intercept.
    pub fn agent_action(&self, policy: Policy, agent: AgentType) -> f64 {
        agent.eta + self.m * policy.beta * agent.gamma
    }

    /// Population moments of the action when agents respond to slope `beta`.
    /// `var_x > 0` for every `beta` because `rho` is strictly inside `(-1, 1)`.
    pub fn action_moments(&self, beta: f64) -> ActionMoments {
        let cross = self.m * self.rho * self.sigma_eta * self.sigma_gamma * beta;
        ActionMoments {
            mean_x: self.mu_eta + self.m * beta * self.mu_gamma,
            var_x: self.sigma_eta * self.sigma_eta
                + self.m * self.m * self.sigma_gamma * self.sigma_gamma * beta * beta
                + 2.0 * cross,
            cov_x_eta: self.sigma_eta * self.sigma_eta + cross,
        }
    }

    /// OLS slope of `eta` on `x` when agents respond to slope `beta`:
    /// `cov(x, eta) / var(x)`. This is the slope the designer would fit to data
    /// generated under `beta`, and therefore her best-response sensitivity.
    pub fn best_response_beta(&self, beta: f64) -> f64 {
        let m = self.action_moments(beta);
        m.cov_x_eta / m.var_x
    }

    /// OLS intercept of `eta` on `x`: `mu_eta - best_response_beta * mean_x`.
    pub fn best_response_intercept(&self, beta: f64) -> f64 {
        let m = self.action_moments(beta);
        self.mu_eta - (m.cov_x_eta / m.var_x) * m.mean_x
    }

    /// Best-response policy `(best_response_beta, best_response_intercept)`.
    pub fn best_response_policy(&self, beta: f64) -> Policy {
        Policy {
            beta: self.best_response_beta(beta),
            beta0: self.best_response_intercept(beta),
        }
    }

    /// Closed-form derivative of the best-response slope with respect to `beta`.
    /// Negative everywhere on `beta >= 0` when `rho >= 0`.
    pub fn best_response_beta_derivative(&self, beta: f64) -> f64 {
        let ss = self.m * self.sigma_eta * self.sigma_gamma;
        let var_x = self.action_moments(beta).var_x;
        let numer = ss
            * (2.0 * beta * ss
                + self.rho * self.sigma_eta * self.sigma_eta
                + self.rho * beta * beta * self.m * self.m * self.sigma_gamma * self.sigma_gamma);
        -numer / (var_x * var_x)
    }

    /// Expected squared allocation error `E[(Y(x) - eta)^2]` under `policy`,
    /// in closed form. Nonnegative for every finite policy.
    pub fn welfare_loss(&self, policy: Policy) -> f64 {
        let b = policy.beta;
        let one_minus_b = 1.0 - b;
        let centering = policy.beta0 - one_minus_b * self.mu_eta + self.m * b * b * self.mu_gamma;
        one_minus_b * one_minus_b * self.sigma_eta * self.sigma_eta
            + self.m * self.m * b.powi(4) * self.sigma_gamma * self.sigma_gamma
            - 2.0 * one_minus_b * self.m * b * b * self.rho * self.sigma_eta * self.sigma_gamma
            + centering * centering
    }

    /// Loss-minimizing intercept for a given slope:
    /// `(1 - beta) * mu_eta - m * beta^2 * mu_gamma`. Equivalently the
    /// intercept that centers the mean allocation on `mu_eta`.
    pub fn loss_minimizing_intercept(&self, beta: f64) -> f64 {
        (1.0 - beta) * self.mu_eta - self.m * beta * beta * self.mu_gamma
    }

    /// Splits the welfare loss of `policy` into information loss (residual
    /// variance of the best linear estimate of `eta` from `x`) and
    /// misallocation loss (squared gap between the policy and that estimate).
    ///
    /// The policy is evaluated exactly as given: an intercept away from the
    /// centered one adds its squared mismatch to the misallocation term, which
    /// keeps `total = info + misallocation` an identity for every policy.
    pub fn welfare_breakdown(&self, policy: Policy) -> WelfareBreakdown {
        let moments = self.action_moments(policy.beta);
        let beta_hat = moments.cov_x_eta / moments.var_x;
        let info = self.sigma_eta * self.sigma_eta - beta_hat * beta_hat * moments.var_x;
        let slope_gap = policy.beta - beta_hat;
        let intercept_gap = policy.beta0 - (self.mu_eta - policy.beta * moments.mean_x);
        let mis = slope_gap * slope_gap * moments.var_x + intercept_gap * intercept_gap;
        WelfareBreakdown::new(info, mis)
    }

    /// Derivative of the envelope welfare loss at a fixed point, in the closed
    /// form `(2 m^2 / var_x) * beta_fp^2 * sigma_eta^2 * sigma_gamma^2 * (1 - rho^2)`.
    /// Strictly positive at every fixed point: flattening the rule always
    /// yields a first-order welfare gain there.
    ///
    /// Errors unless `beta_fp` is a fixed point of the best response within
    /// [`FIXED_POINT_TOL`].
    pub fn loss_slope_at_fixed_point(&self, beta_fp: f64) -> Result<f64> {
        let residual = (self.best_response_beta(beta_fp) - beta_fp).abs();
        if !(residual < FIXED_POINT_TOL) {
            return Err(Error::NotAFixedPoint {
                beta: beta_fp,
                residual,
                tol: FIXED_POINT_TOL,
            });
        }
        let var_x = self.action_moments(beta_fp).var_x;
        let sigma2 = self.sigma_eta * self.sigma_eta * self.sigma_gamma * self.sigma_gamma;
        Ok(
            2.0 * self.m * self.m / var_x
                * beta_fp
                * beta_fp
                * sigma2
                * (1.0 - self.rho * self.rho),
        )
    }
}

/// Linear allocation rule `Y(x) = beta * x + beta0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Policy {
    pub beta: f64,
    pub beta0: f64,
}

impl Policy {
    /// Validating constructor for externally supplied policies.
    pub fn new(beta: f64, beta0: f64) -> Result<Self> {
        if !beta.is_finite() || !beta0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "policy coefficients must be finite, got beta = {beta}, beta0 = {beta0}"
            )));
        }
        Ok(Self { beta, beta0 })
    }

    /// The allocation assigned to action `x`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.beta * x + self.beta0
    }
}

/// An agent's two-dimensional type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgentType {
    /// Natural action: the observable produced when the rule ignores data.
    pub eta: f64,
    /// Gaming ability: idiosyncratic responsiveness to the rule's slope.
    pub gamma: f64,
}

/// Population moments of the observable action under a given policy slope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ActionMoments {
    pub mean_x: f64,
    pub var_x: f64,
    pub cov_x_eta: f64,
}

/// Welfare loss split into information loss and misallocation loss.
/// `total` is exactly their sum; tiny negative rounding residues in either
/// component are clamped to zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WelfareBreakdown {
    pub info_loss: f64,
    pub misallocation_loss: f64,
    pub total: f64,
}

impl WelfareBreakdown {
    fn new(info: f64, mis: f64) -> Self {
        let info = clamp_rounding_residue(info);
        let mis = clamp_rounding_residue(mis);
        WelfareBreakdown {
            info_loss: info,
            misallocation_loss: mis,
            total: info + mis,
        }
    }
}

fn clamp_rounding_residue(v: f64) -> f64 {
    if v < 0.0 {
        debug_assert!(
            v > -1e-12,
            "component loss is negative beyond rounding: {v}"
        );
        0.0
    } else {
        v
    }
}

/// Welfare loss at slope `beta` with the loss-minimizing intercept plugged in,
/// divided by `sigma_eta^2`:
/// `L(beta, k, rho) = (k b^2 + b - 1)^2 + 2 (1 - rho) b^2 (1 - b) k`.
/// Depends on the environment only through `(k, rho)`.
pub fn normalized_loss(k: f64, rho: f64, beta: f64) -> f64 {
    let q = k * beta * beta + beta - 1.0;
    q * q + 2.0 * (1.0 - rho) * beta * beta * (1.0 - beta) * k
}

/// Derivative of [`normalized_loss`] in `beta`:
/// `-2 (1 - b) + 4 k^2 b^3 + 2 rho k b (3 b - 2)`. Equals `-2` at `beta = 0`,
/// so some positive weight on the data always beats none.
pub fn normalized_loss_derivative(k: f64, rho: f64, beta: f64) -> f64 {
    -2.0 * (1.0 - beta) + 4.0 * k * k * beta.powi(3) + 2.0 * rho * k * beta * (3.0 * beta - 2.0)
}

/// Second derivative of [`normalized_loss`] in `beta`; used to certify the
/// second-order condition at the optimum.
pub fn normalized_loss_second_derivative(k: f64, rho: f64, beta: f64) -> f64 {
    2.0 + 12.0 * k * k * beta * beta + 4.0 * rho * k * (3.0 * beta - 1.0)
}
