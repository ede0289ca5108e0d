//! Binary-action variant: information loss from pooling at the top.
//!
//! Actions and natural types are both binary. The high type always plays high;
//! the low type pays cost `c` to mimic and does so whenever the allocation gap
//! exceeds the cost. Once both types pool on the high action the data carries
//! no information, so the designer flattens: commitment sets the gap exactly
//! to `c`, buying full separation at the price of a compressed allocation
//! spread. All welfare expressions are exact closed forms.

use serde::Serialize;

use crate::error::{Error, Result};

/// Primitives of the binary model: prior probability `pi` of the high type
/// and the low type's manipulation cost, with `0 < cost < pi < 1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinaryParams {
    pi: f64,
    cost: f64,
}

impl BinaryParams {
    pub fn new(pi: f64, cost: f64) -> Result<Self> {
        if !(pi.is_finite() && cost.is_finite() && 0.0 < cost && cost < pi && pi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "binary model needs 0 < cost < pi < 1, got pi = {pi}, cost = {cost}"
            )));
        }
        Ok(BinaryParams { pi, cost })
    }

    pub fn pi(&self) -> f64 {
        self.pi
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }
}

/// Allocations at the two actions, with spread `delta = y1 - y0 >= 0`.
///
/// The spread is stored, not recomputed: policies built from a spread (the
/// commitment optimum sets it to the cost exactly) must compare against the
/// cost without a rounding ulp from `y1 - y0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinaryPolicy {
    y0: f64,
    y1: f64,
    delta: f64,
}

impl BinaryPolicy {
    pub fn new(y0: f64, y1: f64) -> Result<Self> {
        if !(y0.is_finite() && y1.is_finite() && y1 >= y0) {
            return Err(Error::InvalidParameter(format!(
                "binary policy needs finite y1 >= y0, got y0 = {y0}, y1 = {y1}"
            )));
        }
        Ok(BinaryPolicy {
            y0,
            y1,
            delta: y1 - y0,
        })
    }

    /// Builds the policy from its low allocation and spread.
    pub fn from_spread(y0: f64, delta: f64) -> Result<Self> {
        if !(y0.is_finite() && delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "binary policy needs finite y0 and delta >= 0, got y0 = {y0}, delta = {delta}"
            )));
        }
        Ok(BinaryPolicy {
            y0,
            y1: y0 + delta,
            delta,
        })
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    /// Allocation spread; smaller means flatter.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// The action a type takes against a policy. The high type is committed to
/// the high action. The low type mimics only when the spread strictly beats
/// the cost; at `delta == cost` it separates, which is what lets commitment
/// achieve full separation at spread exactly `cost`.
pub fn binary_agent_best_response(params: &BinaryParams, policy: &BinaryPolicy, eta: u8) -> u8 {
    debug_assert!(eta <= 1, "eta must be 0 or 1");
    if eta == 1 || policy.delta() > params.cost {
        1
    } else {
        0
    }
}

/// The rule fit to pre-manipulation data: allocate the type values
/// themselves, spread 1. Both types then pool on the high action and welfare
/// is `-(1 - pi)`.
pub fn binary_naive(params: &BinaryParams) -> (BinaryPolicy, f64) {
    (
        BinaryPolicy {
            y0: 0.0,
            y1: 1.0,
            delta: 1.0,
        },
        -(1.0 - params.pi),
    )
}

/// The simultaneous-play outcome: pooling at the top with `y1 = pi`, spread
/// `pi`, welfare `-pi (1 - pi)`. The off-path allocation after the low action
/// is zero, which does not affect welfare under pooling.
pub fn binary_fixed_point(params: &BinaryParams) -> (BinaryPolicy, f64) {
    let pi = params.pi;
    (
        BinaryPolicy {
            y0: 0.0,
            y1: pi,
            delta: pi,
        },
        -pi * (1.0 - pi),
    )
}

/// The commitment optimum: spread exactly `cost`, centered so the mean
/// allocation equals `pi`. Full separation, welfare `-(1 - cost)^2 (1 - pi) pi`.
pub fn binary_commitment(params: &BinaryParams) -> (BinaryPolicy, f64) {
    let (pi, c) = (params.pi, params.cost);
    let y0 = pi * (1.0 - c);
    (
        BinaryPolicy {
            y0,
            y1: y0 + c,
            delta: c,
        },
        -(1.0 - c) * (1.0 - c) * (1.0 - pi) * pi,
    )
}

/// Welfare of the best policy with a given spread: pooling welfare
/// `-pi (1 - pi)` once the spread exceeds the cost, separation welfare
/// `-pi (1 - pi) (1 - delta)^2` at or below it. Flat between the fixed-point
/// spread and the cost, so nothing is gained until the spread reaches `cost`.
pub fn binary_welfare_of_delta(params: &BinaryParams, delta: f64) -> Result<(BinaryPolicy, f64)> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must be finite and nonnegative, got {delta}"
        )));
    }
    let pi = params.pi;
    if delta > params.cost {
        // Pooling: only y1 matters; best y1 = pi.
        Ok((
            BinaryPolicy {
                y0: pi - delta,
                y1: pi,
                delta,
            },
            -pi * (1.0 - pi),
        ))
    } else {
        // Separation: best levels center the mean allocation on pi.
        let y0 = pi * (1.0 - delta);
        Ok((
            BinaryPolicy {
                y0,
                y1: y0 + delta,
                delta,
            },
            -pi * (1.0 - pi) * (1.0 - delta) * (1.0 - delta),
        ))
    }
}

/// A policy with its spread and exact welfare.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinaryPolicyReport {
    pub policy: BinaryPolicy,
    pub delta: f64,
    pub welfare: f64,
}

/// All three benchmark policies with the flattening and welfare orderings.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BinaryReport {
    pub pi: f64,
    pub cost: f64,
    pub naive: BinaryPolicyReport,
    pub fixed_point: BinaryPolicyReport,
    pub commitment: BinaryPolicyReport,
    /// Spreads order as `cost < pi < 1`: commitment flattest, naive steepest.
    pub delta_ordering_ok: bool,
    /// naive < fixed point < commitment < 0.
    pub welfare_ordering_ok: bool,
}

pub fn binary_report(params: &BinaryParams) -> BinaryReport {
    let report = |(policy, welfare): (BinaryPolicy, f64)| BinaryPolicyReport {
        policy,
        delta: policy.delta(),
        welfare,
    };
    let naive = report(binary_naive(params));
    let fixed_point = report(binary_fixed_point(params));
    let commitment = report(binary_commitment(params));
    BinaryReport {
        pi: params.pi,
        cost: params.cost,
        naive,
        fixed_point,
        commitment,
        delta_ordering_ok: commitment.delta < fixed_point.delta && fixed_point.delta < naive.delta,
        welfare_ordering_ok: naive.welfare < fixed_point.welfare
            && fixed_point.welfare < commitment.welfare
            && commitment.welfare < 0.0,
    }
}

/// Expected welfare of a policy by direct enumeration of the two types under
/// their best responses. Test oracle for the closed forms.
pub fn enumerate_welfare(params: &BinaryParams, policy: &BinaryPolicy) -> f64 {
    let mut welfare = 0.0;
    for (eta, weight) in [(1u8, params.pi), (0u8, 1.0 - params.pi)] {
        let x = binary_agent_best_response(params, policy, eta);
        let y = if x == 1 { policy.y1 } else { policy.y0 };
        let err = y - eta as f64;
        welfare -= weight * err * err;
    }
    welfare
}
