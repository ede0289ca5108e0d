//! Comparative statics of the optimal and fixed-point slopes over `(k, rho)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::normalized_loss;
use crate::roots::Cubic;
use crate::solve::{fixed_point_betas, optimal_beta};

/// Which columns a sweep should emit. Everything is computed either way; the
/// flags only gate output.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepOutputs {
    pub beta_star: bool,
    pub fixed_points: bool,
    pub ratio: bool,
    pub losses: bool,
}

impl Default for SweepOutputs {
    fn default() -> Self {
        SweepOutputs {
            beta_star: true,
            fixed_points: true,
            ratio: true,
            losses: true,
        }
    }
}

/// A validated grid over susceptibility `k` and correlation `rho`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepSpec {
    k_grid: Vec<f64>,
    rho_grid: Vec<f64>,
    pub outputs: SweepOutputs,
}

impl SweepSpec {
    /// Grids must be nonempty, strictly increasing, and inside their domains
    /// (`k > 0`, `rho` in `(-1, 1)`).
    pub fn new(k_grid: Vec<f64>, rho_grid: Vec<f64>, outputs: SweepOutputs) -> Result<Self> {
        if k_grid.is_empty() || rho_grid.is_empty() {
            return Err(Error::InvalidParameter(
                "sweep grids must be nonempty".into(),
            ));
        }
        for w in k_grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "k grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for w in rho_grid.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::InvalidParameter(format!(
                    "rho grid must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if k_grid[0] <= 0.0 || !k_grid.iter().all(|k| k.is_finite()) {
            return Err(Error::InvalidParameter(
                "k grid must be positive and finite".into(),
            ));
        }
        if rho_grid[0] <= -1.0 || *rho_grid.last().unwrap() >= 1.0 {
            return Err(Error::InvalidParameter(
                "rho grid must lie inside (-1, 1)".into(),
            ));
        }
        Ok(SweepSpec {
            k_grid,
            rho_grid,
            outputs,
        })
    }

    pub fn k_grid(&self) -> &[f64] {
        &self.k_grid
    }

    pub fn rho_grid(&self) -> &[f64] {
        &self.rho_grid
    }
}

/// One `(k, rho)` cell of a sweep. `ratio` is `beta_star` over the smallest
/// positive fixed point, and `loss_fp` is the normalized loss at that same
/// fixed point. Rows that fail to solve carry the error message instead of
/// aborting the sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub rho: f64,
    pub beta_star: Option<f64>,
    pub beta_fp_list: Vec<f64>,
    pub ratio: Option<f64>,
    pub loss_star: Option<f64>,
    pub loss_fp: Option<f64>,
    pub error: Option<String>,
}

fn solve_row(k: f64, rho: f64) -> SweepRow {
    let fps = fixed_point_betas(k, rho);
    let smallest_pos = fps.iter().cloned().find(|&b| b > 0.0);
    match optimal_beta(k, rho) {
        Ok(beta_star) => SweepRow {
            k,
            rho,
            beta_star: Some(beta_star),
            ratio: smallest_pos.map(|fp| beta_star / fp),
            loss_star: Some(normalized_loss(k, rho, beta_star)),
            loss_fp: smallest_pos.map(|fp| normalized_loss(k, rho, fp)),
            beta_fp_list: fps,
            error: None,
        },
        Err(e) => SweepRow {
            k,
            rho,
            beta_star: None,
            ratio: None,
            loss_star: None,
            loss_fp: smallest_pos.map(|fp| normalized_loss(k, rho, fp)),
            beta_fp_list: fps,
            error: Some(e.to_string()),
        },
    }
}

/// One row per `(k, rho)` pair, ordered by rho-major grid index. Rows are
/// independent and solved in parallel; output order is deterministic.
pub fn run_sweep(spec: &SweepSpec) -> Vec<SweepRow> {
    let cells: Vec<(f64, f64)> = spec
        .rho_grid
        .iter()
        .flat_map(|&rho| spec.k_grid.iter().map(move |&k| (k, rho)))
        .collect();
    cells
        .into_par_iter()
        .map(|(k, rho)| solve_row(k, rho))
        .collect()
}

/// Unique fixed point when the type dimensions are uncorrelated: the real root
/// of `k^2 b^3 + b - 1`, in (0, 1), strictly decreasing in `k`.
pub fn rho_zero_fixed_point(k: f64) -> f64 {
    single_root(Cubic {
        c3: k * k,
        c2: 0.0,
        c1: 1.0,
        c0: -1.0,
    })
}

/// Optimal slope when the type dimensions are uncorrelated: the real root of
/// `2 k^2 b^3 + b - 1`.
pub fn rho_zero_optimal(k: f64) -> f64 {
    single_root(Cubic {
        c3: 2.0 * k * k,
        c2: 0.0,
        c1: 1.0,
        c0: -1.0,
    })
}

fn single_root(cubic: Cubic) -> f64 {
    // Both specialized cubics are strictly increasing with a sign change on (0, 1).
    let roots = cubic.real_roots();
    debug_assert_eq!(roots.len(), 1);
    roots[0]
}

/// A grid cell where an expected comparative-statics sign failed.
#[derive(Debug, Clone, Serialize)]
pub struct GridViolation {
    pub k: f64,
    pub rho: f64,
    pub description: String,
}

/// Outcome of the sign checks: monotonicity of the optimum in `rho` (direction
/// set by `k` against 3/4), single-peak behavior in `k` for each negative
/// `rho`, and a decreasing optimum-to-fixed-point ratio in `k` at `rho = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub violations: Vec<GridViolation>,
    pub cells_checked: usize,
}

impl SignReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Monotonicity is tested on grid differences with slack 1e-10; a grid cannot
/// certify strictness between its points.
const SLACK: f64 = 1e-10;

pub fn check_prop2_signs(k_grid: &[f64], rho_grid: &[f64]) -> SignReport {
    let mut violations = Vec::new();
    let mut cells = 0usize;

    // beta* monotone in rho: increasing for k > 3/4, decreasing for k < 3/4,
    // flat (to solver precision) at k = 3/4.
    for &k in k_grid {
        let betas: Vec<f64> = rho_grid
            .iter()
            .map(|&rho| optimal_beta(k, rho).unwrap_or(f64::NAN))
            .collect();
        for (w, rho_pair) in betas.windows(2).zip(rho_grid.windows(2)) {
            cells += 1;
            let diff = w[1] - w[0];
            let ok = if (k - 0.75).abs() < 1e-12 {
                diff.abs() <= 1e-9
            } else if k > 0.75 {
                diff > -SLACK
            } else {
                diff < SLACK
            };
            if !ok {
                violations.push(GridViolation {
                    k,
                    rho: rho_pair[1],
                    description: format!(
                        "beta* moved by {diff:+.3e} from rho = {} with k {} 3/4",
                        rho_pair[0],
                        if k > 0.75 { ">" } else { "<" }
                    ),
                });
            }
        }
    }

    // For rho < 0: beta* rises then falls across k (at most one sign change).
    for &rho in rho_grid.iter().filter(|&&r| r < 0.0) {
        let betas: Vec<f64> = k_grid
            .iter()
            .map(|&k| optimal_beta(k, rho).unwrap_or(f64::NAN))
            .collect();
        let mut seen_fall = false;
        for (w, k_pair) in betas.windows(2).zip(k_grid.windows(2)) {
            cells += 1;
            let diff = w[1] - w[0];
            if diff < -SLACK {
                seen_fall = true;
            } else if diff > SLACK && seen_fall {
                violations.push(GridViolation {
                    k: k_pair[1],
                    rho,
                    description: format!("beta* rose by {diff:+.3e} after having fallen"),
                });
            }
        }
    }

    // At rho = 0 the ratio beta*/beta_fp falls in k.
    let mut last_ratio = f64::INFINITY;
    for &k in k_grid {
        cells += 1;
        let ratio = rho_zero_optimal(k) / rho_zero_fixed_point(k);
        if ratio >= last_ratio + SLACK {
            violations.push(GridViolation {
                k,
                rho: 0.0,
                description: format!("ratio rose to {ratio} from {last_ratio}"),
            });
        }
        last_ratio = ratio;
    }

    SignReport {
        violations,
        cells_checked: cells,
    }
}

/// Log-spaced grid helper, `points >= 2`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Linear grid helper, `points >= 2`, endpoints included.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && hi > lo);
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}
