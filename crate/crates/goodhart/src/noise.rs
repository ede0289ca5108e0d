//! Estimation with noise: deliberately degrading the training regressor to
//! flatten the fitted rule.
//!
//! Classical attenuation bias shrinks a regression slope toward zero when
//! independent noise is added to the regressor. This pipeline exploits that on
//! purpose: train on data generated under some slope, add calibrated noise to
//! the recorded actions (never to the deployed agent's action), refit, and the
//! fitted slope lands on any target below the clean best response — in
//! particular on the commitment optimum. A constant shift of the training
//! regressor then centers the deployed rule so the average allocation stays on
//! the population mean after agents re-respond.

use std::io::{self, Write};

use serde::Serialize;

use crate::emit::fmt12;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Policy};
use crate::rng::NormalStream;
use crate::sim::{empirical_welfare, sample_population, simple_ols, AgentSample, OlsFit};

/// How the training regressor is perturbed: `x' = x + shift + eps`,
/// `eps ~ N(0, noise_std^2)`, independent across rows given `seed`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoisySpec {
    pub shift: f64,
    pub noise_std: f64,
    pub seed: u64,
}

impl NoisySpec {
    pub fn new(shift: f64, noise_std: f64, seed: u64) -> Result<Self> {
        if !shift.is_finite() || !noise_std.is_finite() || noise_std < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise spec needs finite shift and noise_std >= 0, got shift = {shift}, noise_std = {noise_std}"
            )));
        }
        Ok(NoisySpec {
            shift,
            noise_std,
            seed,
        })
    }
}

/// A training set of `(x', eta)` pairs: perturbed regressor, untouched response.
#[derive(Debug, Clone)]
pub struct NoisedDataset {
    pub x_prime: Vec<f64>,
    pub eta: Vec<f64>,
}

impl NoisedDataset {
    /// Writes the dataset as CSV with header `x_prime,eta`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x_prime,eta")?;
        for (x, e) in self.x_prime.iter().zip(&self.eta) {
            writeln!(w, "{},{}", fmt12(*x), fmt12(*e))?;
        }
        Ok(())
    }
}

/// Perturbs the recorded actions of `sample` per `spec`, leaving the response
/// column unchanged. With zero noise and zero shift the data is unchanged.
pub fn noised_dataset(sample: &AgentSample, spec: &NoisySpec) -> NoisedDataset {
    let stream = NormalStream::new(spec.seed);
    let x_prime = sample
        .x()
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if spec.noise_std == 0.0 {
                x + spec.shift
            } else {
                x + spec.shift + spec.noise_std * stream.standard(i as u64)
            }
        })
        .collect();
    NoisedDataset {
        x_prime,
        eta: sample.eta().to_vec(),
    }
}

/// Population slope of regressing `eta` on the noised regressor when agents
/// respond to `train_beta`: `cov(x, eta) / (var(x) + sigma_eps^2)`. Recovers
/// the clean best response at zero noise and falls to zero as the noise
/// variance grows.
pub fn attenuated_slope_analytic(params: &ModelParams, train_beta: f64, sigma_eps: f64) -> f64 {
    let m = params.action_moments(train_beta);
    m.cov_x_eta / (m.var_x + sigma_eps * sigma_eps)
}

/// An estimation procedure mapping a training set to a fitted line. Only
/// least squares ships; the trait is the extension point for other fitters.
pub trait Estimator {
    fn fit(&self, x: &[f64], y: &[f64]) -> Result<(f64, f64)>;
}

/// Ordinary least squares.
#[derive(Debug, Clone, Copy, Default)]
pub struct OlsEstimator;

impl Estimator for OlsEstimator {
    fn fit(&self, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
        let fit = simple_ols(x, y)?;
        Ok((fit.slope, fit.intercept))
    }
}

/// Fits an estimator to a noised dataset.
pub fn fit_noised<E: Estimator>(dataset: &NoisedDataset, estimator: &E) -> Result<(f64, f64)> {
    estimator.fit(&dataset.x_prime, &dataset.eta)
}

/// Outcome of calibrating the noise level to a target slope.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CalibrationResult {
    /// Noise standard deviation that attenuates the fitted slope to the target.
    pub sigma_eps_star: f64,
    /// Regressor shift that recenters the deployed rule.
    pub shift_star: f64,
    /// Analytic fitted slope at the calibrated noise level; equals the target
    /// up to rounding.
    pub achieved_slope: f64,
    /// The rule obtained by fitting on the noised, shifted training data.
    pub deployed_policy: Policy,
    /// Mean allocation once agents re-respond to the deployed slope.
    pub deployed_mean_allocation: f64,
}

/// Solves for the noise variance that lands the fitted slope on
/// `target_beta` when training data is generated under `train_beta`:
/// `sigma_eps^2 = cov / target - var`, exact for least squares.
///
/// The shift is set to `m * mu_gamma * (target - train_beta)`, which makes the
/// mean allocation after re-response equal to the population mean of the
/// natural action (the deployed intercept becomes the centered intercept for
/// the target slope).
///
/// `tol` bounds the allowed gap between the achieved slope and the target;
/// exceeding it is an internal failure, not bad input.
pub fn calibrate_to_target(
    params: &ModelParams,
    train_beta: f64,
    target_beta: f64,
    tol: f64,
) -> Result<CalibrationResult> {
    let clean_slope = params.best_response_beta(train_beta);
    if !(target_beta > 0.0) || target_beta > clean_slope {
        return Err(Error::TargetUnreachable {
            target: target_beta,
            train_beta,
            best_response: clean_slope,
        });
    }
    let moments = params.action_moments(train_beta);
    // cov > 0 is implied by 0 < target <= cov/var with var > 0.
    let sigma_eps_sq = (moments.cov_x_eta / target_beta - moments.var_x).max(0.0);
    let sigma_eps_star = sigma_eps_sq.sqrt();

    let achieved_slope = attenuated_slope_analytic(params, train_beta, sigma_eps_star);
    if (achieved_slope - target_beta).abs() > tol {
        return Err(Error::SolverFailure(format!(
            "calibrated slope {achieved_slope} misses target {target_beta} beyond tol {tol}"
        )));
    }

    let b = target_beta;
    let shift_star = params.m() * params.mu_gamma() * (b - train_beta);
    // Intercept of the fit on shifted training data: mean eta minus slope
    // times the shifted mean regressor (noise has mean zero).
    let beta0 = params.mu_eta() - b * (moments.mean_x + shift_star);
    let deployed_policy = Policy { beta: b, beta0 };
    let deployed_mean_allocation = b * params.action_moments(b).mean_x + beta0;

    Ok(CalibrationResult {
        sigma_eps_star,
        shift_star,
        achieved_slope,
        deployed_policy,
        deployed_mean_allocation,
    })
}

/// Empirical outcome of deploying a calibrated rule on a fresh population.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeploymentEval {
    pub empirical_loss: f64,
    pub loss_std_error: f64,
    pub mean_allocation: f64,
    pub mean_allocation_std_error: f64,
    pub n: usize,
}

/// Samples a fresh population responding to the deployed slope (no noise is
/// added at deployment time) and evaluates realized welfare and the mean
/// allocation.
pub fn deploy_and_evaluate(
    params: &ModelParams,
    result: &CalibrationResult,
    n: usize,
    seed: u64,
) -> Result<DeploymentEval> {
    let policy = result.deployed_policy;
    let sample = sample_population(params, policy, n, seed)?;
    let welfare = empirical_welfare(&sample, policy);
    let allocations: Vec<f64> = sample.x().iter().map(|&x| policy.evaluate(x)).collect();
    let mean_alloc = crate::sim::mean(&allocations);
    let alloc_se = (crate::sim::variance(&allocations) / n as f64).sqrt();
    Ok(DeploymentEval {
        empirical_loss: welfare.mean_sq_loss,
        loss_std_error: welfare.std_error,
        mean_allocation: mean_alloc,
        mean_allocation_std_error: alloc_se,
        n,
    })
}

/// Refits on a noised dataset and reports the resulting fit; convenience for
/// checking the analytic attenuation against data.
pub fn noised_ols(dataset: &NoisedDataset) -> Result<OlsFit> {
    simple_ols(&dataset.x_prime, &dataset.eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{mean, variance};

    fn figure2_params() -> ModelParams {
        ModelParams::from_k_rho(1.0, 0.0).unwrap()
    }

    const FP_BETA: f64 = 0.6823278038280193;

    #[test]
    fn zero_noise_zero_shift_is_identity() {
        let p = figure2_params();
        let s = sample_population(
            &p,
            Policy {
                beta: 0.4,
                beta0: 0.0,
            },
            1000,
            1,
        )
        .unwrap();
        let d = noised_dataset(&s, &NoisySpec::new(0.0, 0.0, 9).unwrap());
        assert_eq!(d.x_prime, s.x());
        assert_eq!(d.eta, s.eta());
    }

    #[test]
    fn pure_shift_moves_every_row() {
        let p = figure2_params();
        let s = sample_population(
            &p,
            Policy {
                beta: 0.4,
                beta0: 0.0,
            },
            1000,
            1,
        )
        .unwrap();
        let d = noised_dataset(&s, &NoisySpec::new(5.0, 0.0, 9).unwrap());
        for (xp, x) in d.x_prime.iter().zip(s.x()) {
            assert_eq!(*xp, x + 5.0);
        }
    }

    #[test]
    fn noise_variance_adds_to_regressor_variance() {
        let p = figure2_params();
        let s = sample_population(
            &p,
            Policy {
                beta: 0.5,
                beta0: 0.0,
            },
            1_000_000,
            61,
        )
        .unwrap();
        let sigma = 0.8;
        let d = noised_dataset(&s, &NoisySpec::new(0.0, sigma, 62).unwrap());
        let expected = variance(s.x()) + sigma * sigma;
        let se = expected * (2.0 / 1e6f64).sqrt();
        assert!((variance(&d.x_prime) - expected).abs() < 3.0 * se);
    }

    #[test]
    fn attenuation_examples() {
        let p = figure2_params();
        assert_eq!(
            attenuated_slope_analytic(&p, 0.3, 0.0),
            p.best_response_beta(0.3)
        );
        assert!(attenuated_slope_analytic(&p, FP_BETA, 1e6) < 1e-9);
    }

    #[test]
    fn attenuation_is_monotone_in_noise() {
        for i in 0..100u64 {
            let u = |j| crate::rng::unit_from(0xA77 ^ i, j);
            let p =
                ModelParams::from_k_rho(10f64.powf(2.0 * u(0) - 1.0), 1.9 * u(1) - 0.95).unwrap();
            let beta = 2.0 * u(2);
            if p.action_moments(beta).cov_x_eta <= 0.0 {
                continue;
            }
            let mut last = attenuated_slope_analytic(&p, beta, 0.0);
            for step in 1..=8 {
                let slope = attenuated_slope_analytic(&p, beta, step as f64 * 0.5);
                assert!(slope < last);
                last = slope;
            }
        }
    }

    #[test]
    fn calibration_round_trip() {
        for i in 0..200u64 {
            let u = |j| crate::rng::unit_from(0xCA1 ^ i, j);
            let p =
                ModelParams::from_k_rho(10f64.powf(2.0 * u(0) - 1.0), 1.9 * u(1) - 0.95).unwrap();
            let train_beta = 1.5 * u(2);
            let clean = p.best_response_beta(train_beta);
            if clean <= 0.0 {
                continue;
            }
            let target = clean * (0.05 + 0.9 * u(3));
            let cal = calibrate_to_target(&p, train_beta, target, 1e-9).unwrap();
            let achieved = attenuated_slope_analytic(&p, train_beta, cal.sigma_eps_star);
            assert!((achieved - target).abs() <= 1e-10 * target.max(1.0));
        }
    }

    #[test]
    fn calibration_at_feasibility_boundary_needs_no_noise() {
        let p = figure2_params();
        let clean = p.best_response_beta(FP_BETA);
        let cal = calibrate_to_target(&p, FP_BETA, clean, 1e-9).unwrap();
        assert!(cal.sigma_eps_star < 1e-7);
        // Zero means: no shift, and the deployed rule is the best response.
        assert_eq!(cal.shift_star, 0.0);
        let br = p.best_response_policy(FP_BETA);
        assert!((cal.deployed_policy.beta - br.beta).abs() < 1e-12);
        assert!((cal.deployed_policy.beta0 - br.beta0).abs() < 1e-12);
    }

    #[test]
    fn unreachable_targets_are_rejected() {
        let p = figure2_params();
        let clean = p.best_response_beta(FP_BETA);
        assert!(matches!(
            calibrate_to_target(&p, FP_BETA, clean + 0.01, 1e-9),
            Err(Error::TargetUnreachable { .. })
        ));
        assert!(matches!(
            calibrate_to_target(&p, FP_BETA, 0.0, 1e-9),
            Err(Error::TargetUnreachable { .. })
        ));
        assert!(matches!(
            calibrate_to_target(&p, FP_BETA, -0.3, 1e-9),
            Err(Error::TargetUnreachable { .. })
        ));
    }

    #[test]
    fn figure2_calibration_hits_the_commitment_optimum() {
        let p = figure2_params();
        let cal = calibrate_to_target(&p, FP_BETA, 0.590, 1e-9).unwrap();
        let m = p.action_moments(FP_BETA);
        let expected_var = m.cov_x_eta / 0.590 - m.var_x;
        assert!((cal.sigma_eps_star.powi(2) - expected_var).abs() < 1e-12);
        assert!((cal.deployed_policy.beta - 0.590).abs() < 1e-15);
        let opt = crate::solve::optimal_policy(&p).unwrap();
        assert!((cal.deployed_policy.beta - opt.beta).abs() < 5e-4);
    }

    #[test]
    fn zero_mean_gaming_needs_no_shift() {
        let p = ModelParams::new(3.0, 0.0, 1.0, 1.0, 0.2, 1.5).unwrap();
        let cal = calibrate_to_target(&p, 0.6, 0.4, 1e-9).unwrap();
        assert_eq!(cal.shift_star, 0.0);
        assert!((cal.deployed_mean_allocation - p.mu_eta()).abs() < 1e-12);
    }

    #[test]
    fn shift_formula_matches_two_point_simulation_oracle() {
        // Deployed mean allocation is affine in the shift c; locate its root
        // from two simulated evaluations and compare with the closed form.
        let p = ModelParams::new(1.0, 2.0, 1.0, 1.0, 0.3, 1.2).unwrap();
        let train_beta = 0.8;
        let target = 0.5;
        let cal = calibrate_to_target(&p, train_beta, target, 1e-9).unwrap();

        let n = 1_000_000;
        let mean_alloc_for_shift = |c: f64| {
            let beta0 = p.mu_eta() - target * (p.action_moments(train_beta).mean_x + c);
            let policy = Policy {
                beta: target,
                beta0,
            };
            let s = sample_population(&p, policy, n, 777).unwrap();
            let allocs: Vec<f64> = s.x().iter().map(|&x| policy.evaluate(x)).collect();
            mean(&allocs)
        };
        let (c0, c1) = (0.0, 1.0);
        let (m0, m1) = (mean_alloc_for_shift(c0), mean_alloc_for_shift(c1));
        let root = c0 + (p.mu_eta() - m0) * (c1 - c0) / (m1 - m0);
        // Monte Carlo noise on the two endpoint means propagates to the root.
        assert!(
            (root - cal.shift_star).abs() < 0.01,
            "simulated shift {root} vs closed form {}",
            cal.shift_star
        );
    }

    #[test]
    fn deployment_centers_even_with_strong_mean_gaming() {
        let p = ModelParams::new(0.0, 2.0, 1.0, 1.0, 0.0, 1.0).unwrap();
        let cal = calibrate_to_target(&p, FP_BETA, 0.5, 1e-9).unwrap();
        assert!(cal.shift_star != 0.0);
        let eval = deploy_and_evaluate(&p, &cal, 1_000_000, 555).unwrap();
        assert!(eval.mean_allocation.abs() < 3.0 * eval.mean_allocation_std_error);
    }

    #[test]
    fn deployment_centers_allocations_across_draws() {
        for i in 0..100u64 {
            let u = |j| crate::rng::unit_from(0xDE9 ^ i, j);
            let p = ModelParams::new(
                6.0 * u(0) - 3.0,
                6.0 * u(1) - 3.0,
                (u(2) * 2.0 - 1.0).exp(),
                (u(3) * 2.0 - 1.0).exp(),
                1.9 * u(4) - 0.95,
                (u(5) * 2.0 - 1.0).exp(),
            )
            .unwrap();
            let train_beta = 1.2 * u(6);
            let clean = p.best_response_beta(train_beta);
            if clean <= 0.0 {
                continue;
            }
            let target = clean * (0.2 + 0.7 * u(7));
            let cal = calibrate_to_target(&p, train_beta, target, 1e-9).unwrap();
            assert!((cal.deployed_mean_allocation - p.mu_eta()).abs() < 1e-10);
            let eval = deploy_and_evaluate(&p, &cal, 1_000_000, 1000 + i).unwrap();
            assert!(
                (eval.mean_allocation - p.mu_eta()).abs() < 3.0 * eval.mean_allocation_std_error,
                "draw {i}: mean allocation {} vs mu_eta {}",
                eval.mean_allocation,
                p.mu_eta()
            );
        }
    }

    #[test]
    fn noised_fit_agrees_with_analytic_attenuation() {
        let p = figure2_params();
        let train = Policy {
            beta: FP_BETA,
            beta0: p.loss_minimizing_intercept(FP_BETA),
        };
        let s = sample_population(&p, train, 1_000_000, 71).unwrap();
        let cal = calibrate_to_target(&p, FP_BETA, 0.590, 1e-9).unwrap();
        let d = noised_dataset(&s, &NoisySpec::new(0.0, cal.sigma_eps_star, 72).unwrap());
        let fit = noised_ols(&d).unwrap();
        assert!(
            (fit.slope - cal.achieved_slope).abs() < 3.0 * fit.slope_std_error,
            "noised slope {} vs analytic {}",
            fit.slope,
            cal.achieved_slope
        );
        // Extension point goes through the same fit.
        let (slope, intercept) = fit_noised(&d, &OlsEstimator).unwrap();
        assert_eq!(slope, fit.slope);
        assert_eq!(intercept, fit.intercept);
    }

    #[test]
    fn csv_export_schema() {
        let p = figure2_params();
        let s = sample_population(
            &p,
            Policy {
                beta: 0.5,
                beta0: 0.0,
            },
            4,
            7,
        )
        .unwrap();
        let d = noised_dataset(&s, &NoisySpec::new(0.1, 0.2, 8).unwrap());
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x_prime,eta\n"));
        assert_eq!(text.lines().count(), 5);
    }
}
