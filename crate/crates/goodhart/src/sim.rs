//! Seeded Monte Carlo verification layer.
//!
//! Draws agent populations from a bivariate normal type distribution, applies
//! the linear response to a policy, fits OLS of the natural action on the
//! observed action, and estimates welfare empirically. Every closed form in
//! [`crate::model`] can be checked against these estimates; the analytic
//! formulas remain the ground truth and the simulation is verification only.
//!
//! Sampling is keyed per row by a counter-based stream, so a population is
//! bit-identical no matter how many threads fill it.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::emit::fmt12;
use crate::error::{Error, Result};
use crate::model::{ModelParams, Policy, WelfareBreakdown};
use crate::rng::NormalStream;

/// A simulated population of `(eta, gamma, x)` rows together with the
/// environment and policy that generated it. `x = eta + m * beta * gamma`
/// holds row-wise exactly by construction.
#[derive(Debug, Clone)]
pub struct AgentSample {
    params: ModelParams,
    policy: Policy,
    seed: u64,
    eta: Vec<f64>,
    gamma: Vec<f64>,
    x: Vec<f64>,
}

impl AgentSample {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn policy(&self) -> Policy {
        self.policy
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Writes the sample as CSV with header `eta,gamma,x`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "eta,gamma,x")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{}",
                fmt12(self.eta[i]),
                fmt12(self.gamma[i]),
                fmt12(self.x[i])
            )?;
        }
        Ok(())
    }
}

/// Draws `n` agents responding to `policy`. Types are bivariate normal with
/// the moments of `params`; correlation enters through the Cholesky factor
/// `[[sigma_eta, 0], [rho sigma_gamma, sigma_gamma sqrt(1 - rho^2)]]` applied
/// to independent standard normals. Deterministic given `seed`, including
/// under parallel fills.
pub fn sample_population(
    params: &ModelParams,
    policy: Policy,
    n: usize,
    seed: u64,
) -> Result<AgentSample> {
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    let stream = NormalStream::new(seed);
    let (mu_e, mu_g) = (params.mu_eta(), params.mu_gamma());
    let (sig_e, sig_g, rho) = (params.sigma_eta(), params.sigma_gamma(), params.rho());
    let rho_comp = (1.0 - rho * rho).sqrt();
    let shift = params.m() * policy.beta;

    let rows: Vec<(f64, f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let (z1, z2) = stream.standard_pair(i);
            let eta = mu_e + sig_e * z1;
            let gamma = mu_g + sig_g * (rho * z1 + rho_comp * z2);
            (eta, gamma, eta + shift * gamma)
        })
        .collect();

    let mut eta = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    for (e, g, a) in rows {
        eta.push(e);
        gamma.push(g);
        x.push(a);
    }
    Ok(AgentSample {
        params: *params,
        policy,
        seed,
        eta,
        gamma,
        x,
    })
}

/// An ordinary least squares fit of one column on another.
///
/// `residual_variance` is the mean squared residual (denominator `n`), which
/// is the empirical information loss in the welfare decomposition.
/// `slope_std_error` uses the classical `n - 2` denominator.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_variance: f64,
    pub n: usize,
    pub slope_std_error: f64,
}

impl OlsFit {
    /// Fitted value at a regressor value.
    pub fn predict(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Least-squares fit of `y` on `x`. Errors when the regressor is degenerate.
pub fn simple_ols(x: &[f64], y: &[f64]) -> Result<OlsFit> {
    let n = x.len();
    assert_eq!(n, y.len(), "regressor and response lengths differ");
    if n < 2 {
        return Err(Error::SampleTooSmall(n));
    }
    let nf = n as f64;
    let mean_x = x.iter().sum::<f64>() / nf;
    let mean_y = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mean_x;
        sxx += dx * dx;
        sxy += dx * (y[i] - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateRegressor);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ssr = 0.0;
    for i in 0..n {
        let r = y[i] - (slope * x[i] + intercept);
        ssr += r * r;
    }
    let slope_std_error = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    Ok(OlsFit {
        slope,
        intercept,
        residual_variance: ssr / nf,
        n,
        slope_std_error,
    })
}

/// OLS of the natural action on the observed action, i.e. the designer's
/// estimation step on data generated by this sample's policy.
pub fn ols_eta_on_x(sample: &AgentSample) -> Result<OlsFit> {
    simple_ols(&sample.x, &sample.eta)
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WelfareEstimate {
    pub mean_sq_loss: f64,
    pub std_error: f64,
    pub n: usize,
}

/// Sample mean and standard error of the squared allocation error of
/// `eval_policy` on this population. The evaluated policy need not be the one
/// that generated the sample.
pub fn empirical_welfare(sample: &AgentSample, eval_policy: Policy) -> WelfareEstimate {
    let n = sample.len() as f64;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for i in 0..sample.len() {
        let err = eval_policy.evaluate(sample.x[i]) - sample.eta[i];
        let sq = err * err;
        sum += sq;
        sumsq += sq * sq;
    }
    let mean = sum / n;
    let var = (sumsq / n - mean * mean).max(0.0);
    WelfareEstimate {
        mean_sq_loss: mean,
        std_error: (var / n).sqrt(),
        n: sample.len(),
    }
}

/// Empirical welfare decomposition against its analytic counterpart.
///
/// Information loss is the residual variance of the in-sample OLS fit;
/// misallocation loss is the mean squared gap between the evaluated policy and
/// the fitted values. In-sample orthogonality makes
/// `info + misallocation = total` exact up to rounding; `identity_gap` records
/// the achieved gap.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub empirical_info_loss: f64,
    pub info_std_error: f64,
    pub empirical_misallocation_loss: f64,
    pub misallocation_std_error: f64,
    pub empirical_total: f64,
    pub total_std_error: f64,
    pub identity_gap: f64,
    pub analytic: WelfareBreakdown,
    pub fit: OlsFit,
}

pub fn decomposition_check(
    sample: &AgentSample,
    eval_policy: Policy,
) -> Result<DecompositionReport> {
    let fit = ols_eta_on_x(sample)?;
    let n = sample.len() as f64;
    let (mut info_sum, mut info_sumsq) = (0.0, 0.0);
    let (mut mis_sum, mut mis_sumsq) = (0.0, 0.0);
    let (mut tot_sum, mut tot_sumsq) = (0.0, 0.0);
    for i in 0..sample.len() {
        let fitted = fit.predict(sample.x[i]);
        let info = (sample.eta[i] - fitted).powi(2);
        let mis = (eval_policy.evaluate(sample.x[i]) - fitted).powi(2);
        let tot = (eval_policy.evaluate(sample.x[i]) - sample.eta[i]).powi(2);
        info_sum += info;
        info_sumsq += info * info;
        mis_sum += mis;
        mis_sumsq += mis * mis;
        tot_sum += tot;
        tot_sumsq += tot * tot;
    }
    let se = |sum: f64, sumsq: f64| {
        let mean = sum / n;
        (((sumsq / n - mean * mean).max(0.0)) / n).sqrt()
    };
    Ok(DecompositionReport {
        empirical_info_loss: info_sum / n,
        info_std_error: se(info_sum, info_sumsq),
        empirical_misallocation_loss: mis_sum / n,
        misallocation_std_error: se(mis_sum, mis_sumsq),
        empirical_total: tot_sum / n,
        total_std_error: se(tot_sum, tot_sumsq),
        identity_gap: (info_sum / n + mis_sum / n - tot_sum / n).abs(),
        analytic: sample.params.welfare_breakdown(eval_policy),
        fit,
    })
}

/// Sample mean of a column.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance (denominator `n`) of a column.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64
}

/// Sample covariance (denominator `n`) of two columns.
pub fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / a.len() as f64
}
