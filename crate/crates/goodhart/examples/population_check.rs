//! Monte Carlo verification of the closed forms on one simulated population.
//!
//! Draws a million agents responding to a slope, then compares: the OLS fit
//! of natural action on observed action against the analytic best response,
//! sample moments against analytic moments, and the realized welfare split
//! against the analytic information/misallocation decomposition.
//!
//! ```bash
//! cargo run -p goodhart --example population_check
//! ```

use goodhart::sim::{decomposition_check, ols_eta_on_x, sample_population, variance};
use goodhart::{ModelParams, Policy};

fn main() {
    let params = ModelParams::new(0.5, 1.0, 1.0, 1.2, 0.3, 0.8).unwrap();
    let beta = 0.65;
    let policy = Policy {
        beta,
        beta0: params.loss_minimizing_intercept(beta),
    };
    let n = 1_000_000;
    let sample = sample_population(&params, policy, n, 20240817).unwrap();

    println!("population of {n} agents responding to beta = {beta}\n");

    let fit = ols_eta_on_x(&sample).unwrap();
    println!("{:<34}{:>12}{:>12}", "", "empirical", "analytic");
    println!(
        "{:<34}{:>12.6}{:>12.6}   (+/- {:.6})",
        "OLS slope of eta on x",
        fit.slope,
        params.best_response_beta(beta),
        fit.slope_std_error
    );
    println!(
        "{:<34}{:>12.6}{:>12.6}",
        "OLS intercept",
        fit.intercept,
        params.best_response_intercept(beta)
    );
    println!(
        "{:<34}{:>12.6}{:>12.6}",
        "var(x)",
        variance(sample.x()),
        params.action_moments(beta).var_x
    );

    let report = decomposition_check(&sample, policy).unwrap();
    println!(
        "{:<34}{:>12.6}{:>12.6}",
        "information loss", report.empirical_info_loss, report.analytic.info_loss
    );
    println!(
        "{:<34}{:>12.6}{:>12.6}",
        "misallocation loss",
        report.empirical_misallocation_loss,
        report.analytic.misallocation_loss
    );
    println!(
        "{:<34}{:>12.6}{:>12.6}",
        "total welfare loss", report.empirical_total, report.analytic.total
    );
    println!(
        "\nin-sample identity info + misallocation = total holds to {:.2e}",
        report.identity_gap
    );
    println!("(the sample was generated at the loss-minimizing intercept, so");
    println!(" misallocation reflects only the slope gap to the best response)");
}
