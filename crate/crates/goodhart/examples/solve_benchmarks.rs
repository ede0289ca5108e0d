//! Solve every benchmark policy for the canonical environment
//! (unit variances, zero means, m = 1, rho = 0) and show why commitment
//! flattens the rule.
//!
//! ```bash
//! cargo run -p goodhart --example solve_benchmarks
//! ```

use goodhart::{solve_all, ModelParams};

fn main() {
    let params = ModelParams::from_k_rho(1.0, 0.0).unwrap();
    let sol = solve_all(&params).unwrap();

    println!("environment: k = {}, rho = {}\n", params.k(), params.rho());
    println!("{:<22}{:>10}{:>12}", "policy", "beta", "loss");
    println!(
        "{:<22}{:>10.4}{:>12.6}",
        "naive (pre-gaming fit)", sol.naive.beta, sol.naive_loss
    );
    println!(
        "{:<22}{:>10.4}{:>12.6}",
        "constant (ignore data)", sol.constant.beta, sol.constant_loss
    );
    for fp in &sol.fixed_points {
        println!(
            "{:<22}{:>10.4}{:>12.6}   loss slope here: {:+.4}",
            "fixed point", fp.policy.beta, fp.loss, fp.loss_slope
        );
    }
    println!(
        "{:<22}{:>10.4}{:>12.6}",
        "commitment optimum", sol.optimal.beta, sol.optimal_loss
    );

    let d = &sol.diagnostics;
    println!();
    println!(
        "after committing to beta = {:.4}, the ex-post best response would be {:.4}:",
        sol.optimal.beta, d.best_response_at_optimal
    );
    println!(
        "the designer deliberately underutilizes the data (gap {:+.4}).",
        d.best_response_at_optimal - sol.optimal.beta
    );
    println!(
        "optimal slope below every positive fixed point: {}",
        d.optimal_below_positive_fixed_points
    );

    let gain = sol.fixed_points[0].loss - sol.optimal_loss;
    println!(
        "\ncommitment beats the fixed point by {:.4} ({:.1}% of the fixed-point loss).",
        gain,
        100.0 * gain / sol.fixed_points[0].loss
    );
}
