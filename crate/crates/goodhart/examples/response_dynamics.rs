//! Best-response dynamics: a designer who repeatedly refits to the data her
//! own rule provokes.
//!
//! Starting from the naive slope 1, each refit overshoots the eventual rest
//! point from alternating sides and settles on the fixed point — which is
//! ex-post optimal but strictly worse than the commitment optimum. With a
//! steep enough response (large k) there is no rest point at all: the refit
//! loop locks into a two-cycle.
//!
//! ```bash
//! cargo run -p goodhart --example response_dynamics
//! ```

use goodhart::{iterate_best_response, solve_all, DynamicsStatus, ModelParams};

fn main() {
    let params = ModelParams::from_k_rho(1.0, 0.0).unwrap();
    let trace = iterate_best_response(&params, 1.0, 100, 1e-10);

    println!("refitting loop at k = 1, rho = 0, starting from the naive slope:\n");
    println!("{:>6}{:>14}", "round", "slope");
    for &(i, b) in trace.steps.iter().take(12) {
        println!("{i:>6}{b:>14.8}");
    }
    if trace.steps.len() > 12 {
        println!("{:>6}{:>14}", "...", "...");
        let &(i, b) = trace.steps.last().unwrap();
        println!("{i:>6}{b:>14.8}");
    }
    println!(
        "status: {:?} after {} rounds",
        trace.status,
        trace.steps.len() - 1
    );

    let sol = solve_all(&params).unwrap();
    println!(
        "\nterminal slope {:.6} = fixed point; commitment would stop lower, at {:.6}",
        trace.terminal_beta(),
        sol.optimal.beta
    );
    println!(
        "loss at the fixed point {:.6} vs {:.6} under commitment",
        sol.fixed_points[0].loss, sol.optimal_loss
    );

    // Crank up the stakes until the refit loop stops settling.
    let twitchy = ModelParams::from_k_rho(100.0, 0.0).unwrap();
    let trace = iterate_best_response(&twitchy, 1.0, 10_000, 1e-12);
    assert_eq!(trace.status, DynamicsStatus::Cycling);
    let tail: Vec<f64> = trace.steps.iter().rev().take(4).map(|&(_, b)| b).collect();
    println!(
        "\nat k = 100 the loop never settles: it alternates between ~{:.5} and ~{:.5}",
        tail[0], tail[1]
    );
    println!("(the lone fixed point is repelling; refitting forever is not a strategy)");
}
