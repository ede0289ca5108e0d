//! How the commitment optimum moves with the environment.
//!
//! Sweeps the susceptibility statistic k (more stakes, more spread in gaming
//! ability, less spread in natural actions) and the type correlation rho:
//!
//! * beta* falls from 1 to 0 as k grows — when rho >= 0, monotonically;
//!   with rho < 0 it first rises above 1 before falling (single peak);
//! * raising rho pushes beta* up when k > 3/4 and down when k < 3/4, and at
//!   k = 3/4 exactly, beta* = 2/3 regardless of rho;
//! * at rho = 0 the optimum-to-fixed-point ratio drifts down from 1 toward
//!   (1/2)^(1/3) ~ 0.794.
//!
//! ```bash
//! cargo run -p goodhart --example comparative_statics
//! ```

use goodhart::sweep::{
    check_prop2_signs, log_grid, rho_zero_fixed_point, rho_zero_optimal, run_sweep, SweepOutputs,
    SweepSpec,
};

fn main() {
    println!("beta* across k, by rho:\n");
    let k_grid = log_grid(0.05, 20.0, 9);
    print!("{:>10}", "k");
    for rho in [-0.8, 0.0, 0.8] {
        print!("{:>16}", format!("beta*(rho={rho})"));
    }
    println!();
    let spec = SweepSpec::new(
        k_grid.clone(),
        vec![-0.8, 0.0, 0.8],
        SweepOutputs::default(),
    )
    .unwrap();
    let rows = run_sweep(&spec);
    for (i, k) in k_grid.iter().enumerate() {
        print!("{k:>10.4}");
        for j in 0..3 {
            print!("{:>16.4}", rows[j * k_grid.len() + i].beta_star.unwrap());
        }
        println!();
    }
    println!("\n(note the hump at rho = -0.8: more manipulable is not always flatter)");

    println!("\nindependence at k = 3/4:");
    for rho in [-0.9, 0.0, 0.9] {
        let spec = SweepSpec::new(vec![0.75], vec![rho], SweepOutputs::default()).unwrap();
        let b = run_sweep(&spec)[0].beta_star.unwrap();
        println!("  rho = {rho:>5}: beta* = {b:.12}");
    }

    println!("\noptimum-to-fixed-point ratio at rho = 0:");
    for k in [0.001, 0.1, 1.0, 10.0, 1000.0] {
        let ratio = rho_zero_optimal(k) / rho_zero_fixed_point(k);
        println!("  k = {k:>8}: beta*/beta_fp = {ratio:.6}");
    }
    println!("  limit as k grows: {:.6}", 0.5f64.cbrt());

    let report = check_prop2_signs(&log_grid(0.05, 5.0, 61), &[-0.8, -0.4, 0.0, 0.4, 0.8]);
    println!(
        "\nsign checks on a {}-cell grid: {}",
        report.cells_checked,
        if report.passed() {
            "all hold"
        } else {
            "violations found"
        }
    );
    for v in &report.violations {
        println!("  k = {}, rho = {}: {}", v.k, v.rho, v.description);
    }
}
