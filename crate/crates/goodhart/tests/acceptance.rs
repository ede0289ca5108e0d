//! End-to-end acceptance suite. Each test prints one PASS/FAIL line
//! (`cargo test -p goodhart --test acceptance -- --nocapture` shows them all)
//! and then asserts, so the suite doubles as a scoreboard.

// Negated float comparisons like `!(x < y)` are NaN-rejecting guards here.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command;
use std::time::Instant;

use goodhart::binary::{
    binary_commitment, binary_fixed_point, binary_naive, enumerate_welfare, BinaryParams,
};
use goodhart::model::{normalized_loss, normalized_loss_derivative, ModelParams, Policy};
use goodhart::noise::{calibrate_to_target, deploy_and_evaluate};
use goodhart::rng::unit_from;
use goodhart::sim::{empirical_welfare, ols_eta_on_x, sample_population, variance};
use goodhart::solve::{constant_policy, fixed_point_betas, fixed_points, optimal_beta};
use goodhart::sweep::{log_grid, rho_zero_fixed_point, rho_zero_optimal};

fn report(criterion: u32, pass: bool, detail: &str) {
    println!(
        "[criterion {criterion}] {}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Deterministic draw stream shared by the property criteria:
/// log-uniform k in [1e-2, 1e2], uniform rho in (-0.99, 0.99).
fn draw_k_rho(i: u64) -> (f64, f64) {
    let k = 10f64.powf(4.0 * unit_from(0xACC5EED, 2 * i) - 2.0);
    let rho = 1.98 * unit_from(0xACC5EED, 2 * i + 1) - 0.99;
    (k, rho)
}

#[test]
fn criterion_1_fixed_point_reproduction() {
    let params = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
    let start = Instant::now();
    let fps = fixed_points(&params);
    let elapsed = start.elapsed();
    let pass = fps.len() == 1 && (fps[0] - 0.682).abs() <= 5e-4 && elapsed.as_millis() < 10;
    report(
        1,
        pass,
        &format!(
            "fixed point {:.6} (target 0.682 +/- 5e-4), {} root(s), {:?}",
            fps[0],
            fps.len(),
            elapsed
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_2_optimum_reproduction() {
    let params = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
    let start = Instant::now();
    let beta_star = optimal_beta(params.k(), params.rho()).unwrap();
    let response = params.best_response_beta(beta_star);
    let elapsed = start.elapsed();
    let pass = (beta_star - 0.590).abs() <= 5e-4
        && (response - 0.74).abs() <= 0.01
        && elapsed.as_millis() < 10;
    report(
        2,
        pass,
        &format!(
            "beta* {beta_star:.6} (target 0.590 +/- 5e-4), best response {response:.6} (target 0.74 +/- 0.01), {elapsed:?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_3_commitment_property_suite() {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut worst_grid_gap: f64 = 0.0;
    for i in 0..1000u64 {
        let (k, rho) = draw_k_rho(i);
        let params = ModelParams::from_k_rho(k, rho).unwrap();
        let beta_star = optimal_beta(k, rho).unwrap();
        if !(beta_star > 0.0) {
            violations += 1;
            continue;
        }
        if fixed_point_betas(k, rho)
            .iter()
            .any(|&fp| fp > 0.0 && beta_star >= fp)
        {
            violations += 1;
        }
        if params.best_response_beta(beta_star) <= beta_star {
            violations += 1;
        }
        let mut best = (f64::INFINITY, 0.0);
        for step in 0..=20_000usize {
            let b = step as f64 * 1e-4;
            let loss = normalized_loss(k, rho, b);
            if loss < best.0 {
                best = (loss, b);
            }
        }
        let gap = (beta_star - best.1).abs();
        worst_grid_gap = worst_grid_gap.max(gap);
        if gap > 2e-4 {
            violations += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = violations == 0 && elapsed.as_secs() < 30;
    report(
        3,
        pass,
        &format!(
            "1000 draws, {violations} violations, worst |beta* - grid argmin| = {worst_grid_gap:.2e}, {elapsed:?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_4_loss_slope_at_fixed_points() {
    let start = Instant::now();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut worst_rel: f64 = 0.0;
    for i in 0..1000u64 {
        let (k, rho) = draw_k_rho(i);
        let params = ModelParams::from_k_rho(k, rho).unwrap();
        for fp in fixed_point_betas(k, rho) {
            checked += 1;
            let closed = params.loss_slope_at_fixed_point(fp).unwrap();
            let direct = normalized_loss_derivative(k, rho, fp);
            let rel = (closed - direct).abs() / closed.abs().max(direct.abs());
            worst_rel = worst_rel.max(rel);
            if !(closed > 0.0) || rel > 1e-8 {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = violations == 0;
    report(
        4,
        pass,
        &format!(
            "{checked} fixed points across 1000 draws, {violations} violations, worst relative route gap {worst_rel:.2e}, {elapsed:?}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_5_comparative_statics_suite() {
    let start = Instant::now();
    let mut failures: Vec<String> = Vec::new();

    // (a) susceptibility limits.
    let at_large_k = optimal_beta(1e3, 0.0).unwrap();
    let at_small_k = optimal_beta(1e-3, 0.0).unwrap();
    if !(at_large_k < 0.02) {
        failures.push(format!("beta*(k=1e3) = {at_large_k} not < 0.02"));
    }
    if !(at_small_k > 0.99) {
        failures.push(format!("beta*(k=1e-3) = {at_small_k} not > 0.99"));
    }

    // (b) rho-independence at k = 3/4.
    for rho in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let beta = optimal_beta(0.75, rho).unwrap();
        if (beta - 2.0 / 3.0).abs() > 1e-9 {
            failures.push(format!("beta*(3/4, {rho}) = {beta} off 2/3 by > 1e-9"));
        }
    }

    // (c) monotone in rho with the sign flipping at k = 3/4.
    let rho_grid: Vec<f64> = (0..13).map(|i| -0.9 + 1.8 * i as f64 / 12.0).collect();
    for &k in &[0.1, 0.3, 0.5, 0.9, 1.5, 5.0, 20.0] {
        let betas: Vec<f64> = rho_grid
            .iter()
            .map(|&r| optimal_beta(k, r).unwrap())
            .collect();
        for w in betas.windows(2) {
            let rising = w[1] > w[0];
            if (k > 0.75) != rising {
                failures.push(format!(
                    "beta* not monotone the right way in rho at k = {k}"
                ));
                break;
            }
        }
    }

    // (d) ratio at rho = 0: strictly decreasing on a 61-point log grid and
    // near the cube-root-of-one-half limit at k = 1e3.
    let grid = log_grid(1e-3, 1e3, 61);
    let ratios: Vec<f64> = grid
        .iter()
        .map(|&k| rho_zero_optimal(k) / rho_zero_fixed_point(k))
        .collect();
    if !ratios.windows(2).all(|w| w[1] < w[0]) {
        failures.push("ratio not strictly decreasing on the 61-point grid".into());
    }
    let limit_gap = (ratios.last().unwrap() - 0.7937).abs();
    if limit_gap > 1e-3 {
        failures.push(format!("ratio at k=1e3 off 0.7937 by {limit_gap:.2e}"));
    }

    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs() < 5;
    report(
        5,
        pass,
        &format!(
            "limits {at_large_k:.4}/{at_small_k:.4}, ratio endpoint gap {limit_gap:.1e}, {} failure(s), {elapsed:?}",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

/// (mu_eta, mu_gamma, sigma_eta, sigma_gamma, rho, m, beta, seed).
type McCase = (f64, f64, f64, f64, f64, f64, f64, u64);

/// Pre-registered Monte Carlo corpus. Seeds were fixed once, up front.
const MC_CASES: [McCase; 20] = [
    (0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.59, 1001),
    (0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.682, 1002),
    (0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1003),
    (1.0, 0.5, 1.0, 1.0, 0.3, 1.0, 0.5, 1004),
    (-2.0, 1.0, 0.5, 2.0, -0.5, 0.5, 0.8, 1005),
    (0.5, -0.5, 2.0, 0.5, 0.7, 2.0, 0.4, 1006),
    (3.0, 2.0, 1.5, 1.5, -0.9, 0.2, 1.2, 1007),
    (0.0, 1.0, 0.7, 1.3, 0.9, 1.5, 0.3, 1008),
    (-1.0, -1.0, 1.2, 0.8, 0.2, 3.0, 0.25, 1009),
    (2.5, 0.0, 0.9, 1.1, -0.3, 1.0, 0.7, 1010),
    (0.0, 0.0, 1.0, 2.0, 0.5, 0.8, 0.45, 1011),
    (1.5, -2.0, 1.8, 0.6, -0.7, 1.2, 0.9, 1012),
    (0.0, 0.0, 0.5, 0.5, 0.0, 5.0, 0.15, 1013),
    (-0.5, 0.5, 1.0, 1.0, 0.4, 0.1, 1.1, 1014),
    (4.0, 1.0, 2.5, 1.0, 0.6, 0.9, 0.6, 1015),
    (0.0, -3.0, 1.1, 1.4, -0.2, 1.8, 0.35, 1016),
    (1.0, 1.0, 0.8, 0.8, 0.8, 1.0, 0.55, 1017),
    (-3.0, 0.0, 1.3, 1.7, -0.6, 0.7, 0.95, 1018),
    (0.2, 0.2, 1.0, 1.0, 0.1, 1.1, 0.0, 1019),
    (0.0, 0.5, 2.2, 0.4, -0.4, 2.5, 0.5, 1020),
];

#[test]
fn criterion_6_monte_carlo_concordance() {
    let start = Instant::now();
    let n = 1_000_000usize;
    let mut failures: Vec<String> = Vec::new();
    for &(mu_e, mu_g, sig_e, sig_g, rho, m, beta, seed) in &MC_CASES {
        let params = ModelParams::new(mu_e, mu_g, sig_e, sig_g, rho, m).unwrap();
        let policy = Policy {
            beta,
            beta0: params.loss_minimizing_intercept(beta),
        };
        let sample = sample_population(&params, policy, n, seed).unwrap();
        let tag = format!("seed {seed}");

        let fit = ols_eta_on_x(&sample).unwrap();
        let slope_gap = (fit.slope - params.best_response_beta(beta)).abs();
        if slope_gap > 3.0 * fit.slope_std_error {
            failures.push(format!("{tag}: slope gap {slope_gap:.2e} > 3 se"));
        }

        let analytic_var = params.action_moments(beta).var_x;
        let var_se = analytic_var * (2.0 / n as f64).sqrt();
        let var_gap = (variance(sample.x()) - analytic_var).abs();
        if var_gap > 3.0 * var_se {
            failures.push(format!("{tag}: var(x) gap {var_gap:.2e} > 3 se"));
        }

        let welfare = empirical_welfare(&sample, policy);
        let welfare_gap = (welfare.mean_sq_loss - params.welfare_loss(policy)).abs();
        if welfare_gap > 3.0 * welfare.std_error {
            failures.push(format!("{tag}: welfare gap {welfare_gap:.2e} > 3 se"));
        }

        let decomp = goodhart::sim::decomposition_check(&sample, policy).unwrap();
        if decomp.identity_gap > 3.0 * decomp.total_std_error {
            failures.push(format!(
                "{tag}: identity gap {:.2e} > 3 se",
                decomp.identity_gap
            ));
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs() < 60;
    report(
        6,
        pass,
        &format!(
            "20 pre-seeded cases at n = 1e6, {} failure(s), {elapsed:?}",
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

#[test]
fn criterion_7_noise_pipeline() {
    let start = Instant::now();
    let params = ModelParams::new(0.0, 0.0, 1.0, 1.0, 0.0, 1.0).unwrap();
    let n = 1_000_000usize;
    let seed = 2024u64;
    let mut failures: Vec<String> = Vec::new();

    let cal = calibrate_to_target(&params, 0.682, 0.590, 1e-9).unwrap();
    let slope_gap = (cal.achieved_slope - 0.590).abs();
    if slope_gap > 1e-10 {
        failures.push(format!("achieved slope off target by {slope_gap:.2e}"));
    }

    let deployment = deploy_and_evaluate(&params, &cal, n, seed).unwrap();
    let optimal = goodhart::optimal_policy(&params).unwrap();
    let loss_gap = (deployment.empirical_loss - params.welfare_loss(optimal)).abs();
    if loss_gap > 3.0 * deployment.loss_std_error {
        failures.push(format!(
            "deployed loss off optimum by {loss_gap:.2e} > 3 se"
        ));
    }

    // Paired-seed comparison against deploying the fixed point itself.
    let fp = fixed_points(&params)[0];
    let fp_policy = Policy {
        beta: fp,
        beta0: params.loss_minimizing_intercept(fp),
    };
    let fp_sample = sample_population(&params, fp_policy, n, seed).unwrap();
    let fp_loss = empirical_welfare(&fp_sample, fp_policy).mean_sq_loss;
    if !(deployment.empirical_loss < fp_loss) {
        failures.push(format!(
            "deployed loss {} not below fixed-point loss {fp_loss}",
            deployment.empirical_loss
        ));
    }

    let centering_gap = (deployment.mean_allocation - params.mu_eta()).abs();
    if centering_gap > 3.0 * deployment.mean_allocation_std_error {
        failures.push(format!(
            "mean allocation off center by {centering_gap:.2e} > 3 se"
        ));
    }

    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed.as_secs() < 30;
    report(
        7,
        pass,
        &format!(
            "achieved-slope gap {slope_gap:.1e}, deployed loss {:.6} vs fixed point {fp_loss:.6}, {} failure(s), {elapsed:?}",
            deployment.empirical_loss,
            failures.len()
        ),
    );
    assert!(pass, "{failures:?}");
}

#[test]
fn criterion_8_binary_model() {
    let start = Instant::now();
    let mut failures = 0usize;
    for i in 0..100u64 {
        let pi = 0.01 + 0.98 * unit_from(0xB17E, 2 * i);
        let cost = pi * (0.02 + 0.96 * unit_from(0xB17E, 2 * i + 1));
        let params = BinaryParams::new(pi, cost).unwrap();
        let (naive_p, naive_w) = binary_naive(&params);
        let (fp_p, fp_w) = binary_fixed_point(&params);
        let (com_p, com_w) = binary_commitment(&params);

        // Closed forms, exactly.
        if naive_w != -(1.0 - pi)
            || fp_w != -pi * (1.0 - pi)
            || com_w != -(1.0 - cost) * (1.0 - cost) * (1.0 - pi) * pi
        {
            failures += 1;
        }
        // Orderings.
        if !(com_p.delta() < fp_p.delta() && fp_p.delta() < naive_p.delta()) {
            failures += 1;
        }
        if !(naive_w < fp_w && fp_w < com_w && com_w < 0.0) {
            failures += 1;
        }
        // Enumeration oracle, to double precision.
        for (policy, closed) in [(naive_p, naive_w), (fp_p, fp_w), (com_p, com_w)] {
            let enumerated = enumerate_welfare(&params, &policy);
            if (enumerated - closed).abs() > 16.0 * f64::EPSILON * closed.abs() {
                failures += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures == 0 && elapsed.as_millis() < 1000;
    report(
        8,
        pass,
        &format!("100 random (pi, c) draws, {failures} failure(s), {elapsed:?}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_commitment_gain_magnitude() {
    // Thresholds (0.9 / 0.1) and the parameter point are artifact choices
    // operationalizing "arbitrarily close". At this exact point the first
    // inequality does not hold for any actual fixed point of the best
    // response; see the most favorable (max-loss) reading computed here.
    // The regime does deliver it slightly closer to the corner (for example
    // rho = -0.999), which the comparative-statics tests cover.
    let start = Instant::now();
    let params = ModelParams::from_k_rho(0.2501, -0.99).unwrap();
    let constant_loss = params.welfare_loss(constant_policy(&params));
    let worst_fp_loss = fixed_points(&params)
        .into_iter()
        .map(|fp| {
            params.welfare_loss(Policy {
                beta: fp,
                beta0: params.loss_minimizing_intercept(fp),
            })
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let optimal_loss = params.welfare_loss(goodhart::optimal_policy(&params).unwrap());
    let fp_ratio = worst_fp_loss / constant_loss;
    let opt_ratio = optimal_loss / constant_loss;
    let elapsed = start.elapsed();
    let pass = fp_ratio > 0.9 && opt_ratio < 0.1 && elapsed.as_millis() < 1000;
    report(
        9,
        pass,
        &format!(
            "loss(fp)/loss(constant) = {fp_ratio:.4} (need > 0.9), loss(optimal)/loss(constant) = {opt_ratio:.5} (need < 0.1), {elapsed:?}"
        ),
    );
    assert!(
        pass,
        "fp ratio {fp_ratio:.4} <= 0.9 at k = 0.2501, rho = -0.99: the pinned parameter \
         point cannot satisfy the first inequality (fixed points {:?} have normalized \
         losses well below 0.9; rho closer to -1, e.g. -0.999, is needed)",
        fixed_points(&params)
    );
}

#[test]
fn criterion_10_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_goodhart");
    let dir = tempfile::tempdir().unwrap();
    let mut all_equal = true;
    let mut checked = 0;

    // simulate exercises the parallel sampler; sweep exercises parallel rows.
    let runs: [(&str, Vec<String>); 2] = [
        (
            "simulate",
            vec![
                "simulate".into(),
                "--k".into(),
                "1".into(),
                "--rho".into(),
                "0".into(),
                "--beta".into(),
                "0.59".into(),
                "--n".into(),
                "200000".into(),
                "--seed".into(),
                "7".into(),
                "--format".into(),
                "csv".into(),
            ],
        ),
        (
            "sweep",
            vec![
                "sweep".into(),
                "--k-min".into(),
                "0.01".into(),
                "--k-max".into(),
                "100".into(),
                "--k-steps".into(),
                "31".into(),
                "--rho-min".into(),
                "-0.9".into(),
                "--rho-max".into(),
                "0.9".into(),
                "--rho-steps".into(),
                "5".into(),
            ],
        ),
    ];
    for (name, args) in &runs {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let path = dir.path().join(format!("{name}_{run}.out"));
            let status = Command::new(bin)
                .args(args)
                .arg("--out")
                .arg(&path)
                .status()
                .expect("binary runs");
            assert!(status.success(), "{name} run {run} failed");
            outputs.push(std::fs::read(&path).unwrap());
        }
        checked += 1;
        if outputs[0] != outputs[1] {
            all_equal = false;
        }
    }
    report(
        10,
        all_equal,
        &format!("{checked} command pairs byte-identical: {all_equal}"),
    );
    assert!(all_equal);
}
