//! Command-line surface: configuration parsing and emission of
//! machine-readable results and figure data.
//!
//! Subcommands: `solve`, `figure`, `sweep`, `simulate`, `noise`, `binary`.
//! Common flags: `--out`, `--format {csv,json}`, `--seed`, `--config`.
//!
//! Environments are given either as full moments
//! (`--sigma-eta --sigma-gamma --m --rho [--mu-eta --mu-gamma]`) or as the
//! `(k, rho)` shorthand (`--k --rho`), never both. Slope-level results depend
//! on the primitives only through `(k, rho)`; intercepts also need the means,
//! so shorthand runs report slope quantities only.
//!
//! A config file (`--config path`) holds flat `key = value` lines mirroring
//! the long flags; explicit flags override file entries. Outputs are
//! byte-stable across runs for fixed inputs, including under internal
//! parallelism.
//!
//! Exit codes: 0 success, 2 usage, 3 validation, 4 internal invariant
//! violation, 1 on I/O failures.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::binary::{binary_report, BinaryParams, BinaryReport};
use crate::emit::fmt12;
use crate::error::Error;
use crate::model::{ActionMoments, ModelParams, Policy};
use crate::noise::{
    calibrate_to_target, deploy_and_evaluate, noised_dataset, CalibrationResult, DeploymentEval,
    NoisySpec,
};
use crate::sim::{
    covariance, empirical_welfare, mean, ols_eta_on_x, sample_population, variance, OlsFit,
    WelfareEstimate,
};
use crate::solve::{solve_all, PolicySolution};
use crate::sweep::{linear_grid, log_grid, run_sweep, SweepOutputs, SweepRow, SweepSpec};

#[derive(Parser)]
#[command(
    name = "goodhart",
    version,
    about = "Linear allocation rules on manipulable data: naive, fixed-point, and commitment-optimal benchmarks with Monte Carlo verification"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve all benchmark policies for one environment.
    Solve(SolveArgs),
    /// Emit best-response or loss-decomposition curve data over a slope grid.
    Figure(FigureArgs),
    /// Sweep optimal and fixed-point slopes over a (k, rho) grid.
    Sweep(SweepArgs),
    /// Draw a population, fit OLS, and compare against the closed forms.
    Simulate(SimulateArgs),
    /// Calibrate training noise to a target slope and evaluate deployment.
    Noise(NoiseArgs),
    /// Solve the binary-action model.
    Binary(BinaryArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format for machine-readable emission.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for any randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key = value file mirroring the long flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ParamOpts {
    /// Susceptibility shorthand k = m*sigma_gamma/sigma_eta (unit sigmas, zero means).
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Correlation of natural action and gaming ability, in (-1, 1). Default 0.
    #[arg(long, allow_negative_numbers = true)]
    rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu_eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu_gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma_eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sigma_gamma: Option<f64>,
    /// Stakes / manipulability scale.
    #[arg(long, allow_negative_numbers = true)]
    m: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Copy, Clone, ValueEnum)]
enum FigureKind {
    /// Best-response slope against the 45-degree line.
    Fig1,
    /// Welfare loss decomposition at the centered intercept.
    Fig2,
}

#[derive(Args)]
struct FigureArgs {
    /// Which curve family to emit.
    #[arg(value_enum)]
    which: FigureKind,
    #[arg(long, allow_negative_numbers = true)]
    beta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta_max: Option<f64>,
    /// Number of grid points (>= 2).
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    params: ParamOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Copy, Clone, ValueEnum)]
enum GridScale {
    Lin,
    Log,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    k_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_max: Option<f64>,
    #[arg(long)]
    k_steps: Option<usize>,
    /// Spacing of the k grid; log by default.
    #[arg(long, value_enum)]
    k_scale: Option<GridScale>,
    #[arg(long, allow_negative_numbers = true)]
    rho_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rho_max: Option<f64>,
    #[arg(long)]
    rho_steps: Option<usize>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct SimulateArgs {
    /// Population size.
    #[arg(long)]
    n: Option<usize>,
    /// Slope agents respond to.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Intercept; centered intercept for the slope when omitted.
    #[arg(long, allow_negative_numbers = true)]
    beta0: Option<f64>,
    #[command(flatten)]
    params: ParamOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct NoiseArgs {
    /// Slope the training population responded to.
    #[arg(long, allow_negative_numbers = true)]
    train_beta: Option<f64>,
    /// Target slope for the deployed rule.
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    /// Rows in the training and deployment populations.
    #[arg(long)]
    n: Option<usize>,
    /// Allowed gap between achieved and target slope.
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    #[command(flatten)]
    params: ParamOpts,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Args)]
struct BinaryArgs {
    /// Prior probability of the high type.
    #[arg(long, allow_negative_numbers = true)]
    pi: Option<f64>,
    /// Manipulation cost of the low type.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[command(flatten)]
    common: CommonOpts,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// CLI-level failures carrying their exit code class.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::SolverFailure(_) => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(format!("serialization failed: {e}"))
    }
}

/// Parses the process arguments and runs the selected subcommand, returning
/// the process exit code. Usage errors exit through clap with code 2.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Solve(args) => cmd_solve(args),
        Command::Figure(args) => cmd_figure(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Noise(args) => cmd_noise(args),
        Command::Binary(args) => cmd_binary(args),
    }
}

// ---------------------------------------------------------------------------
// Config file handling
// ---------------------------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "k",
    "rho",
    "mu-eta",
    "mu-gamma",
    "sigma-eta",
    "sigma-gamma",
    "m",
    "out",
    "format",
    "seed",
    "beta-min",
    "beta-max",
    "steps",
    "k-min",
    "k-max",
    "k-steps",
    "k-scale",
    "rho-min",
    "rho-max",
    "rho-steps",
    "n",
    "beta",
    "beta0",
    "train-beta",
    "target",
    "tol",
    "pi",
    "c",
];

/// Flat `key = value` store loaded from a config file. Lookups fall back to
/// it only when the corresponding flag was not given.
struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    CliError::Validation(format!(
                        "config line {} is not `key = value`: {raw:?}",
                        lineno + 1
                    ))
                })?;
                let key = key.trim().to_string();
                if !KNOWN_KEYS.contains(&key.as_str()) {
                    return Err(CliError::Validation(format!(
                        "unknown config key {key:?} on line {}",
                        lineno + 1
                    )));
                }
                values.insert(key, value.trim().to_string());
            }
        }
        Ok(ConfigMap { values })
    }

    fn get<T: std::str::FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Validation(format!("config key {key:?} has unparsable value {raw:?}"))
            }),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.get(key, flag)?
            .ok_or_else(|| CliError::Validation(format!("missing required option --{key}")))
    }
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum ParamMode {
    Moments,
    Shorthand,
}

fn resolve_params(opts: &ParamOpts, cfg: &ConfigMap) -> Result<(ModelParams, ParamMode), CliError> {
    let k = cfg.get("k", opts.k)?;
    let rho = cfg.get("rho", opts.rho)?.unwrap_or(0.0);
    let mu_eta = cfg.get("mu-eta", opts.mu_eta)?;
    let mu_gamma = cfg.get("mu-gamma", opts.mu_gamma)?;
    let sigma_eta = cfg.get("sigma-eta", opts.sigma_eta)?;
    let sigma_gamma = cfg.get("sigma-gamma", opts.sigma_gamma)?;
    let m = cfg.get("m", opts.m)?;

    match k {
        Some(k) => {
            if mu_eta.is_some()
                || mu_gamma.is_some()
                || sigma_eta.is_some()
                || sigma_gamma.is_some()
                || m.is_some()
            {
                return Err(CliError::Validation(
                    "--k is a complete parameterization; do not combine it with moment flags"
                        .into(),
                ));
            }
            Ok((ModelParams::from_k_rho(k, rho)?, ParamMode::Shorthand))
        }
        None => {
            let sigma_eta = sigma_eta
                .ok_or_else(|| CliError::Validation("missing --sigma-eta (or --k)".into()))?;
            let sigma_gamma = sigma_gamma
                .ok_or_else(|| CliError::Validation("missing --sigma-gamma (or --k)".into()))?;
            let m = m.ok_or_else(|| CliError::Validation("missing --m (or --k)".into()))?;
            let params = ModelParams::new(
                mu_eta.unwrap_or(0.0),
                mu_gamma.unwrap_or(0.0),
                sigma_eta,
                sigma_gamma,
                rho,
                m,
            )?;
            Ok((params, ParamMode::Moments))
        }
    }
}

fn resolve_format(
    common: &CommonOpts,
    cfg: &ConfigMap,
    default: OutputFormat,
) -> Result<OutputFormat, CliError> {
    if let Some(f) = common.format {
        return Ok(f);
    }
    match cfg.values.get("format").map(String::as_str) {
        None => Ok(default),
        Some("csv") => Ok(OutputFormat::Csv),
        Some("json") => Ok(OutputFormat::Json),
        Some(other) => Err(CliError::Validation(format!(
            "config key \"format\" must be csv or json, got {other:?}"
        ))),
    }
}

fn resolve_out(common: &CommonOpts, cfg: &ConfigMap) -> Result<Option<PathBuf>, CliError> {
    if common.out.is_some() {
        return Ok(common.out.clone());
    }
    Ok(cfg.values.get("out").map(PathBuf::from))
}

fn write_text(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn with_writer(
    out: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(path)?);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn json_string<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FixedPointOut {
    beta: f64,
    beta0: Option<f64>,
    loss: f64,
    loss_slope: f64,
}

/// Machine-readable solve output. Shorthand runs omit intercepts: they need
/// the type means, which the shorthand does not carry.
#[derive(Serialize)]
struct SolveOutput {
    parameterization: &'static str,
    k: f64,
    rho: f64,
    params: Option<ModelParams>,
    naive_beta: f64,
    naive_beta0: Option<f64>,
    naive_loss: f64,
    constant_beta: f64,
    constant_beta0: Option<f64>,
    constant_loss: f64,
    fixed_points: Vec<FixedPointOut>,
    optimal_beta: f64,
    optimal_beta0: Option<f64>,
    optimal_loss: f64,
    best_response_at_optimal: f64,
    loss_second_derivative_at_optimal: f64,
    optimal_below_positive_fixed_points: bool,
    best_response_exceeds_optimal: bool,
}

fn solve_output(params: &ModelParams, mode: ParamMode, sol: &PolicySolution) -> SolveOutput {
    let keep = |v: f64| match mode {
        ParamMode::Moments => Some(v),
        ParamMode::Shorthand => None,
    };
    SolveOutput {
        parameterization: match mode {
            ParamMode::Moments => "moments",
            ParamMode::Shorthand => "k-rho",
        },
        k: params.k(),
        rho: params.rho(),
        params: match mode {
            ParamMode::Moments => Some(*params),
            ParamMode::Shorthand => None,
        },
        naive_beta: sol.naive.beta,
        naive_beta0: keep(sol.naive.beta0),
        naive_loss: sol.naive_loss,
        constant_beta: sol.constant.beta,
        constant_beta0: keep(sol.constant.beta0),
        constant_loss: sol.constant_loss,
        fixed_points: sol
            .fixed_points
            .iter()
            .map(|fp| FixedPointOut {
                beta: fp.policy.beta,
                beta0: keep(fp.policy.beta0),
                loss: fp.loss,
                loss_slope: fp.loss_slope,
            })
            .collect(),
        optimal_beta: sol.optimal.beta,
        optimal_beta0: keep(sol.optimal.beta0),
        optimal_loss: sol.optimal_loss,
        best_response_at_optimal: sol.diagnostics.best_response_at_optimal,
        loss_second_derivative_at_optimal: sol.diagnostics.loss_second_derivative_at_optimal,
        optimal_below_positive_fixed_points: sol.diagnostics.optimal_below_positive_fixed_points,
        best_response_exceeds_optimal: sol.diagnostics.best_response_exceeds_optimal,
    }
}

fn solve_csv(out: &SolveOutput) -> String {
    let beta0_field = |b0: Option<f64>| b0.map(fmt12).unwrap_or_default();
    let mut text = String::from("policy,beta,beta0,loss,loss_slope\n");
    text.push_str(&format!(
        "naive,{},{},{},\n",
        fmt12(out.naive_beta),
        beta0_field(out.naive_beta0),
        fmt12(out.naive_loss)
    ));
    text.push_str(&format!(
        "constant,{},{},{},\n",
        fmt12(out.constant_beta),
        beta0_field(out.constant_beta0),
        fmt12(out.constant_loss)
    ));
    for fp in &out.fixed_points {
        text.push_str(&format!(
            "fixed_point,{},{},{},{}\n",
            fmt12(fp.beta),
            beta0_field(fp.beta0),
            fmt12(fp.loss),
            fmt12(fp.loss_slope)
        ));
    }
    text.push_str(&format!(
        "optimal,{},{},{},\n",
        fmt12(out.optimal_beta),
        beta0_field(out.optimal_beta0),
        fmt12(out.optimal_loss)
    ));
    text
}

fn print_solve_table(out: &SolveOutput) {
    println!("environment: k = {:.6}, rho = {:.6}", out.k, out.rho);
    if let Some(p) = &out.params {
        println!(
            "             mu_eta = {:.6}, mu_gamma = {:.6}, sigma_eta = {:.6}, sigma_gamma = {:.6}, m = {:.6}",
            p.mu_eta(),
            p.mu_gamma(),
            p.sigma_eta(),
            p.sigma_gamma(),
            p.m()
        );
    }
    let beta0 = |v: Option<f64>| v.map_or_else(|| format!("{:>12}", "-"), |b| format!("{b:>12.6}"));
    println!(
        "{:<14}{:>12}{:>12}{:>14}",
        "policy", "beta", "beta0", "loss"
    );
    println!(
        "{:<14}{:>12.6}{}{:>14.6}",
        "naive",
        out.naive_beta,
        beta0(out.naive_beta0),
        out.naive_loss
    );
    println!(
        "{:<14}{:>12.6}{}{:>14.6}",
        "constant",
        out.constant_beta,
        beta0(out.constant_beta0),
        out.constant_loss
    );
    for fp in &out.fixed_points {
        println!(
            "{:<14}{:>12.6}{}{:>14.6}   (loss slope {:+.6})",
            "fixed point",
            fp.beta,
            beta0(fp.beta0),
            fp.loss,
            fp.loss_slope
        );
    }
    println!(
        "{:<14}{:>12.6}{}{:>14.6}",
        "optimal",
        out.optimal_beta,
        beta0(out.optimal_beta0),
        out.optimal_loss
    );
    println!(
        "best response to optimal slope: {:.6} (exceeds it: {})",
        out.best_response_at_optimal, out.best_response_exceeds_optimal
    );
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let (params, mode) = resolve_params(&args.params, &cfg)?;
    let sol = solve_all(&params)?;
    let output = solve_output(&params, mode, &sol);
    print_solve_table(&output);
    if let Some(path) = resolve_out(&args.common, &cfg)? {
        let content = match resolve_format(&args.common, &cfg, OutputFormat::Json)? {
            OutputFormat::Json => json_string(&output)?,
            OutputFormat::Csv => solve_csv(&output),
        };
        write_text(Some(&path), &content)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// figure
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct Fig1Row {
    beta: f64,
    beta_hat: f64,
    diagonal: f64,
}

#[derive(Serialize)]
struct Fig2Row {
    beta: f64,
    info_loss: f64,
    misallocation_loss: f64,
    total: f64,
}

fn cmd_figure(args: FigureArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let (params, _) = resolve_params(&args.params, &cfg)?;
    let (default_max, default_steps) = match args.which {
        FigureKind::Fig1 => (1.5, 301),
        FigureKind::Fig2 => (1.0, 201),
    };
    let beta_min = cfg.get("beta-min", args.beta_min)?.unwrap_or(0.0);
    let beta_max = cfg.get("beta-max", args.beta_max)?.unwrap_or(default_max);
    let steps = cfg.get("steps", args.steps)?.unwrap_or(default_steps);
    if !(beta_max > beta_min) || steps < 2 {
        return Err(CliError::Validation(format!(
            "need beta-max > beta-min and steps >= 2, got [{beta_min}, {beta_max}] with {steps}"
        )));
    }
    let grid = linear_grid(beta_min, beta_max, steps);
    let format = resolve_format(&args.common, &cfg, OutputFormat::Csv)?;
    let out = resolve_out(&args.common, &cfg)?;

    let content = match (args.which, format) {
        (FigureKind::Fig1, OutputFormat::Csv) => {
            let mut text = String::from("beta,beta_hat,diagonal\n");
            for &b in &grid {
                text.push_str(&format!(
                    "{},{},{}\n",
                    fmt12(b),
                    fmt12(params.best_response_beta(b)),
                    fmt12(b)
                ));
            }
            text
        }
        (FigureKind::Fig1, OutputFormat::Json) => {
            let rows: Vec<Fig1Row> = grid
                .iter()
                .map(|&b| Fig1Row {
                    beta: b,
                    beta_hat: params.best_response_beta(b),
                    diagonal: b,
                })
                .collect();
            json_string(&rows)?
        }
        (FigureKind::Fig2, OutputFormat::Csv) => {
            let mut text = String::from("beta,info_loss,misallocation_loss,total\n");
            for &b in &grid {
                let breakdown = params.welfare_breakdown(Policy {
                    beta: b,
                    beta0: params.loss_minimizing_intercept(b),
                });
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt12(b),
                    fmt12(breakdown.info_loss),
                    fmt12(breakdown.misallocation_loss),
                    fmt12(breakdown.total)
                ));
            }
            text
        }
        (FigureKind::Fig2, OutputFormat::Json) => {
            let rows: Vec<Fig2Row> = grid
                .iter()
                .map(|&b| {
                    let breakdown = params.welfare_breakdown(Policy {
                        beta: b,
                        beta0: params.loss_minimizing_intercept(b),
                    });
                    Fig2Row {
                        beta: b,
                        info_loss: breakdown.info_loss,
                        misallocation_loss: breakdown.misallocation_loss,
                        total: breakdown.total,
                    }
                })
                .collect();
            json_string(&rows)?
        }
    };
    write_text(out.as_deref(), &content)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

/// CSV emission of sweep rows; the output flags gate columns.
pub(crate) fn sweep_csv(rows: &[SweepRow], outputs: &SweepOutputs) -> String {
    let mut header: Vec<&str> = vec!["k", "rho"];
    if outputs.beta_star {
        header.push("beta_star");
    }
    if outputs.fixed_points {
        header.push("beta_fp");
        header.push("n_fixed_points");
        header.push("fixed_points");
    }
    if outputs.ratio {
        header.push("ratio");
    }
    if outputs.losses {
        header.push("loss_star");
        header.push("loss_fp");
    }
    header.push("error");
    let mut text = header.join(",");
    text.push('\n');

    let opt = |v: Option<f64>| v.map(fmt12).unwrap_or_default();
    for row in rows {
        let mut fields = vec![fmt12(row.k), fmt12(row.rho)];
        if outputs.beta_star {
            fields.push(opt(row.beta_star));
        }
        if outputs.fixed_points {
            let smallest_pos = row.beta_fp_list.iter().cloned().find(|&b| b > 0.0);
            fields.push(opt(smallest_pos));
            fields.push(row.beta_fp_list.len().to_string());
            fields.push(
                row.beta_fp_list
                    .iter()
                    .map(|&b| fmt12(b))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
        }
        if outputs.ratio {
            fields.push(opt(row.ratio));
        }
        if outputs.losses {
            fields.push(opt(row.loss_star));
            fields.push(opt(row.loss_fp));
        }
        fields.push(row.error.clone().unwrap_or_default());
        text.push_str(&fields.join(","));
        text.push('\n');
    }
    text
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let k_min = cfg.get("k-min", args.k_min)?.unwrap_or(1e-2);
    let k_max = cfg.get("k-max", args.k_max)?.unwrap_or(1e2);
    let k_steps = cfg.get("k-steps", args.k_steps)?.unwrap_or(25);
    let k_scale = match (args.k_scale, cfg.values.get("k-scale").map(String::as_str)) {
        (Some(s), _) => s,
        (None, Some("lin")) => GridScale::Lin,
        (None, Some("log")) | (None, None) => GridScale::Log,
        (None, Some(other)) => {
            return Err(CliError::Validation(format!(
                "config key \"k-scale\" must be lin or log, got {other:?}"
            )))
        }
    };
    let rho_min = cfg.get("rho-min", args.rho_min)?.unwrap_or(-0.9);
    let rho_max = cfg.get("rho-max", args.rho_max)?.unwrap_or(0.9);
    let rho_steps = cfg.get("rho-steps", args.rho_steps)?.unwrap_or(7);
    if k_steps < 1 || rho_steps < 1 {
        return Err(CliError::Validation("grid steps must be >= 1".into()));
    }
    if k_steps > 1 && !(k_min < k_max) {
        return Err(CliError::Validation(format!(
            "need k-min < k-max with k-steps > 1, got [{k_min}, {k_max}]"
        )));
    }
    if rho_steps > 1 && !(rho_min < rho_max) {
        return Err(CliError::Validation(format!(
            "need rho-min < rho-max with rho-steps > 1, got [{rho_min}, {rho_max}]"
        )));
    }

    let k_grid = if k_steps == 1 {
        vec![k_min]
    } else {
        match k_scale {
            GridScale::Lin => linear_grid(k_min, k_max, k_steps),
            GridScale::Log => {
                if k_min <= 0.0 {
                    return Err(CliError::Validation("log k grid needs k-min > 0".into()));
                }
                log_grid(k_min, k_max, k_steps)
            }
        }
    };
    let rho_grid = if rho_steps == 1 {
        vec![rho_min]
    } else {
        linear_grid(rho_min, rho_max, rho_steps)
    };

    let spec = SweepSpec::new(k_grid, rho_grid, SweepOutputs::default()).map_err(CliError::from)?;
    let rows = run_sweep(&spec);
    let out = resolve_out(&args.common, &cfg)?;
    let content = match resolve_format(&args.common, &cfg, OutputFormat::Csv)? {
        OutputFormat::Csv => sweep_csv(&rows, &spec.outputs),
        OutputFormat::Json => json_string(&rows)?,
    };
    write_text(out.as_deref(), &content)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SimulateReport {
    params: ModelParams,
    policy: Policy,
    n: usize,
    seed: u64,
    fit: OlsFit,
    analytic_slope: f64,
    analytic_intercept: f64,
    sample_mean_x: f64,
    sample_var_x: f64,
    sample_cov_x_eta: f64,
    analytic_moments: ActionMoments,
    welfare: WelfareEstimate,
    analytic_welfare_loss: f64,
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let (params, _) = resolve_params(&args.params, &cfg)?;
    let n = cfg.get("n", args.n)?.unwrap_or(1_000_000);
    let seed = cfg.get("seed", args.common.seed)?.unwrap_or(0);
    let beta = cfg.require("beta", args.beta)?;
    let beta0 = cfg
        .get("beta0", args.beta0)?
        .unwrap_or_else(|| params.loss_minimizing_intercept(beta));
    let policy = Policy::new(beta, beta0)?;
    let sample = sample_population(&params, policy, n, seed)?;
    let out = resolve_out(&args.common, &cfg)?;

    match resolve_format(&args.common, &cfg, OutputFormat::Json)? {
        OutputFormat::Csv => {
            with_writer(out.as_deref(), |w| sample.write_csv(w))?;
        }
        OutputFormat::Json => {
            let fit = ols_eta_on_x(&sample)?;
            let report = SimulateReport {
                params,
                policy,
                n,
                seed,
                fit,
                analytic_slope: params.best_response_beta(beta),
                analytic_intercept: params.best_response_intercept(beta),
                sample_mean_x: mean(sample.x()),
                sample_var_x: variance(sample.x()),
                sample_cov_x_eta: covariance(sample.x(), sample.eta()),
                analytic_moments: params.action_moments(beta),
                welfare: empirical_welfare(&sample, policy),
                analytic_welfare_loss: params.welfare_loss(policy),
            };
            write_text(out.as_deref(), &json_string(&report)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// noise
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct NoiseReport {
    params: ModelParams,
    train_beta: f64,
    target: f64,
    n: usize,
    seed: u64,
    calibration: CalibrationResult,
    deployment: DeploymentEval,
    analytic_loss_at_target: f64,
}

fn cmd_noise(args: NoiseArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let (params, _) = resolve_params(&args.params, &cfg)?;
    let train_beta = cfg.require("train-beta", args.train_beta)?;
    let target = cfg.require("target", args.target)?;
    let n = cfg.get("n", args.n)?.unwrap_or(1_000_000);
    let seed = cfg.get("seed", args.common.seed)?.unwrap_or(0);
    let tol = cfg.get("tol", args.tol)?.unwrap_or(1e-9);

    let calibration = calibrate_to_target(&params, train_beta, target, tol)?;
    let out = resolve_out(&args.common, &cfg)?;

    match resolve_format(&args.common, &cfg, OutputFormat::Json)? {
        OutputFormat::Csv => {
            // Emit the noised training set itself: train population under
            // train_beta (seed), perturbed by the calibrated noise (seed + 1).
            let train_policy = Policy {
                beta: train_beta,
                beta0: params.loss_minimizing_intercept(train_beta),
            };
            let sample = sample_population(&params, train_policy, n, seed)?;
            let spec = NoisySpec::new(
                calibration.shift_star,
                calibration.sigma_eps_star,
                seed.wrapping_add(1),
            )?;
            let dataset = noised_dataset(&sample, &spec);
            with_writer(out.as_deref(), |w| dataset.write_csv(w))?;
        }
        OutputFormat::Json => {
            let deployment = deploy_and_evaluate(&params, &calibration, n, seed)?;
            let report = NoiseReport {
                params,
                train_beta,
                target,
                n,
                seed,
                calibration,
                deployment,
                analytic_loss_at_target: params.welfare_loss(calibration.deployed_policy),
            };
            write_text(out.as_deref(), &json_string(&report)?)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// binary
// ---------------------------------------------------------------------------

fn binary_csv(report: &BinaryReport) -> String {
    let mut text = String::from("policy,y0,y1,delta,welfare\n");
    for (name, p) in [
        ("naive", &report.naive),
        ("fixed_point", &report.fixed_point),
        ("commitment", &report.commitment),
    ] {
        text.push_str(&format!(
            "{name},{},{},{},{}\n",
            fmt12(p.policy.y0()),
            fmt12(p.policy.y1()),
            fmt12(p.delta),
            fmt12(p.welfare)
        ));
    }
    text
}

fn cmd_binary(args: BinaryArgs) -> Result<(), CliError> {
    let cfg = ConfigMap::load(args.common.config.as_deref())?;
    let pi = cfg.require("pi", args.pi)?;
    let c = cfg.require("c", args.c)?;
    let params = BinaryParams::new(pi, c)?;
    let report = binary_report(&params);

    println!("binary model: pi = {pi}, cost = {c}");
    println!(
        "{:<14}{:>10}{:>10}{:>10}{:>12}",
        "policy", "y0", "y1", "delta", "welfare"
    );
    for (name, p) in [
        ("naive", &report.naive),
        ("fixed point", &report.fixed_point),
        ("commitment", &report.commitment),
    ] {
        println!(
            "{:<14}{:>10.4}{:>10.4}{:>10.4}{:>12.6}",
            name,
            p.policy.y0(),
            p.policy.y1(),
            p.delta,
            p.welfare
        );
    }
    println!(
        "spread ordering ok: {}; welfare ordering ok: {}",
        report.delta_ordering_ok, report.welfare_ordering_ok
    );

    if let Some(path) = resolve_out(&args.common, &cfg)? {
        let content = match resolve_format(&args.common, &cfg, OutputFormat::Json)? {
            OutputFormat::Json => json_string(&report)?,
            OutputFormat::Csv => binary_csv(&report),
        };
        write_text(Some(&path), &content)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
