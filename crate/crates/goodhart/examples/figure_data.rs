//! Emit the two standard curve families as CSV files in the current
//! directory:
//!
//! * `best_response.csv` — the best-response slope against the 45-degree
//!   line, whose crossings are the fixed points. One file per environment:
//!   a downward-sloping case (rho = 0) and a non-monotone case (m = 0.24,
//!   rho = -0.99) with three crossings.
//! * `loss_decomposition.csv` — information loss, misallocation loss, and
//!   their total over the slope grid, minimized at the commitment optimum.
//!
//! ```bash
//! cargo run -p goodhart --example figure_data
//! ```
//!
//! Plot with any tool, e.g.:
//! `python3 -c "import pandas as pd, matplotlib.pyplot as plt; d = pd.read_csv('loss_decomposition.csv'); d.plot(x='beta'); plt.show()"`

use std::fs::File;
use std::io::{BufWriter, Write};

use goodhart::emit::fmt12;
use goodhart::{ModelParams, Policy};

fn write_best_response(path: &str, params: &ModelParams, beta_max: f64) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "beta,beta_hat,diagonal")?;
    let steps = 600;
    for i in 0..=steps {
        let b = beta_max * i as f64 / steps as f64;
        writeln!(
            w,
            "{},{},{}",
            fmt12(b),
            fmt12(params.best_response_beta(b)),
            fmt12(b)
        )?;
    }
    Ok(())
}

fn main() -> std::io::Result<()> {
    let canonical = ModelParams::from_k_rho(1.0, 0.0).unwrap();
    write_best_response("best_response.csv", &canonical, 1.5)?;
    println!("wrote best_response.csv (rho = 0: decreasing, single crossing)");

    // Strong negative correlation with weak stakes: the best response is
    // non-monotone and crosses the diagonal three times.
    let humped = ModelParams::new(0.0, 0.0, 1.0, 1.0, -0.99, 0.24).unwrap();
    write_best_response("best_response_negative_rho.csv", &humped, 4.5)?;
    let crossings = goodhart::fixed_points(&humped);
    println!(
        "wrote best_response_negative_rho.csv (m = 0.24, rho = -0.99: crossings at {:?})",
        crossings
            .iter()
            .map(|b| (b * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );

    let mut w = BufWriter::new(File::create("loss_decomposition.csv")?);
    writeln!(w, "beta,info_loss,misallocation_loss,total")?;
    let steps = 400;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=steps {
        let b = i as f64 / steps as f64;
        let breakdown = canonical.welfare_breakdown(Policy {
            beta: b,
            beta0: canonical.loss_minimizing_intercept(b),
        });
        if breakdown.total < best.0 {
            best = (breakdown.total, b);
        }
        writeln!(
            w,
            "{},{},{},{}",
            fmt12(b),
            fmt12(breakdown.info_loss),
            fmt12(breakdown.misallocation_loss),
            fmt12(breakdown.total)
        )?;
    }
    println!(
        "wrote loss_decomposition.csv (total minimized near beta = {:.3})",
        best.1
    );
    Ok(())
}
