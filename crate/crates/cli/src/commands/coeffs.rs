use std::f64::consts::PI;

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::snail::{flux_grid, flux_sweep, SnailParams};
use stwpa::Parallelism;

use crate::args::at_least;
use crate::error::{param, CliError};
use crate::output::RunDir;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoeffsArgs {
    /// Small-to-large junction energy ratio, in (0, 1).
    #[arg(long, default_value_t = 0.2)]
    pub alpha: f64,
    /// Lowest external flux phase (rad).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub flux_min: f64,
    /// Highest external flux phase (rad).
    #[arg(long, default_value_t = 2.0 * PI, allow_negative_numbers = true)]
    pub flux_max: f64,
    /// Number of flux points, endpoints included.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

pub fn run(args: &CoeffsArgs, out: &mut RunDir) -> Result<Value, CliError> {
    SnailParams::new(args.alpha, args.flux_min)?;
    SnailParams::new(args.alpha, args.flux_max)?;
    at_least("points", args.points, 1)?;
    if args.flux_min > args.flux_max {
        return Err(param(format!(
            "flux-min {} exceeds flux-max {}",
            args.flux_min, args.flux_max
        )));
    }
    let grid = flux_grid(args.flux_min, args.flux_max, args.points);
    let rows = flux_sweep(args.alpha, &grid, Parallelism::default());
    let mut table = Vec::with_capacity(rows.len());
    for row in &rows {
        let c = row
            .coeffs
            .ok_or_else(|| CliError::Numeric(format!("no potential minimum found at phi_ext = {}", row.phi_ext)))?;
        table.push((row.phi_ext, c));
    }
    out.csv("coeffs.csv", &["phi_ext", "c3", "c4", "alpha_tilde"], |w| {
        for (p, c) in &table {
            writeln!(w, "{p},{},{},{}", c.c3, c.c4, c.alpha_tilde)?;
        }
        Ok(())
    })?;
    let range = |f: fn(&stwpa::TaylorCoeffs) -> f64| {
        table
            .iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], (_, c)| {
                [lo.min(f(c)), hi.max(f(c))]
            })
    };
    Ok(json!({
        "points": table.len(),
        "c3_range": range(|c| c.c3),
        "c4_range": range(|c| c.c4),
    }))
}
