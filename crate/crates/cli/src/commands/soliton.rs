use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::soliton::profile;
use stwpa::soliton::UniformGrid;

use crate::args::{at_least, LineArgs, SiArgs, SolitonArgs};
use crate::error::{param, CliError};
use crate::output::RunDir;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolitonCmdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub soliton: SolitonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    /// Center at t = 0 (cells).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, default_value_t = -200.0, allow_negative_numbers = true)]
    pub x_min: f64,
    #[arg(long, default_value_t = 200.0, allow_negative_numbers = true)]
    pub x_max: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Evaluation time (units of 1/omega0).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub si: SiArgs,
}

pub fn run(args: &SolitonCmdArgs, out: &mut RunDir) -> Result<Value, CliError> {
    let spec = args.soliton.spec(args.line.line(), args.x0)?;
    at_least("points", args.points, 2)?;
    if !(args.x_min < args.x_max) {
        return Err(param(format!(
            "x-min {} must be below x-max {}",
            args.x_min, args.x_max
        )));
    }
    let scales = args.si.scales(args.line.r)?;
    let grid = UniformGrid::spanning(args.x_min, args.x_max, args.points);
    let columns: &[&str] = if scales.is_some() {
        &["x_m", "phi", "voltage_V"]
    } else {
        &["x", "phi", "phi_dot"]
    };
    out.csv("soliton.csv", columns, |w| {
        for x in grid.points() {
            let p = profile(&spec, x, args.t);
            match &scales {
                None => writeln!(w, "{x},{},{}", p.phi, p.phi_dot)?,
                Some(s) => writeln!(w, "{},{},{}", s.length_si(x), p.phi, s.cell_voltage(p.phi_dot))?,
            }
        }
        Ok(())
    })?;
    let mut report = json!({
        "spec": spec,
        "wavenumber": spec.wavenumber(),
        "half_width_cells": spec.half_width(),
        "velocity": spec.velocity(),
    });
    if let Some(s) = scales {
        report["half_width_m"] = json!(s.length_si(spec.half_width()));
        report["velocity_m_per_s"] = json!(spec.velocity() * s.v0);
    }
    out.json("soliton.json", &report)?;
    Ok(report)
}
