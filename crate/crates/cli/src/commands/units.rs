use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::units::soliton_observables;

use crate::args::DeviceArgs;
use crate::error::CliError;
use crate::output::RunDir;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct UnitsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub device: DeviceArgs,
    /// Soliton amplitude A (radians).
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub amplitude: f64,
    /// Cubic coefficient c3.
    #[arg(long, default_value_t = 0.32, allow_negative_numbers = true)]
    pub c3: f64,
}

pub fn run(args: &UnitsArgs, out: &mut RunDir) -> Result<Value, CliError> {
    let scales = args.device.scales()?;
    let obs = soliton_observables(args.amplitude, args.c3, &scales)?;
    let report = json!({
        "scales": scales,
        "soliton": {
            "amplitude": args.amplitude,
            "c3": args.c3,
            "observables": obs,
            "v_peak_uV": obs.v_peak * 1e6,
            "delta_t_ns": obs.delta_t * 1e9,
            "half_width_cells": scales.length_cells(obs.half_width_m),
        },
    });
    out.json("units.json", &report)?;
    Ok(report)
}
