use clap::Subcommand;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;

use crate::error::{param, CliError};
use crate::output::RunDir;

pub mod coeffs;
pub mod collide;
pub mod horizons;
pub mod predict;
pub mod probe;
pub mod simulate;
pub mod soliton;
pub mod units;

/// A reproducible experiment. Serialized into the run manifest.
#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "params", rename_all = "kebab-case")]
pub enum Command {
    /// Sweep the SNAIL nonlinear coefficients over the external flux.
    Coeffs(coeffs::CoeffsArgs),
    /// Circuit scales and the SI size of a soliton.
    Units(units::UnitsArgs),
    /// Analytic soliton profile, usable as a lattice seed.
    Soliton(soliton::SolitonCmdArgs),
    /// Evolve one pulse on the lattice.
    Simulate(simulate::SimulateArgs),
    /// Head-on collision of two solitons.
    Collide(collide::CollideArgs),
    /// Horizons of the probe metric around a soliton.
    Horizons(horizons::HorizonsArgs),
    /// Linearized probe packet on a soliton background.
    Probe(probe::ProbeArgs),
    /// Soliton content of an initial pulse from its Schrödinger spectrum.
    Predict(predict::PredictArgs),
}

impl Command {
    pub fn to_parts(&self) -> (String, Value) {
        let v = serde_json::to_value(self).expect("arguments serialize");
        let name = v["subcommand"].as_str().expect("tagged").to_string();
        (name, v["params"].clone())
    }

    pub fn from_parts(subcommand: &str, params: Value) -> Result<Self, CliError> {
        serde_json::from_value(json!({ "subcommand": subcommand, "params": params }))
            .map_err(|e| param(format!("bad {subcommand} parameters: {e}")))
    }

    pub fn name(&self) -> String {
        self.to_parts().0
    }

    /// Files read by the run; hashed into the manifest.
    pub fn inputs(&self) -> Vec<PathBuf> {
        match self {
            Command::Simulate(a) => a.init.iter().cloned().collect(),
            Command::Predict(a) => a.input.iter().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Runs the experiment, writing into `out`. Returns a summary.
    pub fn run(&self, out: &mut RunDir) -> Result<Value, CliError> {
        match self {
            Command::Coeffs(a) => coeffs::run(a, out),
            Command::Units(a) => units::run(a, out),
            Command::Soliton(a) => soliton::run(a, out),
            Command::Simulate(a) => simulate::run(a, out),
            Command::Collide(a) => collide::run(a, out),
            Command::Horizons(a) => horizons::run(a, out),
            Command::Probe(a) => probe::run(a, out),
            Command::Predict(a) => predict::run(a, out),
        }
    }
}
