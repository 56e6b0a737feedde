use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::horizon::{
    audit_crossings, find_horizons, gaussian_packet, run_probe, ProbeBackground, PROBE_RATIO_WARNING,
};
use stwpa::lattice::{self, seed_initial_state, Placement};

use crate::args::{at_least, positive, BoundaryArg, LineArgs, SiArgs, SolitonArgs};
use crate::error::CliError;
use crate::output::RunDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackgroundArg {
    /// Closed-form soliton translated at its speed.
    Analytic,
    /// Soliton evolved on the lattice first, then interpolated.
    Recorded,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProbeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub soliton: SolitonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    #[arg(long, default_value_t = 800)]
    pub cells: usize,
    /// Soliton center at t = 0 (cell index).
    #[arg(long, default_value_t = 150.0)]
    pub n0: f64,
    /// Probe center relative to the soliton center (cells).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub offset: f64,
    /// Probe packet width (cells).
    #[arg(long, default_value_t = 4.0)]
    pub sigma: f64,
    /// Probe amplitude.
    #[arg(long, default_value_t = 1e-4, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Number of RK4 steps.
    #[arg(long, default_value_t = 10_000)]
    pub steps: u64,
    #[arg(long, default_value_t = lattice::DEFAULT_DT_BAR)]
    pub dt: f64,
    #[arg(long, default_value_t = lattice::DEFAULT_RECORD_STRIDE)]
    pub stride: usize,
    #[arg(long, value_enum, default_value_t = BackgroundArg::Analytic)]
    pub background: BackgroundArg,
    /// Recording stride of a lattice background.
    #[arg(long, default_value_t = 5)]
    pub background_stride: usize,
    /// Box filter length for locating the packet (cells).
    #[arg(long, default_value_t = 9)]
    pub smoothing: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub si: SiArgs,
}

pub fn run(args: &ProbeArgs, out: &mut RunDir) -> Result<Value, CliError> {
    at_least("stride", args.stride, 1)?;
    at_least("background-stride", args.background_stride, 1)?;
    at_least("steps", args.steps as usize, 1)?;
    positive("sigma", args.sigma)?;
    let cfg = args.line.lattice(args.cells, BoundaryArg::Fixed, args.dt)?;
    let spec = args.soliton.spec(args.line.line(), 0.0)?;
    let horizons = find_horizons(&spec)?;
    let t_end = args.steps as f64 * cfg.dt_bar;

    let background = match args.background {
        BackgroundArg::Analytic => ProbeBackground::Analytic { spec, n0: args.n0 },
        BackgroundArg::Recorded => {
            let (s0, _) = seed_initial_state(&[Placement { spec, n0: args.n0 }], &cfg)?;
            ProbeBackground::Recorded(lattice::run(s0, &cfg, t_end, args.background_stride)?)
        }
    };
    let packet = gaussian_packet(cfg.n, args.n0 + args.offset, args.sigma, args.epsilon);
    let run = run_probe(&background, packet, &cfg, t_end, args.stride)?;
    if run.amplitude_ratio > PROBE_RATIO_WARNING {
        log::warn!("probe/background amplitude ratio {} is not small", run.amplitude_ratio);
    }
    out.trajectory("probe.csv", &run.trajectory, args.si.scales(args.line.r)?.as_ref())?;

    let audit = audit_crossings(&run.trajectory, &spec, args.n0, &horizons, args.smoothing);
    let report = json!({
        "horizons": horizons,
        "amplitude_ratio": run.amplitude_ratio,
        "audit": audit,
    });
    out.json("audit.json", &report)?;
    Ok(json!({
        "black_eta": horizons.black().map(|h| h.eta),
        "white_eta": horizons.white().map(|h| h.eta),
        "initial_region": audit.initial_region,
        "left_initial_region": audit.left_initial_region,
        "min_eta": audit.min_eta,
        "max_eta": audit.max_eta,
        "amplitude_ratio": run.amplitude_ratio,
    }))
}
