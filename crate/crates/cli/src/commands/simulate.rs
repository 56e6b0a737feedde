use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::horizon::gaussian_packet;
use stwpa::lattice::{self, measure_soliton, seed_initial_state, Placement};
use stwpa::{LatticeConfig, LatticeState, Trajectory};

use crate::args::{at_least, positive, BoundaryArg, LineArgs, SiArgs, SolitonArgs};
use crate::error::{param, CliError};
use crate::output::RunDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseArg {
    /// Analytic soliton of the chosen kind.
    Soliton,
    /// Right-moving Gaussian of width `sigma`.
    Gaussian,
    /// Samples read from `--init` (columns x, phi and optionally phi_dot).
    File,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Number of lattice cells.
    #[arg(long, default_value_t = 400)]
    pub cells: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Fixed)]
    pub boundary: BoundaryArg,
    /// RK4 step (units of 1/omega0).
    #[arg(long, default_value_t = lattice::DEFAULT_DT_BAR)]
    pub dt: f64,
    /// End time (units of 1/omega0).
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    /// Record every this many steps.
    #[arg(long, default_value_t = lattice::DEFAULT_RECORD_STRIDE)]
    pub stride: usize,
    #[arg(long, value_enum, default_value_t = PulseArg::Soliton)]
    pub pulse: PulseArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub soliton: SolitonArgs,
    /// Initial pulse center (cell index).
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub n0: f64,
    /// Gaussian width (cells).
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
    /// Initial profile for `--pulse file`.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Seed the soliton with the width the lattice itself supports.
    #[arg(long)]
    pub lattice_matched: bool,
    /// Also write the trajectory in the binary format.
    #[arg(long)]
    pub binary: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub si: SiArgs,
}

fn peak(s: &LatticeState) -> f64 {
    s.phi.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Linear interpolation of `(x, y)` samples sorted by `x`, zero outside.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let j = xs.partition_point(|&v| v <= x);
    if j == 0 || j == xs.len() {
        return if xs.last() == Some(&x) {
            *ys.last().unwrap()
        } else {
            0.0
        };
    }
    let u = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    ys[j - 1] + u * (ys[j] - ys[j - 1])
}

/// Reads named numeric columns from a CSV whose comment lines start with `#`.
pub fn read_columns(path: &Path, wanted: &[&str], optional: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |msg: String| param(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let mut index = Vec::new();
    for name in wanted {
        index.push(Some(find(name).ok_or_else(|| bad(format!("missing column {name}")))?));
    }
    index.extend(optional.iter().map(|n| find(n)));

    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); index.len()];
    for record in reader.records() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        for (c, j) in index.iter().enumerate() {
            let Some(j) = j else { continue };
            let v: f64 = record
                .get(*j)
                .ok_or_else(|| bad(format!("line {line}: too few fields")))?
                .parse()
                .map_err(|e| bad(format!("line {line}: {e}")))?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

fn file_state(path: &Path, cells: usize) -> Result<LatticeState, CliError> {
    let cols = read_columns(path, &["x", "phi"], &["phi_dot"])?;
    let (xs, phi) = (&cols[0], &cols[1]);
    if xs.len() < 2 || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(param(format!(
            "{}: x must increase strictly over at least two rows",
            path.display()
        )));
    }
    let phi_dot = if cols[2].len() == xs.len() {
        cols[2].clone()
    } else {
        vec![0.0; xs.len()]
    };
    Ok(LatticeState::from_fn(cells, |n| {
        let x = n as f64;
        (interpolate(xs, phi, x), interpolate(xs, &phi_dot, x))
    }))
}

/// Initial state plus any seeding warnings.
fn initial_state(args: &SimulateArgs, cfg: &LatticeConfig) -> Result<(LatticeState, Vec<Value>), CliError> {
    match args.pulse {
        PulseArg::Soliton => {
            let spec = args.soliton.seed(args.line.line(), args.lattice_matched)?;
            let (state, warnings) = seed_initial_state(&[Placement { spec, n0: args.n0 }], cfg)?;
            let w = warnings
                .iter()
                .map(|w| json!({ "n0": w.n0, "needed_cells": w.needed_cells }))
                .collect();
            Ok((state, w))
        }
        PulseArg::Gaussian => {
            positive("sigma", args.sigma)?;
            let mut s = gaussian_packet(args.cells, args.n0, args.sigma, args.soliton.amplitude);
            if args.soliton.direction == crate::args::DirectionArg::Left {
                s.phi_dot.iter_mut().for_each(|v| *v = -*v);
            }
            Ok((s, Vec::new()))
        }
        PulseArg::File => {
            let path = args
                .init
                .as_ref()
                .ok_or_else(|| param("--pulse file needs --init PATH"))?;
            Ok((file_state(path, args.cells)?, Vec::new()))
        }
    }
}

pub fn write_trajectory(
    out: &mut RunDir,
    traj: &Trajectory,
    binary: bool,
    si: &SiArgs,
    r: f64,
) -> Result<(), CliError> {
    out.trajectory("trajectory.csv", traj, si.scales(r)?.as_ref())?;
    if binary {
        out.binary("trajectory.stwpa", traj)?;
    }
    Ok(())
}

pub fn run(args: &SimulateArgs, out: &mut RunDir) -> Result<Value, CliError> {
    at_least("stride", args.stride, 1)?;
    positive("t-end", args.t_end)?;
    let cfg = args.line.lattice(args.cells, args.boundary, args.dt)?;
    let (state, warnings) = initial_state(args, &cfg)?;
    let traj = lattice::run(state, &cfg, args.t_end, args.stride)?;
    write_trajectory(out, &traj, args.binary, &args.si, args.line.r)?;

    let history: Vec<[f64; 2]> = traj.snapshots.iter().map(|s| [s.t_bar, peak(s)]).collect();
    let (p0, p1) = (history[0][1], history.last().unwrap()[1]);
    let mut report = json!({
        "config": cfg,
        "pulse": args.pulse,
        "t_bar_end": traj.last().t_bar,
        "snapshots": traj.snapshots.len(),
        "initial_peak": p0,
        "final_peak": p1,
        "peak_ratio": if p0 > 0.0 { p1 / p0 } else { f64::NAN },
        "peak_history": history,
        "seed_warnings": warnings,
    });
    report["measurement"] = match measure_soliton(&traj, 0..cfg.n) {
        Ok(m) => json!({
            "amplitude": m.amplitude,
            "halfwidth_cells": m.halfwidth_cells,
            "fwhm_cells": m.fwhm_cells,
            "v_over_v0": m.velocity,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    if args.pulse == PulseArg::Soliton {
        let spec = args.soliton.seed(args.line.line(), false)?;
        let v = report["measurement"]["v_over_v0"].as_f64();
        report["predicted"] = json!({
            "v_over_v0": spec.velocity() * spec.direction.sign(),
            "halfwidth_cells": spec.half_width(),
            "velocity_error": v.map(|v| v / (spec.velocity() * spec.direction.sign()) - 1.0),
        });
    }
    out.json("report.json", &report)?;
    report.as_object_mut().unwrap().remove("peak_history");
    Ok(report)
}
