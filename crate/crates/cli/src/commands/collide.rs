use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::lattice::{self, run_collision, Placement};

use crate::args::{at_least, positive, BoundaryArg, DirectionArg, KindArg, LineArgs, SiArgs, SolitonArgs};
use crate::commands::simulate::write_trajectory;
use crate::error::CliError;
use crate::output::RunDir;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CollideArgs {
    #[arg(long, default_value_t = 300)]
    pub cells: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Fixed)]
    pub boundary: BoundaryArg,
    #[arg(long, default_value_t = lattice::DEFAULT_DT_BAR)]
    pub dt: f64,
    /// Give up if the pulses have not separated by this time.
    #[arg(long, default_value_t = 1000.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 20)]
    pub stride: usize,
    /// Amplitude of the right-moving soliton.
    #[arg(long, default_value_t = 0.04, allow_negative_numbers = true)]
    pub right_amplitude: f64,
    /// Amplitude of the left-moving soliton.
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub left_amplitude: f64,
    #[arg(long, default_value_t = 110.0)]
    pub right_n0: f64,
    #[arg(long, default_value_t = 190.0)]
    pub left_n0: f64,
    /// Seed widths from the lattice's effective dispersion.
    #[arg(long)]
    pub lattice_matched: bool,
    /// Run the reference scenario, ignoring the other physics flags.
    #[arg(long)]
    pub paper: bool,
    #[arg(long)]
    pub binary: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub si: SiArgs,
}

impl CollideArgs {
    fn resolved(&self) -> Self {
        if !self.paper {
            return self.clone();
        }
        Self {
            cells: 300,
            line: LineArgs {
                r: 0.1,
                c3: 0.32,
                c4: 0.0,
            },
            boundary: BoundaryArg::Fixed,
            dt: lattice::DEFAULT_DT_BAR,
            t_max: 1000.0,
            right_amplitude: 0.04,
            left_amplitude: 0.02,
            right_n0: 110.0,
            left_n0: 190.0,
            lattice_matched: false,
            ..self.clone()
        }
    }
}

pub fn run(args: &CollideArgs, out: &mut RunDir) -> Result<Value, CliError> {
    let args = &args.resolved();
    at_least("stride", args.stride, 1)?;
    positive("t-max", args.t_max)?;
    let cfg = args.line.lattice(args.cells, args.boundary, args.dt)?;
    let seed = |amplitude, direction| {
        SolitonArgs {
            kind: KindArg::Kdv,
            amplitude,
            direction,
        }
        .seed(args.line.line(), args.lattice_matched)
    };
    let right = Placement {
        spec: seed(args.right_amplitude, DirectionArg::Right)?,
        n0: args.right_n0,
    };
    let left = Placement {
        spec: seed(args.left_amplitude, DirectionArg::Left)?,
        n0: args.left_n0,
    };
    let rep = run_collision(&cfg, right, left, args.t_max, args.stride)?;
    write_trajectory(out, &rep.trajectory, args.binary, &args.si, args.line.r)?;
    let change = |i: usize| (rep.after[i].amplitude - rep.before[i].amplitude) / rep.before[i].amplitude;
    let report = json!({
        "paper": args.paper,
        "config": cfg,
        "before": { "right": rep.before[0], "left": rep.before[1] },
        "after": { "right": rep.after[0], "left": rep.after[1] },
        "amplitudes_after": [rep.after[0].amplitude, rep.after[1].amplitude],
        "relative_amplitude_change": { "right": change(0), "left": change(1) },
        "closest_approach": rep.closest_approach,
        "t_separated": rep.t_separated,
    });
    out.json("report.json", &report)?;
    Ok(report)
}
