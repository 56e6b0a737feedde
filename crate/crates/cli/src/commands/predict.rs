use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::scattering::{predict_amplitudes, validate_against_lattice, ValidationOptions};
use stwpa::soliton::UniformGrid;
use stwpa::{Boundary, LatticeConfig};

use crate::args::{at_least, positive, LineArgs};
use crate::commands::simulate::read_columns;
use crate::error::{param, CliError};
use crate::output::RunDir;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeArg {
    /// A sech²(k x)
    Sech2,
    /// A exp(-(k x)²)
    Gaussian,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    /// Pulse samples (columns x, phi) on a uniform grid of odd length.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ShapeArg::Sech2)]
    pub shape: ShapeArg,
    /// Peak of the built-in pulse.
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub amplitude: f64,
    /// Inverse width of the built-in pulse (1/cells). Defaults to the
    /// wavenumber of a KdV soliton with the same amplitude.
    #[arg(long)]
    pub k: Option<f64>,
    /// Built-in grid covers [-span/k, span/k].
    #[arg(long, default_value_t = 12.0)]
    pub span: f64,
    /// Built-in grid size (odd).
    #[arg(long, default_value_t = 961)]
    pub points: usize,
    /// Also evolve the pulse on a periodic lattice and measure what emerges.
    #[arg(long)]
    pub validate: bool,
    /// Ring size for `--validate`.
    #[arg(long, default_value_t = 512)]
    pub cells: usize,
    /// Longest lattice run allowed for `--validate`.
    #[arg(long, default_value_t = 5.0e4)]
    pub t_max: f64,
}

type Shape = Box<dyn Fn(f64) -> f64>;

struct Pulse {
    grid: UniformGrid,
    samples: Vec<f64>,
}

impl Pulse {
    fn at(&self, x: f64) -> f64 {
        let u = (x - self.grid.start) / self.grid.spacing;
        if !(u >= 0.0 && u <= (self.samples.len() - 1) as f64) {
            return 0.0;
        }
        let j = (u.floor() as usize).min(self.samples.len() - 2);
        let f = u - j as f64;
        self.samples[j] * (1.0 - f) + self.samples[j + 1] * f
    }
}

fn built_in(args: &PredictArgs) -> Result<(Pulse, Shape), CliError> {
    let l = &args.line;
    let k = match args.k {
        Some(k) => k,
        None => {
            let s = l.c3 * args.amplitude / (12.0 * l.r);
            if !(s > 0.0) {
                return Err(param("default k needs c3 * amplitude > 0; pass --k"));
            }
            s.sqrt()
        }
    };
    positive("k", k)?;
    positive("span", args.span)?;
    at_least("points", args.points, 5)?;
    let a = args.amplitude;
    let f: Shape = match args.shape {
        ShapeArg::Sech2 => Box::new(move |x: f64| a / (k * x).cosh().powi(2)),
        ShapeArg::Gaussian => Box::new(move |x: f64| a * (-(k * x) * (k * x)).exp()),
    };
    let grid = UniformGrid::spanning(-args.span / k, args.span / k, args.points);
    let samples = grid.sample(&f);
    Ok((Pulse { grid, samples }, f))
}

fn from_file(path: &Path) -> Result<Pulse, CliError> {
    let cols = read_columns(path, &["x", "phi"], &[])?;
    let (xs, phi) = (&cols[0], &cols[1]);
    if xs.len() < 2 {
        return Err(param(format!("{}: need at least two samples", path.display())));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if !(h > 0.0)
        || xs
            .iter()
            .enumerate()
            .any(|(i, x)| (x - (xs[0] + i as f64 * h)).abs() > 1e-6 * h)
    {
        return Err(param(format!(
            "{}: x must be uniformly spaced and increasing",
            path.display()
        )));
    }
    Ok(Pulse {
        grid: UniformGrid::new(xs[0], h, xs.len()),
        samples: phi.clone(),
    })
}

pub fn run(args: &PredictArgs, out: &mut RunDir) -> Result<Value, CliError> {
    let (pulse, shape): (Pulse, Option<Shape>) = match &args.input {
        Some(path) => (from_file(path)?, None),
        None => {
            let (p, f) = built_in(args)?;
            (p, Some(f))
        }
    };
    let line = args.line.line();
    let prediction = predict_amplitudes(&pulse.samples, &pulse.grid, &line)?;
    let mut report = json!({ "prediction": prediction });
    if args.validate {
        let cfg = LatticeConfig::new(args.cells, line.r, line.c3, line.c4).with_boundary(Boundary::Periodic);
        let options = ValidationOptions {
            t_bar_max: args.t_max,
            ..ValidationOptions::default()
        };
        let n0 = (args.cells / 2) as f64;
        let v = match &shape {
            Some(f) => validate_against_lattice(f, n0, &pulse.grid, &cfg, options)?,
            None => validate_against_lattice(|x| pulse.at(x), n0, &pulse.grid, &cfg, options)?,
        };
        report["validation"] = json!(v);
    }
    out.json("prediction.json", &report)?;
    let mut summary = json!({ "predicted_amplitudes": prediction.predicted_amplitudes });
    if let Some(v) = report.get("validation") {
        summary["emergent_amplitudes"] = json!(v["emergent"]
            .as_array()
            .map(|e| e.iter().map(|p| p["amplitude"].clone()).collect::<Vec<_>>()));
        summary["lattice_corrected_amplitudes"] = v["lattice_corrected"]["predicted_amplitudes"].clone();
    }
    Ok(summary)
}
