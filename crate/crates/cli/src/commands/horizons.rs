use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use stwpa::horizon::{find_horizons, metric_components, probe_velocity};
use stwpa::soliton::UniformGrid;

use crate::args::{at_least, positive, LineArgs, SiArgs, SolitonArgs};
use crate::error::CliError;
use crate::output::RunDir;

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct HorizonsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub soliton: SolitonArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub line: LineArgs,
    /// Velocity profile covers eta in [-eta-max, eta-max] (cells).
    #[arg(long, default_value_t = 60.0)]
    pub eta_max: f64,
    #[arg(long, default_value_t = 1201)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub si: SiArgs,
}

pub fn run(args: &HorizonsArgs, out: &mut RunDir) -> Result<Value, CliError> {
    positive("eta-max", args.eta_max)?;
    at_least("points", args.points, 2)?;
    let spec = args.soliton.spec(args.line.line(), 0.0)?;
    let scales = args.si.scales(args.line.r)?;
    let mut report = find_horizons(&spec)?;
    if let Some(s) = &scales {
        report = report.with_time_scale(s.omega0);
    }

    let grid = UniformGrid::spanning(-args.eta_max, args.eta_max, args.points);
    let rows = grid
        .points()
        .map(|eta| Ok((eta, probe_velocity(&spec, eta)?, report.region_of(eta))))
        .collect::<Result<Vec<_>, CliError>>()?;
    let columns: &[&str] = if scales.is_some() {
        &["eta_m", "v_m_per_s", "region"]
    } else {
        &["eta", "v_over_v0", "region"]
    };
    out.csv("profile.csv", columns, |w| {
        for (eta, v, region) in &rows {
            let label = region.map_or("-".to_string(), |r| format!("{r:?}"));
            match &scales {
                None => writeln!(w, "{eta},{v},{label}")?,
                Some(s) => writeln!(w, "{},{},{label}", s.length_si(*eta), v * s.v0)?,
            }
        }
        Ok(())
    })?;

    let checks = report
        .horizons
        .iter()
        .map(|h| {
            let m = metric_components(&spec, h.eta)?;
            Ok(json!({
                "eta": h.eta,
                "velocity_residual": probe_velocity(&spec, h.eta)? - report.v_s,
                "metric": m,
                "determinant": m.determinant(),
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut summary = json!({ "report": report, "checks": checks });
    if let Some(s) = &scales {
        summary["horizons_m"] = json!(report.horizons.iter().map(|h| s.length_si(h.eta)).collect::<Vec<_>>());
    }
    out.json("horizons.json", &summary)?;
    Ok(summary)
}
