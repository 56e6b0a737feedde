//! Soliton content of an injected pulse.
//!
//! With `u = c3 φ / (6 r a²)` the right-moving weakly nonlinear line becomes
//! the standard KdV equation, whose conserved spectrum is that of
//!
//! ```text
//! -ψ'' + V(x) ψ = E ψ,    V = -c3 φ(x, 0) / (6 r a²)
//! ```
//!
//! Every bound state `E = -κ²` becomes one soliton of amplitude
//! `A = 12 r a² κ² / c3`, which is the amplitude whose own width parameter is
//! `κ`. In standard-form variables this reads `A_u = 2κ² = 2|E|`.
//!
//! Bound states come from a 3-point finite-difference operator with
//! Dirichlet ends. Negative eigenvalues are isolated by Sturm-sequence
//! bisection on the symmetric tridiagonal matrix and then
//! Richardson-extrapolated from spacings `2h` and `h`.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::UniformGrid;
use crate::lattice::{
    self, find_peaks, measure_pulse, Boundary, LatticeConfig, LatticeError, LatticeState, PulseShape,
};
use crate::par::{self, Parallelism};
use crate::soliton::LineParams;

/// `|V|` at the grid ends must be below this fraction of `max|V|`.
pub const DECAY_TOLERANCE: f64 = 1e-6;
/// Minimum samples across the full width at half maximum of `|V|`.
pub const MIN_POINTS_PER_WIDTH: usize = 20;
/// Relative separation, in half-widths of the fastest soliton, required
/// before emergent amplitudes are measured.
pub const SEPARATION_HALF_WIDTHS: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("potential does not decay at the grid ends: |V| = {edge:e} vs max {peak:e}")]
    PotentialNotDecayed { edge: f64, peak: f64 },
    #[error("grid resolves the potential with {points} points per width, need {min}")]
    GridTooCoarse { points: usize, min: usize },
    #[error("grid needs an odd number of at least 5 points and positive spacing, got {len} points, h = {spacing}")]
    BadGrid { len: usize, spacing: f64 },
    #[error("KdV inverse scattering needs c3 > 0 and a positive pulse (c3 = {c3}, pulse extremum = {extremum})")]
    WrongPolarity { c3: f64, extremum: f64 },
    #[error("quartic term dominates: |c4| * max(phi) / 3 = {quartic:e} >= |c3| = {cubic:e}")]
    QuarticDominated { quartic: f64, cubic: f64 },
    #[error("invalid line parameters: {0}")]
    InvalidLine(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("could not isolate emergent solitons: {0}")]
    Measurement(String),
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and constant off-diagonal `e`.
fn sturm_count(d: &[f64], e: f64, x: f64) -> usize {
    let e2 = e * e;
    let mut count = 0;
    let mut q = 1.0;
    for (i, &di) in d.iter().enumerate() {
        q = if i == 0 { di - x } else { di - x - e2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (di.abs() + e.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All negative eigenvalues, ascending, of `-D₂/h² + diag(V)` on the interior
/// points of one grid.
pub fn negative_eigenvalues(potential: &[f64], spacing: f64) -> Vec<f64> {
    if potential.len() < 3 {
        return Vec::new();
    }
    let inv_h2 = 1.0 / (spacing * spacing);
    let d: Vec<f64> = potential[1..potential.len() - 1]
        .iter()
        .map(|v| 2.0 * inv_h2 + v)
        .collect();
    let e = -inv_h2;
    // Gershgorin lower bound
    let lower = d.iter().fold(f64::INFINITY, |m, &x| m.min(x)) - 2.0 * e.abs();
    let count = sturm_count(&d, e, 0.0);
    (0..count)
        .map(|k| {
            let (mut lo, mut hi) = (lower, 0.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(&d, e, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Extrapolated spectrum plus the two raw spectra it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    /// Bound states below `-threshold`, ascending.
    pub eigenvalues: Vec<f64>,
    pub coarse: Vec<f64>,
    pub fine: Vec<f64>,
    /// Discretization floor `10 h² max|V|² / 12`.
    pub threshold: f64,
}

fn check_grid(potential: &[f64], grid: &UniformGrid) -> Result<(), ScatteringError> {
    let len = potential.len();
    if len != grid.len || len < 5 || len % 2 == 0 || !(grid.spacing > 0.0) {
        return Err(ScatteringError::BadGrid {
            len,
            spacing: grid.spacing,
        });
    }
    let peak = potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(());
    }
    let edge = potential[0].abs().max(potential[len - 1].abs());
    if edge >= DECAY_TOLERANCE * peak {
        return Err(ScatteringError::PotentialNotDecayed { edge, peak });
    }
    let points = potential.iter().filter(|v| v.abs() >= 0.5 * peak).count();
    if points < MIN_POINTS_PER_WIDTH {
        return Err(ScatteringError::GridTooCoarse {
            points,
            min: MIN_POINTS_PER_WIDTH,
        });
    }
    Ok(())
}

/// Bound-state energies of `-ψ'' + Vψ = Eψ` for `V` sampled on `grid`.
///
/// The coarse grid is every second sample, so `grid.len` must be odd.
pub fn schrodinger_spectrum(potential: &[f64], grid: &UniformGrid) -> Result<Vec<f64>, ScatteringError> {
    Ok(spectrum_details(potential, grid, Parallelism::default())?.eigenvalues)
}

pub fn spectrum_details(
    potential: &[f64],
    grid: &UniformGrid,
    parallelism: Parallelism,
) -> Result<Spectrum, ScatteringError> {
    check_grid(potential, grid)?;
    let h = grid.spacing;
    let coarse_v: Vec<f64> = potential.iter().step_by(2).copied().collect();
    let (coarse, fine) = par::join(
        parallelism,
        || negative_eigenvalues(&coarse_v, 2.0 * h),
        || negative_eigenvalues(potential, h),
    );
    let vmax = potential.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = 10.0 * h * h * vmax * vmax / 12.0;
    let eigenvalues = fine
        .iter()
        .enumerate()
        .map(|(i, &ef)| match coarse.get(i) {
            Some(&ec) => ef + (ef - ec) / 3.0,
            None => ef,
        })
        .filter(|&e| e < -threshold)
        .collect();
    Ok(Spectrum {
        eigenvalues,
        coarse,
        fine,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub start: f64,
    pub spacing: f64,
    pub len: usize,
    pub coarse_spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatteringReport {
    /// Ascending, strictly negative.
    pub eigenvalues: Vec<f64>,
    /// `√(-E)`, same order.
    pub kappas: Vec<f64>,
    /// `12 r a² κ² / c3`, same order, so the largest soliton comes first.
    pub predicted_amplitudes: Vec<f64>,
    /// `c3 / (6 r a²)`.
    pub potential_scale: f64,
    pub threshold: f64,
    pub grid: GridMeta,
}

/// Predicts the emergent KdV solitons of `initial_phi`, sampled on `grid`
/// in the length unit of `line.a`.
pub fn predict_amplitudes(
    initial_phi: &[f64],
    grid: &UniformGrid,
    line: &LineParams,
) -> Result<ScatteringReport, ScatteringError> {
    if !(line.r > 0.0 && line.a > 0.0 && line.r.is_finite() && line.a.is_finite()) {
        return Err(ScatteringError::InvalidLine(format!("r = {}, a = {}", line.r, line.a)));
    }
    let (lo, hi) = initial_phi
        .iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let extremum = if hi >= -lo { hi } else { lo };
    if !(line.c3 > 0.0) || extremum < 0.0 {
        return Err(ScatteringError::WrongPolarity { c3: line.c3, extremum });
    }
    let phi_max = hi.max(-lo);
    let quartic = line.c4.abs() * phi_max / 3.0;
    if quartic >= line.c3 {
        return Err(ScatteringError::QuarticDominated {
            quartic,
            cubic: line.c3,
        });
    }
    let scale = line.c3 / (6.0 * line.r * line.a * line.a);
    let potential: Vec<f64> = initial_phi.iter().map(|p| -scale * p).collect();
    let spectrum = spectrum_details(&potential, grid, Parallelism::default())?;
    let kappas: Vec<f64> = spectrum.eigenvalues.iter().map(|e| (-e).sqrt()).collect();
    let predicted_amplitudes = kappas.iter().map(|k| 2.0 * k * k / scale).collect();
    Ok(ScatteringReport {
        eigenvalues: spectrum.eigenvalues,
        kappas,
        predicted_amplitudes,
        potential_scale: scale,
        threshold: spectrum.threshold,
        grid: GridMeta {
            start: grid.start,
            spacing: grid.spacing,
            len: grid.len,
            coarse_spacing: 2.0 * grid.spacing,
        },
    })
}

/// Dispersion coefficient of the continuum limit of the discrete lattice:
/// `D₂` contributes `a²/12 ∂⁴` beyond `r a² ∂⁴`.
pub fn lattice_effective_r(r: f64) -> f64 {
    r + 1.0 / 12.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub prediction: ScatteringReport,
    /// Same spectrum mapped with the lattice's effective dispersion
    /// `r + 1/12` in place of `r`.
    pub lattice_corrected: ScatteringReport,
    /// Emergent solitons, largest first; at most as many as predicted.
    pub emergent: Vec<PulseShape>,
    /// `(measured - predicted) / predicted`, paired largest first.
    pub relative_errors: Vec<f64>,
    pub relative_errors_corrected: Vec<f64>,
    pub t_bar_end: f64,
    /// Largest `|φ|` remaining at the end when nothing is predicted.
    pub remnant_peak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationOptions {
    pub record_stride: usize,
    pub t_bar_max: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            record_stride: 1000,
            t_bar_max: 5.0e4,
        }
    }
}

/// Time for the fastest predicted soliton to gain
/// `SEPARATION_HALF_WIDTHS` of its half-widths on the slowest one, or to
/// travel that many half-widths when only one is predicted.
fn separation_time(amplitudes: &[f64], line: &LineParams, pulse_width: f64) -> f64 {
    let speed = |a: f64| line.v0 * (1.0 + line.c3 * a / 6.0);
    let half_width = |a: f64| 2.0 * line.a / (line.c3 * a / (12.0 * line.r)).sqrt();
    match amplitudes {
        [] => SEPARATION_HALF_WIDTHS * pulse_width / line.v0,
        [a] => SEPARATION_HALF_WIDTHS * half_width(*a) / speed(*a),
        [fast, .., slow] => SEPARATION_HALF_WIDTHS * half_width(*fast) / (speed(*fast) - speed(*slow)),
    }
}

fn windows_between(centers: &[f64], n: usize) -> Vec<Range<usize>> {
    (0..centers.len())
        .map(|i| {
            let lo = if i == 0 {
                0
            } else {
                (0.5 * (centers[i - 1] + centers[i])).round() as usize
            };
            let hi = if i + 1 == centers.len() {
                n
            } else {
                (0.5 * (centers[i] + centers[i + 1])).round() as usize
            };
            lo..hi
        })
        .collect()
}

/// Injects `pulse` (a function of the cell offset from `n0`) on the lattice
/// as a right mover, evolves until the predicted solitons have separated and
/// compares the emergent peaks with the inverse-scattering prediction.
///
/// The prediction samples the pulse on `prediction_grid`, given in cells
/// relative to `n0`. A periodic `cfg` avoids reflections during the long
/// runs needed for slow separations.
pub fn validate_against_lattice<F>(
    pulse: F,
    n0: f64,
    prediction_grid: &UniformGrid,
    cfg: &LatticeConfig,
    options: ValidationOptions,
) -> Result<ValidationReport, ScatteringError>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let line = LineParams {
        a: 1.0,
        r: cfg.r,
        c3: cfg.c3,
        c4: cfg.c4,
        v0: 1.0,
    };
    let samples = prediction_grid.sample(&pulse);
    let prediction = predict_amplitudes(&samples, prediction_grid, &line)?;
    let corrected_line = LineParams {
        r: lattice_effective_r(cfg.r),
        ..line
    };
    let lattice_corrected = predict_amplitudes(&samples, prediction_grid, &corrected_line)?;

    let peak = samples.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let pulse_width = samples.iter().filter(|x| x.abs() >= 0.5 * peak).count() as f64 * prediction_grid.spacing;
    let t_end = separation_time(&lattice_corrected.predicted_amplitudes, &line, pulse_width).max(separation_time(
        &prediction.predicted_amplitudes,
        &line,
        pulse_width,
    ));
    if t_end > options.t_bar_max {
        return Err(LatticeError::InvalidRun(format!(
            "separation needs t_bar = {t_end:.0}, above the limit {}",
            options.t_bar_max
        ))
        .into());
    }

    // right mover: φ̇ = -v0 ∂φ/∂x
    let dx = 1e-3;
    let n = cfg.n;
    let wrap = |i: usize| -> f64 {
        let x = i as f64 - n0;
        match cfg.boundary {
            Boundary::Periodic => x - (n as f64) * (x / n as f64).round(),
            Boundary::Fixed => x,
        }
    };
    let state = LatticeState::from_fn(n, |i| {
        let x = wrap(i);
        (pulse(x), -(pulse(x + dx) - pulse(x - dx)) / (2.0 * dx))
    });
    let traj = lattice::run(state, cfg, t_end, options.record_stride)?;
    let mut phi = traj.last().phi.clone();

    let count = prediction.predicted_amplitudes.len();
    let remnant_peak = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if count == 0 {
        return Ok(ValidationReport {
            prediction,
            lattice_corrected,
            emergent: Vec::new(),
            relative_errors: Vec::new(),
            relative_errors_corrected: Vec::new(),
            t_bar_end: traj.last().t_bar,
            remnant_peak,
        });
    }

    if cfg.boundary == Boundary::Periodic {
        // put the tallest peak at 3/4 of the ring so trailing solitons do not wrap
        let imax = (0..n).max_by(|&a, &b| phi[a].total_cmp(&phi[b])).unwrap_or(0);
        let shift = (imax + n - 3 * n / 4) % n;
        phi.rotate_left(shift);
    }
    let min_predicted = prediction
        .predicted_amplitudes
        .iter()
        .chain(&lattice_corrected.predicted_amplitudes)
        .fold(f64::INFINITY, |m, &a| m.min(a));
    // fewer emergent peaks than predicted is a result, not an error
    let mut peaks = find_peaks(&phi, 0..n, 1.0, 0.25 * min_predicted);
    peaks.sort_by(|a, b| b.2.total_cmp(&a.2));
    peaks.truncate(count);
    peaks.sort_by(|a, b| a.1.total_cmp(&b.1));
    let centers: Vec<f64> = peaks.iter().map(|p| p.1).collect();
    let mut emergent = windows_between(&centers, n)
        .into_iter()
        .map(|w| measure_pulse(&phi, w).map_err(|e| ScatteringError::Measurement(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    emergent.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    let errors = |pred: &[f64]| -> Vec<f64> { emergent.iter().zip(pred).map(|(m, p)| (m.amplitude - p) / p).collect() };
    Ok(ValidationReport {
        relative_errors: errors(&prediction.predicted_amplitudes),
        relative_errors_corrected: errors(&lattice_corrected.predicted_amplitudes),
        prediction,
        lattice_corrected,
        emergent,
        t_bar_end: traj.last().t_bar,
        remnant_peak,
    })
}
