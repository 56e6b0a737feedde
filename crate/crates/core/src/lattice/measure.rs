//! Peak, width and speed of a single pulse on the lattice.

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Trajectory;

/// Level `sech²(1)` at which the full width equals the soliton half-width
/// `w = 2/k` of a KdV profile.
pub const REFERENCE_WIDTH_LEVEL: f64 = 0.419_974_341_614_026_1;

/// Secondary extrema above this fraction of the main one count as peaks.
const PEAK_FRACTION: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("no interior extremum in cells {start}..{end}")]
    NoPeakInWindow { start: usize, end: usize },
    #[error("{count} extrema above half the peak in cells {start}..{end}")]
    MultiplePeaks { count: usize, start: usize, end: usize },
    #[error("pulse tail does not drop below {level} of the peak inside the window")]
    WidthOutsideWindow { level: f64 },
    #[error("trajectory has no snapshots")]
    EmptyTrajectory,
}

/// Shape of one pulse in one snapshot; lengths in cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    /// Interpolated extremal value, signed.
    pub amplitude: f64,
    pub center: f64,
    /// Full width at `REFERENCE_WIDTH_LEVEL` of the peak; equals `2/k` for an
    /// ideal KdV soliton.
    pub half_width: f64,
    /// Full width at half maximum.
    pub fwhm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolitonMeasurement {
    /// From the last snapshot.
    pub amplitude: f64,
    pub halfwidth_cells: f64,
    pub fwhm_cells: f64,
    /// `(t̄, center)` for every snapshot.
    pub centers: Vec<(f64, f64)>,
    /// Least-squares slope of the centers, cells per `t̄`, i.e. `v/v0`.
    /// `None` with fewer than two snapshots.
    pub velocity: Option<f64>,
}

/// Vertex of the parabola through three equally spaced samples, as
/// `(offset from the middle sample, value)`.
fn parabola_vertex(ym: f64, y0: f64, yp: f64) -> (f64, f64) {
    let curv = ym - 2.0 * y0 + yp;
    if curv == 0.0 {
        return (0.0, y0);
    }
    let off = 0.5 * (ym - yp) / curv;
    (off, y0 - 0.125 * (ym - yp) * (ym - yp) / curv)
}

/// Interior local maxima of `polarity * φ` in the window above `threshold`,
/// as `(cell, interpolated center, interpolated value)`.
pub fn find_peaks(phi: &[f64], window: Range<usize>, polarity: f64, threshold: f64) -> Vec<(usize, f64, f64)> {
    let start = window.start.max(1);
    let end = window.end.min(phi.len().saturating_sub(1));
    let mut peaks = Vec::new();
    for i in start..end {
        let (ym, y0, yp) = (polarity * phi[i - 1], polarity * phi[i], polarity * phi[i + 1]);
        if y0 > ym && y0 >= yp && y0 > threshold {
            let (off, v) = parabola_vertex(ym, y0, yp);
            peaks.push((i, i as f64 + off, polarity * v));
        }
    }
    peaks
}

fn crossing(phi: &[f64], from: usize, window: &Range<usize>, level: f64, polarity: f64, step: isize) -> Option<f64> {
    let mut i = from as isize;
    loop {
        let j = i + step;
        if j < window.start as isize || j >= window.end as isize {
            return None;
        }
        let (yi, yj) = (polarity * phi[i as usize], polarity * phi[j as usize]);
        if yj < level {
            let frac = (yi - level) / (yi - yj);
            return Some(i as f64 + step as f64 * frac);
        }
        i = j;
    }
}

/// Measures the single pulse in `window` of one snapshot.
pub fn measure_pulse(phi: &[f64], window: Range<usize>) -> Result<PulseShape, MeasureError> {
    let window = window.start..window.end.min(phi.len());
    let no_peak = MeasureError::NoPeakInWindow {
        start: window.start,
        end: window.end,
    };
    let (imax, &vmax) = phi[window.clone()]
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .ok_or(no_peak.clone())?;
    let imax = imax + window.start;
    if vmax == 0.0 || imax == window.start || imax + 1 == window.end {
        return Err(no_peak);
    }
    let polarity = vmax.signum();
    let peaks = find_peaks(phi, window.clone(), polarity, PEAK_FRACTION * vmax.abs());
    if peaks.len() > 1 {
        return Err(MeasureError::MultiplePeaks {
            count: peaks.len(),
            start: window.start,
            end: window.end,
        });
    }
    let (off, peak) = parabola_vertex(polarity * phi[imax - 1], polarity * vmax, polarity * phi[imax + 1]);
    let width_at = |fraction: f64| -> Result<f64, MeasureError> {
        let level = fraction * peak;
        let lo = crossing(phi, imax, &window, level, polarity, -1);
        let hi = crossing(phi, imax, &window, level, polarity, 1);
        match (lo, hi) {
            (Some(lo), Some(hi)) => Ok(hi - lo),
            _ => Err(MeasureError::WidthOutsideWindow { level: fraction }),
        }
    };
    Ok(PulseShape {
        amplitude: polarity * peak,
        center: imax as f64 + off,
        half_width: width_at(REFERENCE_WIDTH_LEVEL)?,
        fwhm: width_at(0.5)?,
    })
}

/// Least-squares slope of `y` against `x`.
pub(crate) fn ls_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Tracks one pulse through every snapshot. The window is fixed in cells, so
/// it must cover the whole path of the pulse.
pub fn measure_soliton(traj: &Trajectory, window: Range<usize>) -> Result<SolitonMeasurement, MeasureError> {
    let mut centers = Vec::with_capacity(traj.snapshots.len());
    let mut last = None;
    for s in &traj.snapshots {
        let shape = measure_pulse(&s.phi, window.clone())?;
        centers.push((s.t_bar, shape.center));
        last = Some(shape);
    }
    let last = last.ok_or(MeasureError::EmptyTrajectory)?;
    Ok(SolitonMeasurement {
        amplitude: last.amplitude,
        halfwidth_cells: last.half_width,
        fwhm_cells: last.fwhm,
        velocity: ls_slope(&centers),
        centers,
    })
}
