//! Head-on collision of two solitons with automatic detection of the moment
//! they have separated again.

use serde::{Deserialize, Serialize};

use super::measure::{find_peaks, measure_pulse, PulseShape};
use super::{seed_initial_state, LatticeConfig, LatticeError, Placement, Simulator, Trajectory};

/// Separation, in reference half-widths of the wider soliton, at which the
/// pair counts as separated.
pub const SEPARATION_WIDTHS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    /// `[right mover, left mover]` at `t̄ = 0`.
    pub before: [PulseShape; 2],
    /// `[right mover, left mover]` once separated.
    pub after: [PulseShape; 2],
    /// Smallest resolved distance between the two peaks, cells.
    pub closest_approach: f64,
    pub t_separated: f64,
    pub trajectory: Trajectory,
}

fn split_measure(phi: &[f64], lo_center: f64, hi_center: f64) -> Result<[PulseShape; 2], LatticeError> {
    let mid = (0.5 * (lo_center + hi_center)).round() as usize;
    let left = measure_pulse(phi, 0..mid).map_err(|e| LatticeError::InvalidRun(format!("left pulse: {e}")))?;
    let right =
        measure_pulse(phi, mid..phi.len()).map_err(|e| LatticeError::InvalidRun(format!("right pulse: {e}")))?;
    Ok([left, right])
}

/// Seeds a right mover left of a left mover and runs until they have passed
/// through each other and are again `SEPARATION_WIDTHS` half-widths apart.
/// Both solitons must share the same polarity.
pub fn run_collision(
    cfg: &LatticeConfig,
    right_mover: Placement,
    left_mover: Placement,
    t_bar_max: f64,
    record_stride: usize,
) -> Result<CollisionReport, LatticeError> {
    if right_mover.n0 >= left_mover.n0 {
        return Err(LatticeError::InvalidRun(
            "the right mover must start to the left of the left mover".into(),
        ));
    }
    if record_stride == 0 {
        return Err(LatticeError::InvalidRun("record stride must be >= 1".into()));
    }
    let (state, _) = seed_initial_state(&[right_mover, left_mover], cfg)?;
    let [r0, l0] = split_measure(&state.phi, right_mover.n0, left_mover.n0)?;
    let before = [r0, l0];

    let a = right_mover.spec.line.a;
    let w_max = right_mover.spec.half_width().max(left_mover.spec.half_width()) / a;
    let polarity = right_mover.spec.amplitude.signum();
    let threshold = 0.25 * r0.amplitude.abs().min(l0.amplitude.abs());
    let initial_sep = left_mover.n0 - right_mover.n0;

    let mut sim = Simulator::new(*cfg, state)?;
    let mut snapshots = vec![sim.state().clone()];
    let mut closest = initial_sep;
    let mut merged = false;
    let max_steps = (t_bar_max / cfg.dt_bar).ceil() as u64;
    let mut k = 0u64;
    while k < max_steps {
        sim.advance(record_stride as u64)?;
        k += record_stride as u64;
        let phi = &sim.state().phi;
        snapshots.push(sim.state().clone());
        let peaks = find_peaks(phi, 0..phi.len(), polarity, threshold);
        if peaks.len() < 2 {
            merged = true;
            closest = 0.0;
            continue;
        }
        // the two tallest peaks
        let mut top = peaks.clone();
        top.sort_by(|x, y| (polarity * y.2).total_cmp(&(polarity * x.2)));
        let (mut c1, mut c2) = (top[0].1, top[1].1);
        if c1 > c2 {
            std::mem::swap(&mut c1, &mut c2);
        }
        let sep = c2 - c1;
        closest = closest.min(sep);
        if sep < SEPARATION_WIDTHS * w_max {
            merged = true;
        }
        if merged && sep >= SEPARATION_WIDTHS * w_max {
            // after passing, the right mover is the rightmost pulse
            let [left_side, right_side] = split_measure(phi, c1, c2)?;
            return Ok(CollisionReport {
                before,
                after: [right_side, left_side],
                closest_approach: closest,
                t_separated: sim.state().t_bar,
                trajectory: Trajectory {
                    config: *cfg,
                    record_stride,
                    snapshots,
                },
            });
        }
    }
    Err(LatticeError::InvalidRun(format!(
        "solitons did not collide and separate before t_bar = {t_bar_max}"
    )))
}
