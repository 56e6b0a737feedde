//! Probe propagation on a soliton background.
//!
//! A weak probe `δφ` on top of a background `φ̄` travels at
//!
//! ```text
//! v(η) = v0 √(1 + c3 φ̄(η) + ½ c4 φ̄(η)²)
//! ```
//!
//! in the frame co-moving with the soliton. Where `v(η) = v_s` the probe
//! cannot outrun the soliton: these are the analogue horizons. All lengths
//! and speeds here are in the units of the soliton's [`LineParams`]
//! (cells and `v0 = 1` in the dimensionless frame).
//!
//! [`LineParams`]: crate::soliton::LineParams

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{LatticeConfig, LatticeError, LatticeState, LineOperator, Rk4, Trajectory};
use crate::soliton::{SolitonError, SolitonSpec};
use crate::units::{BOLTZMANN, HBAR};

/// Half-widths on each side of the center scanned for horizons.
pub const SCAN_HALF_WIDTHS: f64 = 6.0;
const SCAN_INTERVALS: usize = 4096;
/// Probe-to-background amplitude ratio above which linearization is suspect.
pub const PROBE_RATIO_WARNING: f64 = 0.1;

pub const TEMPERATURE_CONVENTION: &str =
    "T_H = hbar*kappa/(2*pi*k_B) with kappa = |dv/deta| at the horizon; the 2*pi normalization is a convention";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HorizonError {
    #[error("probe velocity is imaginary at eta = {eta}: 1 + c3*phi + c4*phi^2/2 = {radicand}")]
    ImaginaryVelocity { eta: f64, radicand: f64 },
    #[error("probe velocity never crosses the soliton speed {v_s} within the scanned range")]
    NoHorizon { v_s: f64 },
    #[error(transparent)]
    Soliton(#[from] SolitonError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("background has {got} cells, probe configuration expects {expected}")]
    BackgroundMismatch { expected: usize, got: usize },
}

fn radicand(s: &SolitonSpec, phi: f64) -> f64 {
    1.0 + s.line.c3 * phi + 0.5 * s.line.c4 * phi * phi
}

/// `v(η)` on the analytic background.
pub fn probe_velocity(s: &SolitonSpec, eta: f64) -> Result<f64, HorizonError> {
    let rad = radicand(s, s.phi_at_eta(eta));
    if !(rad > 0.0) {
        return Err(HorizonError::ImaginaryVelocity { eta, radicand: rad });
    }
    Ok(s.line.v0 * rad.sqrt())
}

/// `dv/dη` on the analytic background.
pub fn probe_velocity_gradient(s: &SolitonSpec, eta: f64) -> Result<f64, HorizonError> {
    let phi = s.phi_at_eta(eta);
    let v = probe_velocity(s, eta)?;
    let l = &s.line;
    Ok(l.v0 * l.v0 * (l.c3 + l.c4 * phi) * s.dphi_deta(eta) / (2.0 * v))
}

/// Analogue Hawking temperature in kelvin for a surface gravity in 1/s.
pub fn hawking_temperature(kappa_per_second: f64) -> f64 {
    HBAR * kappa_per_second / (2.0 * PI * BOLTZMANN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonKind {
    Black,
    White,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Behind the black horizon.
    I,
    /// Between the horizons.
    II,
    /// Beyond the white horizon.
    III,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub eta: f64,
    pub kind: HorizonKind,
    /// `|dv/dη|`, per line time unit.
    pub kappa: f64,
    /// `ħκ/(2πk_B)` reading `kappa` as 1/s.
    pub t_h: f64,
}

/// A region as an interval of `η`; `None` is unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpan {
    pub region: Region,
    pub eta_min: Option<f64>,
    pub eta_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonReport {
    pub v_s: f64,
    /// Sorted by `η`.
    pub horizons: Vec<Horizon>,
    pub regions: Vec<RegionSpan>,
    pub temperature_convention: String,
}

impl HorizonReport {
    pub fn black(&self) -> Option<&Horizon> {
        self.horizons.iter().find(|h| h.kind == HorizonKind::Black)
    }

    pub fn white(&self) -> Option<&Horizon> {
        self.horizons.iter().find(|h| h.kind == HorizonKind::White)
    }

    pub fn region_of(&self, eta: f64) -> Option<Region> {
        self.regions.iter().find_map(|r| {
            let above = r.eta_min.map_or(true, |lo| eta >= lo);
            let below = r.eta_max.map_or(true, |hi| eta < hi);
            (above && below).then_some(r.region)
        })
    }

    /// Reinterprets `kappa` as per `t̄` and fills `t_h` for the angular
    /// frequency `omega0` (rad/s) of the line.
    pub fn with_time_scale(mut self, omega0: f64) -> Self {
        for h in &mut self.horizons {
            h.t_h = hawking_temperature(h.kappa * omega0);
        }
        self
    }
}

/// Bisection on `v(η) - v_s` inside a bracket with a sign change.
fn bisect(s: &SolitonSpec, v_s: f64, mut lo: f64, mut hi: f64) -> Result<f64, HorizonError> {
    let f = |x: f64| probe_velocity(s, x).map(|v| v - v_s);
    let mut flo = f(lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let (rl, rh) = (f(lo)?.abs(), f(hi)?.abs());
    Ok(if rl <= rh { lo } else { hi })
}

/// Horizons of the analytic background, with black/white labels and the
/// regions they separate.
pub fn find_horizons(s: &SolitonSpec) -> Result<HorizonReport, HorizonError> {
    s.validate()?;
    let v_s = s.velocity();
    let span = SCAN_HALF_WIDTHS * s.half_width();
    let step = 2.0 * span / SCAN_INTERVALS as f64;
    let mut roots = Vec::new();
    let mut prev = (-span, probe_velocity(s, -span)? - v_s);
    for i in 1..=SCAN_INTERVALS {
        let x = -span + step * i as f64;
        let fx = probe_velocity(s, x)? - v_s;
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (fx > 0.0) != (prev.1 > 0.0) {
            roots.push(bisect(s, v_s, prev.0, x)?);
        }
        prev = (x, fx);
    }
    if roots.is_empty() {
        return Err(HorizonError::NoHorizon { v_s });
    }
    // trailing edge is behind the center in the direction of motion
    let sense = s.direction.sign();
    let mut horizons = roots
        .into_iter()
        .map(|eta| {
            let kappa = probe_velocity_gradient(s, eta)?.abs();
            let kind = if eta * sense < 0.0 {
                HorizonKind::Black
            } else {
                HorizonKind::White
            };
            Ok(Horizon {
                eta,
                kind,
                kappa,
                t_h: hawking_temperature(kappa),
            })
        })
        .collect::<Result<Vec<_>, HorizonError>>()?;
    horizons.sort_by(|a, b| a.eta.total_cmp(&b.eta));
    Ok(HorizonReport {
        v_s,
        regions: regions(&horizons, sense),
        horizons,
        temperature_convention: TEMPERATURE_CONVENTION.to_string(),
    })
}

fn regions(horizons: &[Horizon], sense: f64) -> Vec<RegionSpan> {
    let black = horizons.iter().find(|h| h.kind == HorizonKind::Black).map(|h| h.eta);
    let white = horizons.iter().find(|h| h.kind == HorizonKind::White).map(|h| h.eta);
    let (Some(b), Some(w)) = (black, white) else {
        return Vec::new();
    };
    let span = |region, lo, hi| RegionSpan {
        region,
        eta_min: lo,
        eta_max: hi,
    };
    if sense > 0.0 {
        vec![
            span(Region::I, None, Some(b)),
            span(Region::II, Some(b), Some(w)),
            span(Region::III, Some(w), None),
        ]
    } else {
        vec![
            span(Region::III, None, Some(w)),
            span(Region::II, Some(w), Some(b)),
            span(Region::I, Some(b), None),
        ]
    }
}

/// Inverse metric `g^{μν}` of the probe in `(t, η, y, z)` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveMetric {
    pub v: f64,
    pub v_s: f64,
    pub g: [[f64; 4]; 4],
}

impl EffectiveMetric {
    /// Determinant of the block-diagonal matrix: the `(t, η)` block times the
    /// transverse diagonal.
    pub fn determinant(&self) -> f64 {
        let g = &self.g;
        (g[0][0] * g[1][1] - g[0][1] * g[1][0]) * g[2][2] * g[3][3]
    }
}

pub fn metric_components(s: &SolitonSpec, eta: f64) -> Result<EffectiveMetric, HorizonError> {
    let v = probe_velocity(s, eta)?;
    let v_s = s.velocity();
    let inv = 1.0 / v;
    let mut g = [[0.0; 4]; 4];
    g[0][0] = -inv;
    g[0][1] = v_s * inv;
    g[1][0] = v_s * inv;
    g[1][1] = (v * v - v_s * v_s) * inv;
    g[2][2] = inv;
    g[3][3] = inv;
    Ok(EffectiveMetric { v, v_s, g })
}

/// Background field for a probe run.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeBackground {
    /// Analytic soliton centered at cell `n0` at `t̄ = 0`.
    Analytic { spec: SolitonSpec, n0: f64 },
    /// Recorded lattice run, interpolated in time.
    Recorded(Trajectory),
}

impl ProbeBackground {
    fn fill(&self, t_bar: f64, out: &mut [f64]) -> Result<(), HorizonError> {
        match self {
            ProbeBackground::Analytic { spec, n0 } => {
                let l = &spec.line;
                let t = t_bar / l.omega0();
                for (n, o) in out.iter_mut().enumerate() {
                    *o = spec.phi_at_eta(spec.eta(l.a * (n as f64 - n0), t));
                }
            }
            ProbeBackground::Recorded(traj) => traj.interpolate_phi(t_bar, out)?,
        }
        Ok(())
    }

    fn peak(&self) -> f64 {
        match self {
            ProbeBackground::Analytic { spec, .. } => spec.amplitude.abs(),
            ProbeBackground::Recorded(traj) => traj.snapshots[0].phi.iter().fold(0.0f64, |m, x| m.max(x.abs())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRun {
    pub trajectory: Trajectory,
    /// `max|δφ(0)| / max|φ̄|`.
    pub amplitude_ratio: f64,
}

/// Evolves the lattice equations linearized about the background,
///
/// ```text
/// δφ̈ - r D₂ δφ̈ = D₂[(1 + c3 φ̄ + (c4/2) φ̄²) δφ]
/// ```
///
/// with `c3`, `c4`, `r` and the boundary rule taken from `cfg`.
pub fn run_probe(
    background: &ProbeBackground,
    probe0: LatticeState,
    cfg: &LatticeConfig,
    t_bar_end: f64,
    record_stride: usize,
) -> Result<ProbeRun, HorizonError> {
    cfg.validate()?;
    if probe0.len() != cfg.n || probe0.phi_dot.len() != cfg.n {
        return Err(LatticeError::StateMismatch {
            expected: cfg.n,
            got: probe0.len(),
        }
        .into());
    }
    if let ProbeBackground::Recorded(traj) = background {
        if traj.config.n != cfg.n {
            return Err(HorizonError::BackgroundMismatch {
                expected: cfg.n,
                got: traj.config.n,
            });
        }
    }
    if record_stride == 0 {
        return Err(LatticeError::InvalidRun("record stride must be >= 1".into()).into());
    }
    let probe_peak = probe0.phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let bg_peak = background.peak();
    let amplitude_ratio = if bg_peak > 0.0 {
        probe_peak / bg_peak
    } else {
        f64::INFINITY
    };
    if amplitude_ratio > PROBE_RATIO_WARNING && probe_peak > 0.0 {
        log::warn!("probe/background amplitude ratio {amplitude_ratio:.3} exceeds {PROBE_RATIO_WARNING}");
    }

    let op = LineOperator::new(cfg)?;
    let mut rk = Rk4::new(cfg.n);
    let mut bg = vec![0.0; cfg.n];
    let mut flux = vec![0.0; cfg.n];
    let (c3, c4) = (cfg.c3, cfg.c4);

    let t0 = probe0.t_bar;
    let steps = ((t_bar_end - t0) / cfg.dt_bar - 1e-9).ceil().max(0.0) as u64;
    let mut state = probe0;
    let mut snapshots = vec![state.clone()];
    let mut failure = None;
    for k in 1..=steps {
        let t = state.t_bar;
        let LatticeState { phi, phi_dot, .. } = &mut state;
        rk.step(phi, phi_dot, t, cfg.dt_bar, |tt, x, out| {
            if let Err(e) = background.fill(tt, &mut bg) {
                failure = Some(e);
                return Err(LatticeError::InvalidRun("background unavailable".into()));
            }
            for i in 0..x.len() {
                let b = bg[i];
                flux[i] = (1.0 + b * (c3 + 0.5 * c4 * b)) * x[i];
            }
            op.apply(&flux, out)
        })
        .map_err(|e| failure.take().unwrap_or(HorizonError::Lattice(e)))?;
        state.t_bar = t0 + k as f64 * cfg.dt_bar;
        if !state.is_finite() {
            return Err(LatticeError::NonFiniteState {
                step: k,
                t_bar: state.t_bar,
            }
            .into());
        }
        if k % record_stride as u64 == 0 || k == steps {
            snapshots.push(state.clone());
        }
    }
    Ok(ProbeRun {
        trajectory: Trajectory {
            config: *cfg,
            record_stride,
            snapshots,
        },
        amplitude_ratio,
    })
}

/// Gaussian probe packet `ε exp(-(n-c)²/2σ²)` with `δφ̇` set for a
/// right-moving long wave of unit speed.
pub fn gaussian_packet(n_cells: usize, center: f64, sigma: f64, epsilon: f64) -> LatticeState {
    LatticeState::from_fn(n_cells, |n| {
        let x = (n as f64 - center) / sigma;
        let phi = epsilon * (-0.5 * x * x).exp();
        (phi, phi * x / sigma)
    })
}

/// Cell where the box-smoothed energy proxy `δφ̇² + (Δδφ)²` peaks.
pub fn packet_center(state: &LatticeState, smoothing: usize) -> f64 {
    let n = state.len();
    let e: Vec<f64> = (0..n)
        .map(|i| {
            let grad = if i + 1 < n {
                state.phi[i + 1] - state.phi[i]
            } else {
                0.0
            };
            state.phi_dot[i].powi(2) + grad * grad
        })
        .collect();
    let mut best = (0usize, f64::NEG_INFINITY);
    let mut acc: f64 = e[..smoothing.min(n)].iter().sum();
    for i in 0..n.saturating_sub(smoothing) + 1 {
        if i > 0 {
            acc += e.get(i + smoothing - 1).copied().unwrap_or(0.0) - e[i - 1];
        }
        if acc > best.1 {
            best = (i, acc);
        }
    }
    best.0 as f64 + 0.5 * (smoothing.max(1) - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub t_bar: f64,
    pub center_cell: f64,
    pub eta: f64,
    pub region: Option<Region>,
}

/// Where the probe packet sits relative to the horizons over a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingAudit {
    pub entries: Vec<AuditEntry>,
    pub initial_region: Option<Region>,
    pub left_initial_region: bool,
    pub min_eta: f64,
    pub max_eta: f64,
}

/// Tracks the packet center in the co-moving coordinate of an analytic
/// soliton placed at cell `n0`.
pub fn audit_crossings(
    probe: &Trajectory,
    spec: &SolitonSpec,
    n0: f64,
    report: &HorizonReport,
    smoothing: usize,
) -> CrossingAudit {
    let l = &spec.line;
    let entries: Vec<AuditEntry> = probe
        .snapshots
        .iter()
        .map(|s| {
            let c = packet_center(s, smoothing);
            let eta = spec.eta(l.a * (c - n0), s.t_bar / l.omega0());
            AuditEntry {
                t_bar: s.t_bar,
                center_cell: c,
                eta,
                region: report.region_of(eta),
            }
        })
        .collect();
    let initial_region = entries.first().and_then(|e| e.region);
    CrossingAudit {
        left_initial_region: entries.iter().any(|e| e.region != initial_region),
        min_eta: entries.iter().map(|e| e.eta).fold(f64::INFINITY, f64::min),
        max_eta: entries.iter().map(|e| e.eta).fold(f64::NEG_INFINITY, f64::max),
        initial_region,
        entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::{Direction, LineParams, SolitonKind};

    fn default_kdv() -> SolitonSpec {
        SolitonSpec::kdv(0.02, 0.0, LineParams::dimensionless(0.1, 0.32, 0.0)).unwrap()
    }

    #[test]
    fn velocity_limits_and_peak() {
        let s = default_kdv();
        assert!((probe_velocity(&s, 1e4).unwrap() - 1.0).abs() < 1e-15);
        let v0 = probe_velocity(&s, 0.0).unwrap();
        assert!((v0 - 1.0064f64.sqrt()).abs() < 1e-14);
        assert!(v0 > s.velocity());
    }

    #[test]
    fn kink_background_velocity() {
        let line = LineParams::dimensionless(0.1, 0.0, -0.4);
        let s = SolitonSpec::new(SolitonKind::MkdvMinus, 0.2, 0.0, Direction::Right, line).unwrap();
        assert!((probe_velocity(&s, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let far = probe_velocity(&s, 1e4).unwrap();
        assert!((far - (1.0 - 0.4 * 0.04 / 2.0f64).sqrt()).abs() < 1e-14);
        assert!(far < s.velocity());
        let rep = find_horizons(&s).unwrap();
        assert_eq!(rep.horizons.len(), 2);
        assert!((rep.horizons[0].eta + rep.horizons[1].eta).abs() < 1e-9);
    }

    #[test]
    fn imaginary_velocity_is_rejected() {
        // a kink whose far field drives 1 + c4 A²/2 below zero
        let line = LineParams::dimensionless(0.1, 0.0, -2.0);
        let s = SolitonSpec::new(SolitonKind::MkdvMinus, 1.5, 0.0, Direction::Right, line).unwrap();
        assert!(probe_velocity(&s, 0.0).is_ok());
        assert!(matches!(
            probe_velocity(&s, 1e4),
            Err(HorizonError::ImaginaryVelocity { .. })
        ));
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let s = default_kdv();
        for eta in [-20.0, -5.0, 3.0, 15.7] {
            let h = 1e-4;
            let fd = (probe_velocity(&s, eta + h).unwrap() - probe_velocity(&s, eta - h).unwrap()) / (2.0 * h);
            let an = probe_velocity_gradient(&s, eta).unwrap();
            assert!((fd - an).abs() < 1e-10, "{eta}: {fd} vs {an}");
        }
    }

    #[test]
    fn default_horizons_match_closed_form() {
        let s = default_kdv();
        let rep = find_horizons(&s).unwrap();
        assert_eq!(rep.horizons.len(), 2);
        let c3a = 0.32 * 0.02;
        let target = ((1.0 + c3a / 6.0f64).powi(2) - 1.0) / c3a;
        let eta_h = (1.0 / target.sqrt()).acosh() / s.wavenumber();
        let (b, w) = (rep.black().unwrap(), rep.white().unwrap());
        assert!((b.eta + eta_h).abs() < 1e-9 && (w.eta - eta_h).abs() < 1e-9);
        assert!((w.eta - 15.7).abs() < 0.1);
        for h in &rep.horizons {
            assert!((probe_velocity(&s, h.eta).unwrap() - rep.v_s).abs() <= 1e-12);
        }
        assert!((b.kappa - w.kappa).abs() <= 1e-12 * b.kappa);
        assert_eq!(rep.region_of(-30.0), Some(Region::I));
        assert_eq!(rep.region_of(0.0), Some(Region::II));
        assert_eq!(rep.region_of(30.0), Some(Region::III));
    }

    #[test]
    fn left_mover_swaps_labels() {
        let s = default_kdv().with_direction(Direction::Left);
        let rep = find_horizons(&s).unwrap();
        assert!(rep.black().unwrap().eta > 0.0);
        assert_eq!(rep.region_of(30.0), Some(Region::I));
        assert_eq!(rep.region_of(-30.0), Some(Region::III));
    }

    #[test]
    fn horizons_persist_for_small_amplitudes() {
        for a in [1e-3, 1e-2, 1e-1] {
            let s = SolitonSpec::kdv(a, 0.0, LineParams::dimensionless(0.1, 0.32, 0.0)).unwrap();
            assert_eq!(find_horizons(&s).unwrap().horizons.len(), 2, "A = {a}");
        }
    }

    #[test]
    fn zero_amplitude_has_no_horizon() {
        let mut s = default_kdv();
        s.amplitude = 0.0;
        assert!(find_horizons(&s).is_err());
    }

    #[test]
    fn metric_identities() {
        let s = default_kdv();
        let rep = find_horizons(&s).unwrap();
        for h in &rep.horizons {
            let m = metric_components(&s, h.eta).unwrap();
            assert!((m.g[1][1] * m.v).abs() <= 1e-10);
        }
        for eta in [-40.0, -10.0, 0.0, 7.5, 1e4] {
            let m = metric_components(&s, eta).unwrap();
            assert!((m.determinant() + 1.0 / (m.v * m.v)).abs() <= 1e-12);
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(m.g[i][j], m.g[j][i]);
                }
            }
        }
        let far = metric_components(&s, 1e4).unwrap();
        assert!((far.v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn temperature_scales_linearly() {
        let t1 = hawking_temperature(1e9);
        assert!((hawking_temperature(2e9) - 2.0 * t1).abs() < 1e-24);
        assert!((t1 - 1.0546e-34 * 1e9 / (2.0 * PI * 1.380649e-23)).abs() / t1 < 1e-4);
    }

    #[test]
    fn packet_center_finds_gaussian() {
        let p = gaussian_packet(200, 73.0, 4.0, 1e-4);
        assert!((packet_center(&p, 9) - 73.0).abs() <= 1.0);
    }
}
