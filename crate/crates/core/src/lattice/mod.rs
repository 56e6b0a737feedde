//! The discrete circuit equations of the SNAIL line,
//!
//! ```text
//! φ̈ₙ - r (φ̈ₙ₊₁ - 2φ̈ₙ + φ̈ₙ₋₁) = Δ²[φ + (c3/2) φ² + (c4/6) φ³]ₙ
//! ```
//!
//! in dimensionless time `t̄ = ω₀ t`. The capacitive coupling makes the
//! acceleration implicit; every evaluation solves `(I - r D₂) φ̈ = D₂ f(φ)`
//! exactly with a (cyclic) tridiagonal factorization built once per run.
//! Time stepping is classical RK4 on `(φ, φ̇)`.

mod collision;
pub mod io;
mod measure;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Parallelism};
use crate::soliton::{self, SolitonKind, SolitonSpec};
use crate::tridiag::{CyclicTridiagonalLu, SolveError, TridiagonalLu};

pub use collision::{run_collision, CollisionReport};
pub use measure::{
    find_peaks, measure_pulse, measure_soliton, MeasureError, PulseShape, SolitonMeasurement, REFERENCE_WIDTH_LEVEL,
};

/// Smallest supported line.
pub const MIN_CELLS: usize = 8;
/// Default time step in units of `1/ω₀`.
pub const DEFAULT_DT_BAR: f64 = 0.05;
/// Default number of steps between recorded snapshots.
pub const DEFAULT_RECORD_STRIDE: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("invalid lattice configuration: {0}")]
    InvalidConfig(String),
    #[error("state has {got} cells, configuration expects {expected}")]
    StateMismatch { expected: usize, got: usize },
    #[error("mass-matrix solve failed: {0}")]
    SolveFailed(#[from] SolveError),
    #[error("state became non-finite at step {step} (t_bar = {t_bar})")]
    NonFiniteState { step: u64, t_bar: f64 },
    #[error("invalid run request: {0}")]
    InvalidRun(String),
}

/// Boundary rule for the discrete Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Boundary {
    /// Virtual nodes `φ₀ = φ_{N+1} = 0` at both ends.
    #[default]
    Fixed,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    pub n: usize,
    pub r: f64,
    pub c3: f64,
    pub c4: f64,
    pub boundary: Boundary,
    pub dt_bar: f64,
    /// Cell length in meters; only used for unit-bearing output.
    pub a: f64,
}

impl LatticeConfig {
    pub fn new(n: usize, r: f64, c3: f64, c4: f64) -> Self {
        Self {
            n,
            r,
            c3,
            c4,
            boundary: Boundary::Fixed,
            dt_bar: DEFAULT_DT_BAR,
            a: 1.0,
        }
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_dt(mut self, dt_bar: f64) -> Self {
        self.dt_bar = dt_bar;
        self
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let bad = |msg: String| Err(LatticeError::InvalidConfig(msg));
        if self.n < MIN_CELLS {
            return bad(format!("N = {} is below the minimum {MIN_CELLS}", self.n));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return bad(format!("r = {} must be finite and >= 0", self.r));
        }
        if !(self.c3.is_finite() && self.c4.is_finite()) {
            return bad("c3 and c4 must be finite".into());
        }
        if !(self.dt_bar > 0.0 && self.dt_bar.is_finite()) {
            return bad(format!("dt_bar = {} must be positive", self.dt_bar));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("a = {} must be positive", self.a));
        }
        Ok(())
    }

    /// Highest linear frequency of the line, `2/√(1+4r)` in units of ω₀.
    pub fn max_frequency(&self) -> f64 {
        2.0 / (1.0 + 4.0 * self.r).sqrt()
    }

    /// Nonlinear flux function `f(φ) = φ + (c3/2)φ² + (c4/6)φ³`.
    pub fn flux(&self, phi: f64) -> f64 {
        phi * (1.0 + phi * (0.5 * self.c3 + phi * self.c4 / 6.0))
    }
}

/// Instantaneous state of the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeState {
    pub t_bar: f64,
    pub phi: Vec<f64>,
    /// `dφ/dt̄`.
    pub phi_dot: Vec<f64>,
}

impl LatticeState {
    pub fn zeros(n: usize) -> Self {
        Self {
            t_bar: 0.0,
            phi: vec![0.0; n],
            phi_dot: vec![0.0; n],
        }
    }

    /// State from a per-cell closure returning `(φ, φ̇)`.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> (f64, f64)) -> Self {
        let (phi, phi_dot) = (0..n).map(f).unzip();
        Self {
            t_bar: 0.0,
            phi,
            phi_dot,
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.t_bar.is_finite() && self.phi.iter().all(|x| x.is_finite()) && self.phi_dot.iter().all(|x| x.is_finite())
    }

    fn check(&self, cfg: &LatticeConfig) -> Result<(), LatticeError> {
        for got in [self.phi.len(), self.phi_dot.len()] {
            if got != cfg.n {
                return Err(LatticeError::StateMismatch { expected: cfg.n, got });
            }
        }
        Ok(())
    }
}

/// `M⁻¹ D₂` for one line, with `M = I - r D₂`.
#[derive(Debug, Clone)]
pub(crate) struct LineOperator {
    boundary: Boundary,
    mass: Mass,
}

#[derive(Debug, Clone)]
enum Mass {
    Identity,
    Fixed(TridiagonalLu),
    Periodic(CyclicTridiagonalLu),
}

impl LineOperator {
    pub(crate) fn new(cfg: &LatticeConfig) -> Result<Self, LatticeError> {
        cfg.validate()?;
        let (d, o) = (1.0 + 2.0 * cfg.r, -cfg.r);
        let mass = if cfg.r == 0.0 {
            Mass::Identity
        } else {
            match cfg.boundary {
                Boundary::Fixed => Mass::Fixed(TridiagonalLu::constant(cfg.n, d, o)?),
                Boundary::Periodic => Mass::Periodic(CyclicTridiagonalLu::constant(cfg.n, d, o)?),
            }
        };
        Ok(Self {
            boundary: cfg.boundary,
            mass,
        })
    }

    /// `out = D₂ g`.
    pub(crate) fn second_difference(&self, g: &[f64], out: &mut [f64]) {
        let n = g.len();
        for i in 1..n - 1 {
            out[i] = g[i + 1] - 2.0 * g[i] + g[i - 1];
        }
        let (left, right) = match self.boundary {
            Boundary::Fixed => (0.0, 0.0),
            Boundary::Periodic => (g[n - 1], g[0]),
        };
        out[0] = g[1] - 2.0 * g[0] + left;
        out[n - 1] = right - 2.0 * g[n - 1] + g[n - 2];
    }

    /// `out = M⁻¹ D₂ g`.
    pub(crate) fn apply(&self, g: &[f64], out: &mut [f64]) -> Result<(), LatticeError> {
        self.second_difference(g, out);
        match &self.mass {
            Mass::Identity => {}
            Mass::Fixed(lu) => lu.solve_in_place(out)?,
            Mass::Periodic(lu) => lu.solve_in_place(out)?,
        }
        Ok(())
    }
}

/// Accelerations `d²φ/dt̄²` for a state.
pub fn accelerations(state: &LatticeState, cfg: &LatticeConfig) -> Result<Vec<f64>, LatticeError> {
    state.check(cfg)?;
    let op = LineOperator::new(cfg)?;
    let g: Vec<f64> = state.phi.iter().map(|&p| cfg.flux(p)).collect();
    let mut out = vec![0.0; cfg.n];
    op.apply(&g, &mut out)?;
    Ok(out)
}

/// Scratch space for one RK4 step of a second-order system.
#[derive(Debug, Clone)]
pub(crate) struct Rk4 {
    acc: [Vec<f64>; 4],
    vel: [Vec<f64>; 3],
    pos: Vec<f64>,
}

impl Rk4 {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            acc: std::array::from_fn(|_| vec![0.0; n]),
            vel: std::array::from_fn(|_| vec![0.0; n]),
            pos: vec![0.0; n],
        }
    }

    /// Advances `(x, v)` from `t` to `t + dt` with `ẍ = accel(t, x)`.
    pub(crate) fn step<F>(
        &mut self,
        x: &mut [f64],
        v: &mut [f64],
        t: f64,
        dt: f64,
        mut accel: F,
    ) -> Result<(), LatticeError>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<(), LatticeError>,
    {
        let half = 0.5 * dt;
        let [a1, a2, a3, a4] = &mut self.acc;
        let [v2, v3, v4] = &mut self.vel;
        let pos = &mut self.pos;

        accel(t, x, a1)?;

        for i in 0..x.len() {
            pos[i] = x[i] + half * v[i];
            v2[i] = v[i] + half * a1[i];
        }
        accel(t + half, pos, a2)?;

        for i in 0..x.len() {
            pos[i] = x[i] + half * v2[i];
            v3[i] = v[i] + half * a2[i];
        }
        accel(t + half, pos, a3)?;

        for i in 0..x.len() {
            pos[i] = x[i] + dt * v3[i];
            v4[i] = v[i] + dt * a3[i];
        }
        accel(t + dt, pos, a4)?;

        let sixth = dt / 6.0;
        for i in 0..x.len() {
            x[i] += sixth * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
            v[i] += sixth * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
        Ok(())
    }
}

/// Owns one line and its state; advances it with RK4.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: LatticeConfig,
    op: LineOperator,
    state: LatticeState,
    t0: f64,
    steps: u64,
    rk: Rk4,
    flux: Vec<f64>,
}

impl Simulator {
    pub fn new(cfg: LatticeConfig, state: LatticeState) -> Result<Self, LatticeError> {
        cfg.validate()?;
        state.check(&cfg)?;
        if !state.is_finite() {
            return Err(LatticeError::NonFiniteState {
                step: 0,
                t_bar: state.t_bar,
            });
        }
        Ok(Self {
            op: LineOperator::new(&cfg)?,
            rk: Rk4::new(cfg.n),
            flux: vec![0.0; cfg.n],
            t0: state.t_bar,
            steps: 0,
            state,
            cfg,
        })
    }

    pub fn config(&self) -> &LatticeConfig {
        &self.cfg
    }

    pub fn state(&self) -> &LatticeState {
        &self.state
    }

    pub fn into_state(self) -> LatticeState {
        self.state
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    pub fn step(&mut self) -> Result<(), LatticeError> {
        let Self {
            cfg,
            op,
            state,
            rk,
            flux,
            ..
        } = self;
        rk.step(
            &mut state.phi,
            &mut state.phi_dot,
            state.t_bar,
            cfg.dt_bar,
            |_, phi, out| {
                for (g, &p) in flux.iter_mut().zip(phi) {
                    *g = cfg.flux(p);
                }
                op.apply(flux, out)
            },
        )?;
        self.steps += 1;
        // t̄ from the step count, not by accumulation
        self.state.t_bar = self.t0 + self.steps as f64 * self.cfg.dt_bar;
        if !self.state.is_finite() {
            return Err(LatticeError::NonFiniteState {
                step: self.steps,
                t_bar: self.state.t_bar,
            });
        }
        Ok(())
    }

    pub fn advance(&mut self, steps: u64) -> Result<(), LatticeError> {
        for _ in 0..steps {
            self.step()?;
        }
        Ok(())
    }
}

/// One RK4 step.
pub fn step(state: &LatticeState, cfg: &LatticeConfig) -> Result<LatticeState, LatticeError> {
    let mut sim = Simulator::new(*cfg, state.clone())?;
    sim.step()?;
    Ok(sim.into_state())
}

/// Recorded snapshots of a run plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: LatticeConfig,
    pub record_stride: usize,
    pub snapshots: Vec<LatticeState>,
}

impl Trajectory {
    pub fn last(&self) -> &LatticeState {
        self.snapshots
            .last()
            .expect("a trajectory always holds its initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t_bar).collect()
    }

    /// Background field `φₙ(t̄)` by cubic Hermite interpolation in time per
    /// cell, using the recorded `φ̇` as the slope.
    pub fn interpolate_phi(&self, t_bar: f64, out: &mut [f64]) -> Result<(), LatticeError> {
        let snaps = &self.snapshots;
        let (first, last) = (snaps[0].t_bar, self.last().t_bar);
        let tol = 1e-9 * (1.0 + last.abs());
        if t_bar < first - tol || t_bar > last + tol {
            return Err(LatticeError::InvalidRun(format!(
                "t_bar = {t_bar} outside the recorded range [{first}, {last}]"
            )));
        }
        if snaps.len() == 1 {
            out.copy_from_slice(&snaps[0].phi);
            return Ok(());
        }
        let j = snaps.partition_point(|s| s.t_bar <= t_bar).clamp(1, snaps.len() - 1);
        let (s0, s1) = (&snaps[j - 1], &snaps[j]);
        let h = s1.t_bar - s0.t_bar;
        let u = ((t_bar - s0.t_bar) / h).clamp(0.0, 1.0);
        let (u2, u3) = (u * u, u * u * u);
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        for (i, o) in out.iter_mut().enumerate() {
            *o = h00 * s0.phi[i] + h10 * h * s0.phi_dot[i] + h01 * s1.phi[i] + h11 * h * s1.phi_dot[i];
        }
        Ok(())
    }
}

fn step_count(t_start: f64, t_end: f64, dt: f64) -> Result<u64, LatticeError> {
    let span = t_end - t_start;
    if !(span >= 0.0) {
        return Err(LatticeError::InvalidRun(format!(
            "end time {t_end} precedes start time {t_start}"
        )));
    }
    Ok((span / dt - 1e-9).ceil().max(0.0) as u64)
}

/// Integrates to `t_bar_end` (rounded up to a whole step), recording every
/// `record_stride` steps plus the initial and final states.
pub fn run(
    state: LatticeState,
    cfg: &LatticeConfig,
    t_bar_end: f64,
    record_stride: usize,
) -> Result<Trajectory, LatticeError> {
    if record_stride == 0 {
        return Err(LatticeError::InvalidRun("record stride must be >= 1".into()));
    }
    let steps = step_count(state.t_bar, t_bar_end, cfg.dt_bar)?;
    let mut sim = Simulator::new(*cfg, state)?;
    let mut snapshots = vec![sim.state().clone()];
    for k in 1..=steps {
        sim.step()?;
        if k % record_stride as u64 == 0 || k == steps {
            snapshots.push(sim.state().clone());
        }
    }
    Ok(Trajectory {
        config: *cfg,
        record_stride,
        snapshots,
    })
}

/// One independent run for [`run_batch`].
#[derive(Debug, Clone)]
pub struct RunJob {
    pub state: LatticeState,
    pub config: LatticeConfig,
    pub t_bar_end: f64,
    pub record_stride: usize,
}

/// Independent runs, spread over the rayon pool when allowed. Each run is
/// single-threaded, so results are identical in both modes.
pub fn run_batch(jobs: &[RunJob], parallelism: Parallelism) -> Vec<Result<Trajectory, LatticeError>> {
    par::map(jobs, parallelism, |job| {
        run(job.state.clone(), &job.config, job.t_bar_end, job.record_stride)
    })
}

/// Soliton placed on the lattice with its center at cell `n0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub spec: SolitonSpec,
    pub n0: f64,
}

/// A seeded soliton whose tail reaches a fixed boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceWarning {
    pub index: usize,
    pub n0: f64,
    pub needed_cells: f64,
}

/// Clearance from fixed ends, in reference half-widths.
pub const SEED_CLEARANCE_WIDTHS: f64 = 3.0;

/// Samples analytic solitons onto the cells, `φₙ = Σ φ̄(a(n - n0), 0)`.
///
/// Each spec's own `direction` sets the sign of its `φ̇` contribution, so a
/// left mover enters the sum as `-φ̇ʳ`. Specs should use
/// [`crate::LineParams::dimensionless`] so that lengths are in cells and
/// `φ̇` comes out per `t̄`; other units are rescaled by `a/v0`.
pub fn seed_initial_state(
    placements: &[Placement],
    cfg: &LatticeConfig,
) -> Result<(LatticeState, Vec<ClearanceWarning>), LatticeError> {
    cfg.validate()?;
    let mut state = LatticeState::zeros(cfg.n);
    let mut warnings = Vec::new();
    for (index, p) in placements.iter().enumerate() {
        let spec = p.spec.with_center(0.0);
        spec.validate()
            .map_err(|e| LatticeError::InvalidConfig(format!("soliton {index}: {e}")))?;
        let line = spec.line;
        let per_t_bar = line.a / line.v0;
        for n in 0..cfg.n {
            let pt = soliton::profile(&spec, line.a * (n as f64 - p.n0), 0.0);
            state.phi[n] += pt.phi;
            state.phi_dot[n] += pt.phi_dot * per_t_bar;
        }
        if cfg.boundary == Boundary::Fixed {
            let needed = SEED_CLEARANCE_WIDTHS * spec.half_width() / line.a;
            let kink = spec.kind == SolitonKind::MkdvMinus;
            if kink || p.n0 - needed < 0.0 || p.n0 + needed > (cfg.n - 1) as f64 {
                log::warn!(
                    "soliton {index} at n0 = {} needs {needed:.1} cells of clearance on an {}-cell fixed line",
                    p.n0,
                    cfg.n
                );
                warnings.push(ClearanceWarning {
                    index,
                    n0: p.n0,
                    needed_cells: needed,
                });
            }
        }
    }
    Ok((state, warnings))
}

/// Momentum-like sums `Σφₙ` and `Σφ̇ₙ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedSums {
    pub sum_phi: f64,
    pub sum_phi_dot: f64,
}

/// Under periodic boundaries `Σφ̈ₙ = 0` identically, so `Σφ̇ₙ` is conserved
/// and `Σφₙ` is affine in `t̄`. With fixed ends the sums are only reported.
pub fn conserved_sums(state: &LatticeState) -> ConservedSums {
    ConservedSums {
        sum_phi: state.phi.iter().sum(),
        sum_phi_dot: state.phi_dot.iter().sum(),
    }
}
