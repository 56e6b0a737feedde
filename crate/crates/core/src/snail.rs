//! SNAIL potential, its local minimum and the flux-dependent nonlinear
//! coefficients.
//!
//! Energies are in units of the large-junction Josephson energy `E_J`:
//!
//! ```text
//! U(φ) = -α cos φ - 2 cos((φ - φ_ext)/2)
//! ```
//!
//! The additive constant is fixed to zero. In φ the potential has period 4π;
//! shifting both φ and φ_ext by 2π leaves it unchanged, so the Taylor
//! coefficients have period 2π in φ_ext once the minimum is followed along
//! the shift (see the `periodicity` tests).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::par::{self, Parallelism};

/// Number of intervals in the bracketing scan over `[φ_ext - 2π, φ_ext + 2π]`.
const SCAN_INTERVALS: usize = 2048;
/// Required stationarity of a returned minimum.
pub const MINIMUM_TOLERANCE: f64 = 1e-12;
/// Required magnitude of the selected coefficient at a returned flux root.
pub const FLUX_ROOT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnailError {
    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),
    #[error("external flux phase must be finite, got {0}")]
    NonFiniteFlux(f64),
    #[error("no potential minimum in [{lo}, {hi}] for alpha = {alpha}, phi_ext = {phi_ext}")]
    NoMinimumFound { alpha: f64, phi_ext: f64, lo: f64, hi: f64 },
    #[error("{which} has the same sign at both ends of [{lo}, {hi}] ({f_lo:e}, {f_hi:e})")]
    NoSignChange {
        which: Coefficient,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("bisection for the {which} zero stalled at phi_ext = {phi_ext} with residual {residual:e}")]
    RootNotConverged {
        which: Coefficient,
        phi_ext: f64,
        residual: f64,
    },
}

/// Flux-bias configuration of one SNAIL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnailParams {
    /// Small-to-large junction Josephson energy ratio, in (0, 1).
    pub alpha: f64,
    /// External flux phase `2π Φ_ext / Φ₀` in radians. Not canonicalized.
    pub phi_ext: f64,
}

impl SnailParams {
    pub fn new(alpha: f64, phi_ext: f64) -> Result<Self, SnailError> {
        let p = Self { alpha, phi_ext };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SnailError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SnailError::AlphaOutOfRange(self.alpha));
        }
        if !self.phi_ext.is_finite() {
            return Err(SnailError::NonFiniteFlux(self.phi_ext));
        }
        Ok(())
    }

    fn half_angle(&self, phi: f64) -> f64 {
        0.5 * (phi - self.phi_ext)
    }

    /// `U(φ)` in units of `E_J`.
    pub fn potential(&self, phi: f64) -> f64 {
        -self.alpha * phi.cos() - 2.0 * self.half_angle(phi).cos()
    }

    /// `dU/dφ`.
    pub fn d1(&self, phi: f64) -> f64 {
        self.alpha * phi.sin() + self.half_angle(phi).sin()
    }

    /// `d²U/dφ²`.
    pub fn d2(&self, phi: f64) -> f64 {
        self.alpha * phi.cos() + 0.5 * self.half_angle(phi).cos()
    }

    /// `d³U/dφ³`.
    pub fn d3(&self, phi: f64) -> f64 {
        -self.alpha * phi.sin() - 0.25 * self.half_angle(phi).sin()
    }

    /// `d⁴U/dφ⁴`.
    pub fn d4(&self, phi: f64) -> f64 {
        -self.alpha * phi.cos() - 0.125 * self.half_angle(phi).cos()
    }
}

/// Taylor expansion of the potential about its local minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub phi_star: f64,
    pub alpha_tilde: f64,
    pub beta_tilde: f64,
    pub gamma_tilde: f64,
    pub c3: f64,
    pub c4: f64,
}

/// Which normalized nonlinear coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficient {
    C3,
    C4,
}

impl std::fmt::Display for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::C3 => f.write_str("c3"),
            Coefficient::C4 => f.write_str("c4"),
        }
    }
}

impl TaylorCoeffs {
    pub fn get(&self, which: Coefficient) -> f64 {
        match which {
            Coefficient::C3 => self.c3,
            Coefficient::C4 => self.c4,
        }
    }
}

/// `U(φ)` in units of `E_J` with the additive constant dropped.
pub fn potential_energy(phi: f64, p: &SnailParams) -> f64 {
    p.potential(phi)
}

/// Local minimum of the potential nearest to `guess`.
///
/// Scans `dU/dφ` over `[φ_ext - 2π, φ_ext + 2π]` for upward sign changes,
/// bisects each bracket, then applies a Newton polish with the analytic
/// second derivative.
pub fn find_minimum(p: &SnailParams, guess: f64) -> Result<f64, SnailError> {
    p.validate()?;
    let lo = p.phi_ext - 2.0 * PI;
    let hi = p.phi_ext + 2.0 * PI;
    let step = (hi - lo) / SCAN_INTERVALS as f64;

    let mut best: Option<f64> = None;
    let mut x0 = lo;
    let mut f0 = p.d1(x0);
    for i in 1..=SCAN_INTERVALS {
        let x1 = lo + step * i as f64;
        let f1 = p.d1(x1);
        if f0 < 0.0 && f1 >= 0.0 {
            if let Some(root) = polish_minimum(p, x0, x1) {
                let closer = best.map_or(true, |b| (root - guess).abs() < (b - guess).abs());
                if closer {
                    best = Some(root);
                }
            }
        }
        x0 = x1;
        f0 = f1;
    }
    best.ok_or(SnailError::NoMinimumFound {
        alpha: p.alpha,
        phi_ext: p.phi_ext,
        lo,
        hi,
    })
}

fn polish_minimum(p: &SnailParams, mut lo: f64, mut hi: f64) -> Option<f64> {
    // invariant: d1(lo) < 0 <= d1(hi)
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.d1(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = if p.d1(hi) == 0.0 { hi } else { 0.5 * (lo + hi) };
    for _ in 0..3 {
        let g = p.d1(x);
        if g == 0.0 {
            break;
        }
        let next = x - g / p.d2(x);
        if !next.is_finite() || p.d1(next).abs() >= g.abs() {
            break;
        }
        x = next;
    }
    (p.d1(x).abs() < MINIMUM_TOLERANCE && p.d2(x) > 0.0).then_some(x)
}

/// Coefficients about the minimum nearest to `guess`.
pub fn taylor_coefficients_near(p: &SnailParams, guess: f64) -> Result<TaylorCoeffs, SnailError> {
    let phi_star = find_minimum(p, guess)?;
    let alpha_tilde = p.d2(phi_star);
    let beta_tilde = p.d3(phi_star);
    let gamma_tilde = p.d4(phi_star);
    Ok(TaylorCoeffs {
        phi_star,
        alpha_tilde,
        beta_tilde,
        gamma_tilde,
        c3: beta_tilde / alpha_tilde,
        c4: gamma_tilde / alpha_tilde,
    })
}

/// Coefficients about the minimum nearest to `φ_ext`.
///
/// For small α the two-junction term dominates and pins the minimum close to
/// φ_ext, so this selects the branch that is continuous in φ_ext and odd
/// about φ_ext = 0.
pub fn taylor_coefficients(p: &SnailParams) -> Result<TaylorCoeffs, SnailError> {
    taylor_coefficients_near(p, p.phi_ext)
}

/// One row of a flux sweep. `coeffs` is `None` when no minimum was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi_ext: f64,
    pub coeffs: Option<TaylorCoeffs>,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.coeffs.is_some()
    }
}

fn sweep_point(alpha: f64, phi_ext: f64, guess: f64) -> SweepRow {
    let coeffs = SnailParams::new(alpha, phi_ext)
        .and_then(|p| taylor_coefficients_near(&p, guess))
        .ok();
    SweepRow { phi_ext, coeffs }
}

/// `(c3, c4)` along a grid of flux biases, following one minimum branch.
///
/// Sequentially each point is seeded with the previous point's minimum. The
/// parallel path first runs that continuation on a coarse subgrid, then
/// seeds every point from the nearest preceding coarse minimum.
pub fn flux_sweep(alpha: f64, grid: &[f64], parallelism: Parallelism) -> Vec<SweepRow> {
    if grid.is_empty() {
        return Vec::new();
    }
    if !parallelism.is_parallel() {
        return continuation(alpha, grid);
    }

    let stride = ((grid.len() as f64).sqrt().ceil() as usize).max(1);
    let coarse_grid: Vec<f64> = grid.iter().copied().step_by(stride).collect();
    let coarse = continuation(alpha, &coarse_grid);
    let indices: Vec<usize> = (0..grid.len()).collect();
    par::map(&indices, parallelism, |&i| {
        let phi_ext = grid[i];
        let seed = coarse[i / stride]
            .coeffs
            .map_or(phi_ext, |c| c.phi_star + (phi_ext - coarse[i / stride].phi_ext));
        sweep_point(alpha, phi_ext, seed)
    })
}

fn continuation(alpha: f64, grid: &[f64]) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(grid.len());
    let mut prev: Option<(f64, f64)> = None;
    for &phi_ext in grid {
        let guess = prev.map_or(phi_ext, |(pe, ps)| ps + (phi_ext - pe));
        let row = sweep_point(alpha, phi_ext, guess);
        if let Some(c) = row.coeffs {
            prev = Some((phi_ext, c.phi_star));
        }
        rows.push(row);
    }
    rows
}

/// Uniform grid of `points` flux values over `[min, max]`, endpoints included.
pub fn flux_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        n => (0..n).map(|i| min + (max - min) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn coefficient_at(which: Coefficient, alpha: f64, phi_ext: f64) -> Result<f64, SnailError> {
    let p = SnailParams::new(alpha, phi_ext)?;
    Ok(taylor_coefficients(&p)?.get(which))
}

/// Flux bias inside `bracket` at which the selected coefficient vanishes.
pub fn find_flux_for_zero(which: Coefficient, alpha: f64, bracket: (f64, f64)) -> Result<f64, SnailError> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut f_lo = coefficient_at(which, alpha, lo)?;
    let f_hi = coefficient_at(which, alpha, hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(SnailError::NoSignChange {
            which,
            lo,
            hi,
            f_lo,
            f_hi,
        });
    }

    let mut best = (lo, f_lo.abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f_mid = coefficient_at(which, alpha, mid)?;
        if f_mid.abs() < best.1 {
            best = (mid, f_mid.abs());
        }
        if f_mid == 0.0 || mid <= lo || mid >= hi {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if best.1 < FLUX_ROOT_TOLERANCE {
        Ok(best.0)
    } else {
        Err(SnailError::RootNotConverged {
            which,
            phi_ext: best.0,
            residual: best.1,
        })
    }
}
