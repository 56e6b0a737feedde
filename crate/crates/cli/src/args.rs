//! Argument groups shared by several subcommands.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use stwpa::lattice::LatticeConfig;
use stwpa::scattering::lattice_effective_r;
use stwpa::soliton::{Direction, LineParams, SolitonKind, SolitonSpec};
use stwpa::units::{derive_scales, DEFAULT_DEVICE};
use stwpa::{Boundary, CircuitScales};

use crate::error::{param, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Kdv,
    MkdvPlus,
    MkdvMinus,
}

impl From<KindArg> for SolitonKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Kdv => SolitonKind::Kdv,
            KindArg::MkdvPlus => SolitonKind::MkdvPlus,
            KindArg::MkdvMinus => SolitonKind::MkdvMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionArg {
    Right,
    Left,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Right => Direction::Right,
            DirectionArg::Left => Direction::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryArg {
    Fixed,
    Periodic,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Fixed => Boundary::Fixed,
            BoundaryArg::Periodic => Boundary::Periodic,
        }
    }
}

/// Dimensionless line: capacitance ratio and nonlinear coefficients.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct LineArgs {
    /// Capacitance ratio C_J / C_g.
    #[arg(long, default_value_t = 0.1)]
    pub r: f64,
    /// Cubic coefficient c3.
    #[arg(long, default_value_t = 0.32, allow_negative_numbers = true)]
    pub c3: f64,
    /// Quartic coefficient c4.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c4: f64,
}

impl LineArgs {
    pub fn line(&self) -> LineParams {
        LineParams::dimensionless(self.r, self.c3, self.c4)
    }

    pub fn lattice(&self, cells: usize, boundary: BoundaryArg, dt: f64) -> Result<LatticeConfig, CliError> {
        let cfg = LatticeConfig::new(cells, self.r, self.c3, self.c4)
            .with_boundary(boundary.into())
            .with_dt(dt);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolitonArgs {
    /// Soliton family.
    #[arg(long, value_enum, default_value_t = KindArg::Kdv)]
    pub kind: KindArg,
    /// Peak flux amplitude A (radians).
    #[arg(long, default_value_t = 0.02, allow_negative_numbers = true)]
    pub amplitude: f64,
    #[arg(long, value_enum, default_value_t = DirectionArg::Right)]
    pub direction: DirectionArg,
}

impl SolitonArgs {
    pub fn spec(&self, line: LineParams, x0: f64) -> Result<SolitonSpec, CliError> {
        Ok(SolitonSpec::new(
            self.kind.into(),
            self.amplitude,
            x0,
            self.direction.into(),
            line,
        )?)
    }

    /// Seed whose width follows the lattice's effective dispersion
    /// `r + 1/12` when `matched` is set.
    pub fn seed(&self, line: LineParams, matched: bool) -> Result<SolitonSpec, CliError> {
        let line = if matched {
            LineParams {
                r: lattice_effective_r(line.r),
                ..line
            }
        } else {
            line
        };
        self.spec(line, 0.0)
    }
}

/// Device parameters for SI conversion.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DeviceArgs {
    /// Shunt capacitance C_g (F).
    #[arg(long, default_value_t = DEFAULT_DEVICE.0)]
    pub c_g: f64,
    /// Junction capacitance C_J (F).
    #[arg(long, default_value_t = DEFAULT_DEVICE.1)]
    pub c_j: f64,
    /// Large-junction critical current I_c (A).
    #[arg(long, default_value_t = DEFAULT_DEVICE.2)]
    pub i_c: f64,
    /// Cell length a (m).
    #[arg(long, default_value_t = DEFAULT_DEVICE.3)]
    pub cell_length: f64,
    /// Normalized second derivative of the SNAIL potential at its minimum.
    #[arg(long, default_value_t = DEFAULT_DEVICE.4)]
    pub alpha_tilde: f64,
}

impl DeviceArgs {
    pub fn scales(&self) -> Result<CircuitScales, CliError> {
        Ok(derive_scales(
            self.c_g,
            self.c_j,
            self.i_c,
            self.cell_length,
            self.alpha_tilde,
        )?)
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SiArgs {
    /// Write outputs in SI units (seconds, meters, volts).
    #[arg(long)]
    pub si: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub device: DeviceArgs,
}

impl SiArgs {
    /// Scales when `--si` is set. Warns when the device's C_J / C_g
    /// disagrees with the line's `r`.
    pub fn scales(&self, r: f64) -> Result<Option<CircuitScales>, CliError> {
        if !self.si {
            return Ok(None);
        }
        let s = self.device.scales()?;
        if ((s.r - r) / r).abs() > 1e-9 {
            log::warn!("device C_J/C_g = {} differs from the line's r = {r}", s.r);
        }
        Ok(Some(s))
    }
}

pub fn positive(name: &str, value: f64) -> Result<f64, CliError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(param(format!("{name} must be positive and finite, got {value}")))
    }
}

pub fn at_least(name: &str, value: usize, min: usize) -> Result<usize, CliError> {
    if value >= min {
        Ok(value)
    } else {
        Err(param(format!("{name} must be at least {min}, got {value}")))
    }
}
