//! Classical dynamics of a travelling-wave parametric amplifier built from
//! SNAIL unit cells.
//!
//! The crate follows one pipeline:
//!
//! * [`snail`]: the flux-biased SNAIL potential, its minimum and the
//!   normalized cubic/quartic coefficients `c3`, `c4`.
//! * [`lattice`]: the discrete circuit equations of the line, integrated with
//!   RK4 and an exact tridiagonal solve for the capacitive coupling term.
//! * [`soliton`]: closed-form KdV / mKdV solitons of the continuum limit and a
//!   residual check that they solve their evolution equations.
//! * [`horizon`]: probe velocity on a soliton background, the effective
//!   metric, horizon pairs, and linearized probe evolution on the lattice.
//! * [`scattering`]: soliton content of an injected pulse from the bound
//!   states of the associated Schrödinger operator.
//! * [`units`]: conversion of the dimensionless frame to SI.
//!
//! Dimensionless conventions used throughout the lattice code: positions are
//! in unit cells, time is `t̄ = ω₀ t`, so the linear long-wave speed is 1.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod grid;
pub mod horizon;
pub mod lattice;
pub mod par;
pub mod scattering;
pub mod snail;
pub mod soliton;
pub mod tridiag;
pub mod units;

pub use horizon::{HorizonReport, ProbeBackground};
pub use lattice::{Boundary, LatticeConfig, LatticeState, Simulator, Trajectory};
pub use par::Parallelism;
pub use snail::{SnailParams, TaylorCoeffs};
pub use soliton::{Direction, LineParams, SolitonKind, SolitonSpec};
pub use units::CircuitScales;
