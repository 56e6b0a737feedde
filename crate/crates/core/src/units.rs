//! SI scales of the line and the observable size of a KdV soliton.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Elementary charge (C), exact in the 2019 SI.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Planck constant (J s), exact in the 2019 SI.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant ħ = h / 2π (J s).
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant (J/K), exact in the 2019 SI.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Magnetic flux quantum Φ₀ = h / 2e (Wb).
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Reduced flux quantum ħ / 2e (Wb).
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELEMENTARY_CHARGE);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitsError {
    #[error("{name} must be positive and finite, got {value}")]
    NonPositiveInput { name: &'static str, value: f64 },
    #[error("no KdV soliton for c3 * A = {0} <= 0")]
    InvalidPolarity(f64),
}

/// Circuit parameters and the scales they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitScales {
    /// Shunt capacitance (F).
    pub c_g: f64,
    /// Junction capacitance (F).
    pub c_j: f64,
    /// Critical current of a large junction (A).
    pub i_c: f64,
    /// Cell length (m).
    pub a: f64,
    pub alpha_tilde: f64,
    /// `ħ / (2e I_c α̃)` (H).
    pub l0: f64,
    /// `1/√(L0 C_g)` (rad/s).
    pub omega0: f64,
    /// `a ω₀` (m/s).
    pub v0: f64,
    /// `C_J / C_g`.
    pub r: f64,
}

/// Device values used for the soliton estimates: 100 fF shunts, 10 fF
/// junctions, 1.5 µA, 10 µm cells, α̃ = 0.37.
pub const DEFAULT_DEVICE: (f64, f64, f64, f64, f64) = (100e-15, 10e-15, 1.5e-6, 10e-6, 0.37);

pub fn derive_scales(c_g: f64, c_j: f64, i_c: f64, a: f64, alpha_tilde: f64) -> Result<CircuitScales, UnitsError> {
    for (name, value) in [
        ("C_g", c_g),
        ("C_J", c_j),
        ("I_c", i_c),
        ("a", a),
        ("alpha_tilde", alpha_tilde),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            return Err(UnitsError::NonPositiveInput { name, value });
        }
    }
    let l0 = REDUCED_FLUX_QUANTUM / (i_c * alpha_tilde);
    let omega0 = 1.0 / (l0 * c_g).sqrt();
    Ok(CircuitScales {
        c_g,
        c_j,
        i_c,
        a,
        alpha_tilde,
        l0,
        omega0,
        v0: a * omega0,
        r: c_j / c_g,
    })
}

impl CircuitScales {
    pub fn device_default() -> Self {
        let (c_g, c_j, i_c, a, at) = DEFAULT_DEVICE;
        derive_scales(c_g, c_j, i_c, a, at).expect("default device parameters are positive")
    }

    pub fn time_si(&self, t_bar: f64) -> f64 {
        t_bar / self.omega0
    }

    pub fn time_bar(&self, t_si: f64) -> f64 {
        t_si * self.omega0
    }

    /// Position of cell coordinate `n` in meters.
    pub fn length_si(&self, cells: f64) -> f64 {
        cells * self.a
    }

    pub fn length_cells(&self, meters: f64) -> f64 {
        meters / self.a
    }

    /// `dφ/dt` in 1/s from `dφ/dt̄`.
    pub fn rate_si(&self, phi_dot_bar: f64) -> f64 {
        phi_dot_bar * self.omega0
    }

    pub fn rate_bar(&self, phi_dot_si: f64) -> f64 {
        phi_dot_si / self.omega0
    }

    /// Josephson voltage `(ħ/2e) dφ/dt` across one cell.
    pub fn cell_voltage(&self, phi_dot_bar: f64) -> f64 {
        REDUCED_FLUX_QUANTUM * self.rate_si(phi_dot_bar)
    }

    /// `ħ ω₀ / 2e`, the voltage scale of the line (V).
    pub fn voltage_scale(&self) -> f64 {
        REDUCED_FLUX_QUANTUM * self.omega0
    }
}

/// Measurable size of a KdV soliton of amplitude `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonObservables {
    /// Peak voltage (V).
    pub v_peak: f64,
    /// Reference half-width `2a√(12r / c3 A)` (m).
    pub half_width_m: f64,
    /// Temporal width at a fixed point, half-width over speed (s).
    pub delta_t: f64,
    /// Soliton speed (m/s).
    pub v_s: f64,
}

pub fn soliton_observables(amplitude: f64, c3: f64, scales: &CircuitScales) -> Result<SolitonObservables, UnitsError> {
    let strength = c3 * amplitude;
    if !(strength > 0.0) {
        return Err(UnitsError::InvalidPolarity(strength));
    }
    let boost = 1.0 + strength / 6.0;
    let v_s = scales.v0 * boost;
    let half_width_m = 2.0 * scales.a * (12.0 * scales.r / strength).sqrt();
    Ok(SolitonObservables {
        v_peak: scales.voltage_scale() * boost * amplitude,
        half_width_m,
        delta_t: half_width_m / v_s,
        v_s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_device_scales() {
        let s = CircuitScales::device_default();
        assert!((REDUCED_FLUX_QUANTUM - 3.291e-16).abs() < 1e-19);
        assert!((s.r - 0.1).abs() < 1e-15);
        assert!((s.l0 - 0.593e-9).abs() < 0.001e-9, "{}", s.l0);
        assert!((s.omega0 / 1.30e11 - 1.0).abs() < 0.005, "{}", s.omega0);
        assert!((s.v0 / 1.30e6 - 1.0).abs() < 0.005);
    }

    #[test]
    fn scaling_laws() {
        let base = derive_scales(1e-13, 1e-13, 1e-6, 1e-5, 0.5).unwrap();
        assert_eq!(base.r, 1.0);
        let doubled = derive_scales(1e-13, 1e-13, 2e-6, 1e-5, 0.5).unwrap();
        assert!((doubled.l0 / base.l0 - 0.5).abs() < 1e-15);
        assert!((doubled.omega0 / base.omega0 - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        assert_eq!(
            derive_scales(0.0, 1e-14, 1e-6, 1e-5, 0.37),
            Err(UnitsError::NonPositiveInput {
                name: "C_g",
                value: 0.0
            })
        );
        assert!(derive_scales(1e-13, 1e-14, -1e-6, 1e-5, 0.37).is_err());
        let s = CircuitScales::device_default();
        assert!(matches!(
            soliton_observables(-0.02, 0.32, &s),
            Err(UnitsError::InvalidPolarity(_))
        ));
    }

    #[test]
    fn soliton_estimates() {
        let s = CircuitScales::device_default();
        let o = soliton_observables(0.02, 0.32, &s).unwrap();
        assert!((o.v_peak / 0.86e-6 - 1.0).abs() < 0.02, "{}", o.v_peak);
        assert!((o.delta_t / 0.21e-9 - 1.0).abs() < 0.02, "{}", o.delta_t);
        assert!((o.half_width_m / s.a - 27.4).abs() < 0.05);
    }

    proptest! {
        #[test]
        fn si_round_trip(t in 0.0f64..1e4, n in -1e3f64..1e3, rate in -1.0f64..1.0) {
            let s = CircuitScales::device_default();
            let t2 = s.time_bar(s.time_si(t));
            let n2 = s.length_cells(s.length_si(n));
            let r2 = s.rate_bar(s.rate_si(rate));
            prop_assert!((t2 - t).abs() <= 4.0 * f64::EPSILON * t.abs());
            prop_assert!((n2 - n).abs() <= 4.0 * f64::EPSILON * n.abs());
            prop_assert!((r2 - rate).abs() <= 4.0 * f64::EPSILON * rate.abs());
        }

        #[test]
        fn peak_voltage_is_linear_to_first_order(amp in 1e-4f64..0.1, c3 in 0.05f64..0.5) {
            let s = CircuitScales::device_default();
            let o = soliton_observables(amp, c3, &s).unwrap();
            let scale = s.voltage_scale();
            let rel = (o.v_peak / amp - scale).abs() / scale;
            prop_assert!(rel <= c3 * amp / 6.0 + 1e-12);
        }
    }
}
