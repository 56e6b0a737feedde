use stwpa::horizon::{gaussian_packet, run_probe, ProbeBackground};
use stwpa::lattice::{self, Boundary, LatticeConfig};
use stwpa::scattering::{validate_against_lattice, ValidationOptions};
use stwpa::soliton::{LineParams, SolitonSpec, UniformGrid};

fn sech2(x: f64) -> f64 {
    1.0 / x.cosh().powi(2)
}

#[test]
fn probe_on_vacuum_is_the_linear_line() {
    let cfg = LatticeConfig::new(300, 0.1, 0.32, -0.1);
    let tiny = SolitonSpec::kdv(1e-300, 0.0, LineParams::dimensionless(0.1, 0.32, 0.0)).unwrap();
    let bg = ProbeBackground::Analytic { spec: tiny, n0: -1e6 };
    let p0 = gaussian_packet(300, 100.0, 5.0, 1e-3);
    let probe = run_probe(&bg, p0.clone(), &cfg, 60.0, 600).unwrap();
    let linear = lattice::run(p0, &LatticeConfig::new(300, 0.1, 0.0, 0.0), 60.0, 600).unwrap();
    let diff = probe
        .trajectory
        .last()
        .phi
        .iter()
        .zip(&linear.last().phi)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff < 1e-10, "{diff:e}");
}

#[test]
fn recorded_background_must_match_the_line() {
    let cfg = LatticeConfig::new(50, 0.1, 0.32, 0.0);
    let traj = lattice::run(
        gaussian_packet(40, 20.0, 3.0, 0.01),
        &LatticeConfig::new(40, 0.1, 0.32, 0.0),
        1.0,
        5,
    )
    .unwrap();
    assert!(run_probe(
        &ProbeBackground::Recorded(traj),
        gaussian_packet(50, 20.0, 3.0, 1e-4),
        &cfg,
        1.0,
        5
    )
    .is_err());
}

fn ring() -> LatticeConfig {
    LatticeConfig::new(512, 0.1, 0.32, 0.0).with_boundary(Boundary::Periodic)
}

#[test]
fn matched_soliton_emerges_unchanged() {
    let k = (0.32f64 * 0.02 / 1.2).sqrt();
    let grid = UniformGrid::spanning(-12.0 / k, 12.0 / k, 961);
    let rep = validate_against_lattice(
        |x| 0.02 * sech2(k * x),
        256.0,
        &grid,
        &ring(),
        ValidationOptions::default(),
    )
    .unwrap();
    assert_eq!(rep.emergent.len(), 1);
    assert!(rep.relative_errors[0].abs() < 0.02, "{:?}", rep.relative_errors);
}

#[test]
fn zero_input_gives_no_solitons() {
    let grid = UniformGrid::spanning(-100.0, 100.0, 401);
    let rep = validate_against_lattice(|_| 0.0, 256.0, &grid, &ring(), ValidationOptions::default()).unwrap();
    assert!(rep.prediction.predicted_amplitudes.is_empty());
    assert!(rep.emergent.is_empty());
    assert_eq!(rep.remnant_peak, 0.0);
}

#[test]
fn low_pulse_only_disperses() {
    let k = 0.4;
    let amp = 1e-4;
    let grid = UniformGrid::spanning(-12.0 / k, 12.0 / k, 961);
    let rep = validate_against_lattice(
        |x| amp * sech2(k * x),
        256.0,
        &grid,
        &ring(),
        ValidationOptions::default(),
    )
    .unwrap();
    assert!(rep.prediction.predicted_amplitudes.is_empty());
    assert!(rep.emergent.is_empty());
    assert!(rep.remnant_peak < 0.9 * amp, "{}", rep.remnant_peak);
}
