use stwpa::lattice::{
    self, conserved_sums, measure_soliton, seed_initial_state, Boundary, LatticeConfig, LatticeState, Placement,
};
use stwpa::scattering::lattice_effective_r;
use stwpa::soliton::{Direction, LineParams, SolitonKind, SolitonSpec};

fn gaussian(n: usize, center: f64, sigma: f64, amp: f64) -> LatticeState {
    LatticeState::from_fn(n, |i| {
        let x = (i as f64 - center) / sigma;
        let phi = amp * (-0.5 * x * x).exp();
        (phi, phi * x / sigma)
    })
}

#[test]
fn linear_pulse_disperses() {
    let cfg = LatticeConfig::new(600, 0.1, 0.0, 0.0);
    let traj = lattice::run(gaussian(600, 150.0, 5.0, 0.02), &cfg, 250.0, 500).unwrap();
    let peaks: Vec<f64> = traj
        .snapshots
        .iter()
        .map(|s| s.phi.iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
}

#[test]
fn runs_are_bitwise_reproducible() {
    let cfg = LatticeConfig::new(200, 0.1, 0.32, -0.05);
    let a = lattice::run(gaussian(200, 60.0, 6.0, 0.03), &cfg, 40.0, 50).unwrap();
    let b = lattice::run(gaussian(200, 60.0, 6.0, 0.03), &cfg, 40.0, 50).unwrap();
    for (x, y) in a.snapshots.iter().zip(&b.snapshots) {
        assert!(x.phi.iter().zip(&y.phi).all(|(p, q)| p.to_bits() == q.to_bits()));
    }
}

#[test]
fn snapshot_reseeds_exactly() {
    let cfg = LatticeConfig::new(120, 0.1, 0.32, 0.0);
    let full = lattice::run(gaussian(120, 40.0, 5.0, 0.02), &cfg, 20.0, 200).unwrap();
    let mid = full.snapshots[1].clone();
    let resumed = lattice::run(mid, &cfg, 20.0, 200).unwrap();
    assert_eq!(resumed.last().phi, full.last().phi);
}

#[test]
fn flux_sum_drifts_linearly_on_a_ring() {
    let cfg = LatticeConfig::new(400, 0.1, 0.32, -0.1).with_boundary(Boundary::Periodic);
    let s0 = LatticeState::from_fn(400, |i| {
        let x = (i as f64 - 200.0) / 8.0;
        let phi = 0.03 * (-0.5 * x * x).exp();
        (phi, 0.5 * phi)
    });
    let c0 = conserved_sums(&s0);
    assert!(c0.sum_phi_dot.abs() > 1e-3);
    let traj = lattice::run(s0, &cfg, 100.0, 100).unwrap();
    for s in &traj.snapshots {
        let c = conserved_sums(s);
        assert!((c.sum_phi - (c0.sum_phi + c0.sum_phi_dot * s.t_bar)).abs() < 1e-10);
    }
}

/// Speed of a seed whose width uses the lattice's own dispersion, over a
/// 150-cell transit on a ring.
fn lattice_speed(kind: SolitonKind, amplitude: f64, c3: f64, c4: f64) -> f64 {
    let r = 0.1;
    let seed_line = LineParams::dimensionless(lattice_effective_r(r), c3, c4);
    let spec = SolitonSpec::new(kind, amplitude, 0.0, Direction::Right, seed_line).unwrap();
    let cfg = LatticeConfig::new(600, r, c3, c4).with_boundary(Boundary::Periodic);
    let (s0, _) = seed_initial_state(&[Placement { spec, n0: 200.0 }], &cfg).unwrap();
    let traj = lattice::run(s0, &cfg, 150.0, 50).unwrap();
    measure_soliton(&traj, 0..600).unwrap().velocity.unwrap()
}

#[test]
fn kdv_speed_with_lattice_matched_width() {
    let v = lattice_speed(SolitonKind::Kdv, 0.02, 0.32, 0.0);
    let expected = 1.0 + 0.32 * 0.02 / 6.0;
    assert!((v / expected - 1.0).abs() < 5e-5, "{v} vs {expected}");
}

#[test]
fn bright_mkdv_speed_on_the_lattice() {
    // excess speed c4 A²/24, not c4 A²/12
    let (a, c4) = (0.3, 0.25);
    let excess = lattice_speed(SolitonKind::MkdvPlus, a, 0.0, c4) - 1.0;
    let expected = c4 * a * a / 24.0;
    assert!((excess / expected - 1.0).abs() < 0.1, "{excess} vs {expected}");
}

#[test]
fn pulse_measurement_on_the_lattice_tracks_a_left_mover() {
    let line = LineParams::dimensionless(0.1, 0.32, 0.0);
    let spec = SolitonSpec::kdv(0.02, 0.0, lattice_line(line))
        .unwrap()
        .with_direction(Direction::Left);
    let cfg = LatticeConfig::new(400, 0.1, 0.32, 0.0);
    let (s0, _) = seed_initial_state(&[Placement { spec, n0: 300.0 }], &cfg).unwrap();
    let traj = lattice::run(s0, &cfg, 100.0, 100).unwrap();
    let v = measure_soliton(&traj, 0..400).unwrap().velocity.unwrap();
    assert!((v + spec.velocity()).abs() < 1e-3, "{v}");
}

fn lattice_line(line: LineParams) -> LineParams {
    LineParams {
        r: lattice_effective_r(line.r),
        ..line
    }
}
