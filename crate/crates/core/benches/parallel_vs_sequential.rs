use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stwpa::lattice::{run_batch, LatticeConfig, LatticeState, RunJob};
use stwpa::scattering::spectrum_details;
use stwpa::snail::{flux_grid, flux_sweep};
use stwpa::soliton::UniformGrid;
use stwpa::Parallelism;

const MODES: [(&str, Parallelism); 2] = [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)];

fn sweep(c: &mut Criterion) {
    let grid = flux_grid(0.0, 2.0 * std::f64::consts::PI, 2001);
    let mut g = c.benchmark_group("flux_sweep");
    for (name, mode) in MODES {
        g.bench_function(name, |b| b.iter(|| flux_sweep(0.2, black_box(&grid), mode)));
    }
    g.finish();
}

fn batch(c: &mut Criterion) {
    let jobs: Vec<RunJob> = (0..8)
        .map(|i| {
            let config = LatticeConfig::new(400, 0.1, 0.32, -0.004);
            let amp = 0.01 + 0.005 * i as f64;
            let state = LatticeState::from_fn(400, |n| {
                let x = (n as f64 - 100.0) / 6.0;
                let phi = amp * (-0.5 * x * x).exp();
                (phi, phi * x / 6.0)
            });
            RunJob {
                state,
                config,
                t_bar_end: 20.0,
                record_stride: 100,
            }
        })
        .collect();
    let mut g = c.benchmark_group("run_batch");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_with_input(BenchmarkId::new(name, jobs.len()), &jobs, |b, jobs| {
            b.iter(|| run_batch(jobs, mode))
        });
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let grid = UniformGrid::spanning(-300.0, 300.0, 4001);
    let potential: Vec<f64> = grid.points().map(|x| -0.01 / (0.06 * x).cosh().powi(2)).collect();
    let mut g = c.benchmark_group("spectrum_details");
    for (name, mode) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| spectrum_details(black_box(&potential), &grid, mode).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, batch, spectrum);
criterion_main!(benches);
