use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use glv_core::certificates::{dulac_triangle, GridSpec};
use glv_core::classify::{region_diagram, DiagramBox};
use glv_core::simulate::{integrate_batch, SimConfig};
use glv_core::{Execution, GlvSystem, Rates};
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn diagram(c: &mut Criterion) {
    let b = DiagramBox::standard();
    let mut g = c.benchmark_group("region_diagram");
    for (name, exec) in MODES {
        g.bench_function(name, |bn| bn.iter(|| region_diagram(black_box(&b), exec)));
    }
    g.finish();
}

fn dulac(c: &mut Criterion) {
    let mut g = c.benchmark_group("dulac_grid");
    for n in [101, 401] {
        let grid = GridSpec { points_per_axis: n, ..Default::default() };
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, n), &grid, |bn, grid| {
                bn.iter(|| dulac_triangle(1.5, 0.5, grid, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn trajectories(c: &mut Criterion) {
    let sys = GlvSystem::alpha_beta(1.25, 0.8, Rates::UNIT).unwrap();
    let starts: Vec<(f64, f64)> = (0..32).map(|i| (0.2 + 0.1 * i as f64, 1.5)).collect();
    let cfg = SimConfig::with_t_max(200.0);
    let mut g = c.benchmark_group("trajectory_fan");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |bn| bn.iter(|| integrate_batch(&sys, black_box(&starts), &cfg, exec)));
    }
    g.finish();
}

criterion_group!(benches, diagram, dulac, trajectories);
criterion_main!(benches);
