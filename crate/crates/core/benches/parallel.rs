//! Sequential against parallel execution on the two hot paths: the quartic
//! Monte Carlo traces and the GP criticality scan.

use std::f64::consts::PI;
use std::hint::black_box;
use std::sync::Arc;

use bcsgp::bcs::{build_pair_kernel, quartic_trace_mc, McConfig, PairProfile};
use bcsgp::gp::{criticality_scan, solve_trap_ground, MinimizerConfig};
use bcsgp::{Exec, Interaction, PhysicsModel, RadialFunction, RadialGrid, Trap};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn modes() -> [(&'static str, Exec); 2] {
    [("Sequential", Exec::Sequential), ("Parallel", Exec::Parallel)]
}

fn quartic(c: &mut Criterion) {
    let grid = Arc::new(RadialGrid::uniform(8.0, 2000).unwrap());
    let psi = RadialFunction::from_fn(grid, |r| (2.0 / PI).powf(0.75) * (-r * r).exp());
    let profile = Arc::new(PairProfile::gaussian(0.5, 0.7, 12.0, 2400).unwrap());
    let kernel = build_pair_kernel(&psi, &profile, 0.4).unwrap();
    let model = PhysicsModel::new(Interaction::default(), Trap::default(), 0.4, 0.5).unwrap();
    let mc = McConfig {
        samples: 1 << 18,
        block: 1 << 14,
        ..McConfig::default()
    };
    let mut group = c.benchmark_group("quartic_mc");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(quartic_trace_mc(&kernel, &model, &mc, exec).unwrap()))
        });
    }
    group.finish();
}

fn scan(c: &mut Criterion) {
    let grid = Arc::new(RadialGrid::uniform(10.0, 1000).unwrap());
    let trap = solve_trap_ground(&Trap::default(), &grid).unwrap();
    let offsets: Vec<f64> = (0..8).map(|i| trap.e_w - 0.2 + 0.15 * i as f64).collect();
    let config = MinimizerConfig::default();
    let mut group = c.benchmark_group("criticality_scan");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| black_box(criticality_scan(&trap, 20.0, &offsets, &config, exec).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, quartic, scan);
criterion_main!(benches);
