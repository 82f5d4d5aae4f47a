use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stdmap::cocycle::{grid_lyapunov, Cocycle2};
use stdmap::jacobi::{cycle_points, periodic_w_spectrum};
use stdmap::suite::period_seven_base;
use stdmap::{Exec, MapSpec, TorusPoint, C64};

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn lyapunov_grid(c: &mut Criterion) {
    let cfg = Cocycle2::jacobian(&MapSpec::standard(3.0));
    let mut group = c.benchmark_group("grid_lyapunov");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 32), &exec, |b, &exec| {
            b.iter(|| grid_lyapunov(black_box(&cfg), 32, 500, 16, exec).unwrap().mean)
        });
    }
    group.finish();
}

fn w_spectrum(c: &mut Criterion) {
    let xs = cycle_points(&period_seven_base(), TorusPoint::new(0.2, 0.3)).unwrap();
    let mut group = c.benchmark_group("periodic_w_spectrum");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 256), &exec, |b, &exec| {
            b.iter(|| periodic_w_spectrum(black_box(&xs), C64::new(0.0, 0.0), 8.0, 256, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lyapunov_grid, w_spectrum);
criterion_main!(benches);
