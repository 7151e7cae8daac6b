use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tqw_core::continuum::{convergence_study, InitialState};
use tqw_core::lattice::gaussian_init;
use tqw_core::momentum::{bz_grid, effective_spectrum};
use tqw_core::{Complex64 as C64, Execution, Stepper, WalkSpec};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn eigen() -> [C64; 2] {
    let h = 0.5f64.sqrt();
    [C64::new(h, 0.0), C64::new(0.0, h)]
}

fn lattice_step(c: &mut Criterion) {
    let spec = WalkSpec::yy(1.0, 0.5, 0.2, 0.01);
    let mut g = c.benchmark_group("lattice_step");
    for n in [1 << 12, 1 << 16, 1 << 20] {
        let f = gaussian_init(n, 0.1, 0.0, 1.0, eigen()).unwrap();
        for (name, exec) in MODES {
            let st = Stepper::new(&spec, exec).unwrap();
            g.bench_with_input(BenchmarkId::new(name, n), &f, |b, f| {
                let mut s = f.clone();
                b.iter(|| st.step(black_box(&mut s)));
            });
        }
    }
    g.finish();
}

fn spectrum(c: &mut Criterion) {
    let spec = WalkSpec::yy(1.0, 0.5, 0.2, 1.0);
    let grid = bz_grid(100_001).unwrap();
    let mut g = c.benchmark_group("spectrum");
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| effective_spectrum(black_box(&spec), &grid, exec).unwrap()));
    }
    g.finish();
}

fn convergence(c: &mut Criterion) {
    let spec = WalkSpec::yy(1.0, 1.5, 0.0, 0.01);
    let init = InitialState { mu_x: 0.0, sigma2: 0.7, spinor: eigen() };
    let mut g = c.benchmark_group("convergence_study");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| convergence_study(&spec, &[0.04, 0.01, 0.0025], 1.0, &init, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lattice_step, spectrum, convergence);
criterion_main!(benches);
