use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qclab::cutoff::CutoffFunction;
use qclab::geometry::{build_stadium, CapProfile};
use qclab::pipeline::{stadium_outcome, ExperimentConfig};
use qclab::quasiconcavity::{level_grid, scan_nonconvex_levels, DEFAULT_CONVEXITY_TOL};
use qclab::varmin::{constrained_minimize, VarminOptions};
use qclab::Execution;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn level_scan(c: &mut Criterion) {
    let d = Arc::new(build_stadium(8.0, CapProfile::default(), 1.0 / 32.0).unwrap());
    let u = constrained_minimize(&d, &CutoffFunction::default(), &VarminOptions::default())
        .unwrap()
        .u;
    let levels = level_grid(0.05, 0.95, 50);
    let mut g = c.benchmark_group("level_scan_a8");
    for mode in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &m| {
            b.iter(|| scan_nonconvex_levels(black_box(&u), &levels, DEFAULT_CONVEXITY_TOL, m).unwrap())
        });
    }
    g.finish();
}

fn a_sweep(c: &mut Criterion) {
    let mut cfg = ExperimentConfig::default();
    cfg.domain.h = 1.0 / 16.0;
    cfg.levels.n = 20;
    let values = vec![4.0, 6.0, 8.0, 10.0];
    let mut g = c.benchmark_group("a_sweep_h16");
    g.sample_size(10);
    for mode in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |b, &m| {
            b.iter(|| {
                m.map(values.clone(), |a| {
                    stadium_outcome(&cfg, a).unwrap().result.mu
                })
            })
        });
    }
    g.finish();
}

criterion_group!(benches, level_scan, a_sweep);
criterion_main!(benches);
