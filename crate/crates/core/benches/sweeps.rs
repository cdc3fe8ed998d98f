use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tqe_core::oracle::run_tqe_oracle;
use tqe_core::par::{map_collect, Execution};
use tqe_core::sweep::{sweep_figure, Figure, SweepConfig};
use tqe_core::{InputCase, OutcomePair, SplitterSpec, SqueezeSpec};

fn figure_sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("figure_sweep");
    group.sample_size(10);
    for figure in [Figure::F3a, Figure::F4b, Figure::F5b] {
        let grid = figure.default_grid();
        for execution in [Execution::Sequential, Execution::Parallel] {
            let config = SweepConfig { execution, ..SweepConfig::default() };
            group.bench_with_input(BenchmarkId::new(figure.id(), format!("{execution:?}")), &grid, |b, grid| {
                b.iter(|| sweep_figure(figure, grid, &config).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle_grid(c: &mut Criterion) {
    let points: Vec<(f64, f64, usize, usize)> = [2.0, 6.0, 10.0]
        .into_iter()
        .flat_map(|s| [0.2, 1.0, 5.0].into_iter().map(move |b| (s, b)))
        .flat_map(|(s, b)| (0..3).flat_map(move |k1| (0..3).map(move |k2| (s, b, k1, k2))))
        .collect();
    let run = |&(s, b, k1, k2): &(f64, f64, usize, usize)| {
        let sq = SqueezeSpec::from_db(s).unwrap();
        let split = SplitterSpec::from_b(b).unwrap();
        run_tqe_oracle(InputCase::Smsv, &sq, &split, OutcomePair::new(InputCase::Smsv, k1, k2), None)
            .unwrap()
            .probability
    };
    let mut group = c.benchmark_group("oracle_grid");
    group.sample_size(10);
    for execution in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{execution:?}"), |b| b.iter(|| map_collect(execution, &points, run)));
    }
    group.finish();
}

criterion_group!(benches, figure_sweeps, oracle_grid);
criterion_main!(benches);
