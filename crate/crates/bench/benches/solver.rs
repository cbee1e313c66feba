use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eqmeasure::validation::particle_step;
use eqmeasure::{optimize_radius, Interval, OptimizeConfig, ProblemSpec, SingleIntervalSolver};
use std::hint::black_box;

fn fixed_radius(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_fixed_radius");
    for size in [30, 100] {
        let spec = ProblemSpec::attractive_repulsive(2.5, 1.2, 1.0)
            .unwrap()
            .size(size);
        let solver = SingleIntervalSolver::new(&spec).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(size), &solver, |b, s| {
            b.iter(|| {
                s.solve(Interval::symmetric(black_box(0.8)).unwrap())
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn radius_search(c: &mut Criterion) {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(40);
    let mut group = c.benchmark_group("optimize_radius");
    group.sample_size(10);
    group.bench_function("alpha=2,beta=1.5,n=40", |b| {
        b.iter(|| optimize_radius(black_box(&spec), &OptimizeConfig::default()).unwrap())
    });
    group.finish();
}

fn particles(c: &mut Criterion) {
    let mut group = c.benchmark_group("particle_step");
    // moment sums for even powers, pairwise otherwise
    for (alpha, beta) in [(2.0, 1.5), (4.0, 2.0)] {
        let x0: Vec<f64> = (0..1000).map(|i| -1.0 + 2.0 * i as f64 / 999.0).collect();
        group.bench_function(format!("n=1000,alpha={alpha},beta={beta}"), |b| {
            let mut scratch = Vec::new();
            b.iter_batched(
                || x0.clone(),
                |mut x| particle_step(alpha, beta, &mut x, 0.1, &mut scratch),
                criterion::BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, fixed_radius, radius_search, particles);
criterion_main!(benches);
