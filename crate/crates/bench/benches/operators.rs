use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eqmeasure::operators::{select_lambda, KernelPower, OperatorOptions, PowerLawOperator};
use eqmeasure::ultraspherical::{multiplication_operator, BasisParam};
use std::hint::black_box;

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("power_law_operator");
    // exactly banded, then a power whose seeds need truncation
    for (alpha, lambda) in [(2.5, None), (1.61, Some(0.195))] {
        let a = KernelPower::new(alpha).unwrap();
        let basis = match lambda {
            Some(l) => BasisParam::new(l).unwrap(),
            None => select_lambda(a).unwrap(),
        };
        for size in [50, 100, 200] {
            group.bench_with_input(
                BenchmarkId::new(format!("alpha={alpha}"), size),
                &size,
                |b, &n| {
                    b.iter(|| {
                        PowerLawOperator::build(a, basis, black_box(n), &OperatorOptions::default())
                            .unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

fn multiplication(c: &mut Criterion) {
    let basis = BasisParam::new(0.75).unwrap();
    c.bench_function("multiplication_operator/200", |b| {
        b.iter(|| multiplication_operator(basis, black_box(200)).unwrap())
    });
}

criterion_group!(benches, build, multiplication);
criterion_main!(benches);
