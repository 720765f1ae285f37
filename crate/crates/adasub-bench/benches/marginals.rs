use criterion::{black_box, criterion_group, criterion_main, Criterion};

use adasub::corpus;
use adasub::model::{Caps, PartialRealization};
use adasub::objectives::{Backend, Evaluator};

/// One marginal-benefit computation under each evaluation strategy: the
/// closed-form factored path, posterior reweighting over tabular rows, and
/// seeded Monte Carlo.
fn bench_strategies(c: &mut Criterion) {
    let mut group = c.benchmark_group("root_marginal");
    let empty = PartialRealization::empty();

    let large = corpus::random_coverage_large(3);
    let factored = Evaluator::exact(&large.objective, &large.prior).expect("factored evaluator");
    group.bench_function("factored", |b| {
        b.iter(|| factored.marginal(black_box(0), &empty).expect("marginal"))
    });

    let surge = corpus::correlated_surge();
    let tabular = Evaluator::exact(&surge.objective, &surge.prior).expect("tabular evaluator");
    group.bench_function("tabular", |b| {
        b.iter(|| tabular.marginal(black_box(2), &empty).expect("marginal"))
    });

    let sampled = Evaluator::new(
        &large.objective,
        &large.prior,
        Backend::Sample {
            samples: 512,
            seed: 7,
        },
        Caps::default(),
    )
    .expect("sampled evaluator");
    group.bench_function("sampled_512", |b| {
        b.iter(|| sampled.marginal(black_box(0), &empty).expect("marginal"))
    });

    group.finish();
}

criterion_group!(benches, bench_strategies);
criterion_main!(benches);
