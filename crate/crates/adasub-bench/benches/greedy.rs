use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use adasub::corpus;
use adasub::greedy::{build_policy, Engine, SelectionRule, StoppingRule};
use adasub::model::Caps;
use adasub::objectives::Backend;

/// Naive versus lazy construction on coverage instances large enough that
/// recomputing every candidate at every node dominates the runtime.
fn bench_engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_policy");
    for seed in [3u64, 11, 27] {
        let inst = corpus::random_coverage_large(seed);
        let label = format!("{}-items", inst.items.len());
        for (name, engine) in [("naive", Engine::Naive), ("lazy", Engine::Lazy)] {
            group.bench_with_input(BenchmarkId::new(name, &label), &inst, |b, inst| {
                b.iter(|| {
                    build_policy(
                        &inst.items,
                        &inst.objective,
                        &inst.prior,
                        StoppingRule::Cardinality(4),
                        SelectionRule::Benefit,
                        engine,
                        Backend::Enumerate,
                        &Caps::default(),
                    )
                    .expect("benchmark instances build")
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_engines);
criterion_main!(benches);
