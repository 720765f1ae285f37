//! Criterion benchmarks for the adasub engines. See the `benches/` targets.
