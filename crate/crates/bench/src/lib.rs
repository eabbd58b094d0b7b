//! Criterion benchmarks for the `cliffwalk` crate live under `benches/`.
