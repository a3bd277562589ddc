//! Criterion benchmarks for the `mclm-core` kernels live in `benches/`.
