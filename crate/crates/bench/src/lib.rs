//! Criterion benchmarks for the ghostdiff kernels live in `benches/`.
