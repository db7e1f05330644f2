//! Criterion benchmarks for resolvkit; see `benches/kernels.rs`.
