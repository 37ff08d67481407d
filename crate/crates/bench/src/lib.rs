//! Criterion benchmarks for latzero-core live in `benches/`.
