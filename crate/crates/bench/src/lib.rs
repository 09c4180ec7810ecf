//! Criterion benchmarks for `onskit-core`; see `benches/`.
