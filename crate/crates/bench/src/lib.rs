//! Benchmarks for the `gkmkit` kernels; see `benches/kernels.rs`.
