//! Benchmarks for the tfm-core kernels; see `benches/`.
