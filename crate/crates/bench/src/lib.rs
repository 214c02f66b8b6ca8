//! Benchmark-only crate; see `benches/pipeline.rs`. The microbenchmarks
//! cover the three hot paths of a construction: the minimum-norm solve, a
//! single candidate search, and a short end-to-end training run.
