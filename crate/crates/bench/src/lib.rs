//! Benchmark-only crate; see `benches/tiling.rs`.
