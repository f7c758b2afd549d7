//! Benchmark-only crate; see `benches/braiding.rs`.
