//! Benchmark-only crate; see `benches/rank_ops.rs`.
