//! Benchmarks for the liepoisson crate live in `benches/`.
