//! Criterion benchmarks for the operator engine; see `benches/algebra.rs`.
