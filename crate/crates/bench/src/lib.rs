//! Criterion benchmarks for the naming-game simulator live in `benches/`.
