//! Criterion benchmarks for `crosscap-core`; see `benches/`.
