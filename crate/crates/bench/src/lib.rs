//! Benchmarks for the dvsound solvers live in `benches/`; run them with `cargo bench -p dvsound-bench`.
