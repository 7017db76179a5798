//! Benchmarks live in `benches/`; run `cargo bench -p lambda3-bench`.
