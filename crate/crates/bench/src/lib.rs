//! Benchmark-only crate; the measured pipelines live in benches/pipelines.rs.
