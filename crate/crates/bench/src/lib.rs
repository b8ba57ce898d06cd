//! Criterion benchmarks for objective evaluation and the solvers; run with
//! `cargo bench -p maxcap-bench`.
