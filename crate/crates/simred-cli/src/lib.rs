//! Benchmark harness for the simred reduction kernels.
//!
//! The library side of the `simred` binary: deterministic dataset
//! generation, oracle-checked benchmark execution, a tunable linear cost
//! model, and report serialization. The binary in `main.rs` is a thin
//! wrapper over [`cli`].

pub mod bench;
pub mod cli;
pub mod cost;
pub mod data;
pub mod report;
pub mod settings;

pub use bench::{run_benchmark, sweep_unroll, BenchRow, BenchTarget, Report};
pub use cost::{estimate_cycles, CostModel};
pub use data::{generate_data, load_data, DataSpec, FileFormat};
pub use report::{render, ReportFormat, CSV_HEADER};
