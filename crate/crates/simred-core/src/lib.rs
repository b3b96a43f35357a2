//! Deterministic SIMT abstract machine.
//!
//! This crate models a GPU-style compute device precisely enough to study
//! how data-parallel kernels *behave* — wavefront divergence, barrier
//! traffic, memory coalescing, bank conflicts, cross-wavefront hazards —
//! without modelling how fast real silicon runs. Programs are built from a
//! small structured IR ([`ir::Program`]), validated statically, lowered to a
//! flat form, and interpreted lane-by-lane with execution masks.
//!
//! The machine is deterministic: the same program, bindings, and
//! configuration always produce bit-identical buffers and metrics. Three
//! schedulers ([`config::Scheduler`]) expose different wavefront
//! interleavings; programs whose hazard report is empty produce identical
//! results under all of them.

pub mod buffer;
pub mod combine;
pub mod config;
pub mod error;
pub mod exec;
pub mod hazard;
pub mod ir;
mod lower;
pub mod memmodel;
pub mod metrics;
pub mod scalar;
pub mod validate;

pub use buffer::Buffer;
pub use combine::{CombineKind, CombineOp};
pub use config::{LaunchConfig, Scheduler};
pub use error::ExecError;
pub use exec::{launch, LaunchOutput};
pub use hazard::{detect_hazards, AccessLog, LocalAccessRecord};
pub use ir::{BufferParam, Expr, Instr, LocalArray, Program, ScalarParam};
pub use metrics::{HazardRecord, Metrics};
pub use scalar::{ElemType, Scalar};
pub use validate::{validate_program, ValidationReport, Violation};
