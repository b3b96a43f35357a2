//! Launch-time and run-time errors.

use thiserror::Error;

use crate::validate::ValidationReport;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExecError {
    /// The program failed static validation; the report lists every
    /// violation found.
    #[error("invalid program: {0}")]
    InvalidProgram(ValidationReport),

    /// The launch configuration violates a geometry invariant.
    #[error("invalid launch config: {0}")]
    InvalidConfig(String),

    /// A buffer or scalar parameter was not supplied at launch.
    #[error("missing binding for parameter `{0}`")]
    MissingBinding(String),

    /// A binding's element type disagrees with the parameter declaration,
    /// or a runtime operand had an impossible type.
    #[error("type mismatch: {0}")]
    TypeMismatch(String),

    /// A global load or store addressed outside the buffer.
    #[error("out-of-bounds access to `{buffer}` at index {index} (lane {lane})")]
    OutOfBounds {
        buffer: String,
        index: i64,
        lane: usize,
    },

    /// A local load or store addressed outside the array.
    #[error("out-of-bounds access to local array `{array}` at index {index} (lane {lane})")]
    LocalOutOfBounds {
        array: String,
        index: i64,
        lane: usize,
    },

    /// A barrier was reached under a non-uniform mask, or the wavefronts of
    /// a work-group did not all arrive at the same barrier.
    #[error("barrier divergence in work-group {group}: {detail}")]
    BarrierDivergence { group: usize, detail: String },

    /// The program's local arrays exceed the configured local memory.
    #[error("local memory overflow: program needs {required} words, config provides {available}")]
    LocalMemOverflow { required: usize, available: usize },

    /// Integer division or remainder by zero.
    #[error("integer division by zero (lane {lane})")]
    DivisionByZero { lane: usize },
}
