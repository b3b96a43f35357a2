//! A catalog of parallel-reduction strategies for the `simred` abstract
//! machine.
//!
//! Each strategy is built as a pair of machine programs — a grid-wide first
//! stage producing per-group (or per-wavefront) partials, and a single-group
//! second stage folding the partials to one value. [`ReducePlan`] holds the
//! compiled pair plus launch geometry; [`reduce`] is the one-call
//! convenience wrapper.
//!
//! The strategies span the classic design space: interleaved trees with
//! modulo guards ([`KernelKind::HarrisK1`]) or strided indexing (K2),
//! sequential addressing (K3), combine-on-load (K4), wavefront-synchronous
//! tails (K5), full unrolling (K6, K7), register shuffles
//! ([`KernelKind::Shuffle`]), the grid-stride two-stage formulation
//! ([`KernelKind::Catanzaro`]), and a multi-element, branch-free variant
//! ([`KernelKind::NewStage1Branchless`]) that trades all tree-phase
//! divergence and all but one barrier for masked arithmetic.

pub mod expr_util;
mod kinds;
mod plan;
pub mod stage1;
pub mod stage2;

pub use kinds::KernelKind;
pub use plan::{reduce, PlanError, ReduceError, ReducePlan, ReduceRun};

// Re-export the operation vocabulary so downstream crates don't need a
// direct simred-core dependency just to name a reduction.
pub use simred_core::{CombineKind, CombineOp};
