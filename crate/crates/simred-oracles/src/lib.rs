//! Reference oracles for parallel reductions.
//!
//! Everything a reduction kernel claims to compute can be checked against
//! this crate: order-sensitive sequential folds, balanced-tree folds,
//! compensated summation, a priori rounding-error bounds, and exact
//! rational sums. Implementations here are independent re-derivations —
//! they never call the abstract machine's arithmetic, so a machine bug
//! cannot vouch for itself.

pub mod exact;
pub mod float;
pub mod reduce;

pub use exact::{abs_error, exact_sum};
pub use float::{compensated_sum, float_error_bound, naive_sum, unit_roundoff};
pub use reduce::{identity, reduce_pairwise_tree, reduce_sequential};
