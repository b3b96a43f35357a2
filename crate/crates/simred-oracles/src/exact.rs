//! Exact rational arithmetic for measuring true floating-point error.
//!
//! Every finite IEEE value is a dyadic rational, so a float buffer has an
//! *exact* sum as a `BigRational`. Comparing a computed float against it
//! measures the real rounding error with no oracle-side rounding at all.

use num::{BigRational, FromPrimitive, Signed};
use simred_core::Buffer;

/// Exact sum of a float buffer as a rational. `None` if the buffer is an
/// int buffer (wrapping semantics make "exact" a different question) or
/// contains a non-finite value.
pub fn exact_sum(data: &Buffer) -> Option<BigRational> {
    let mut acc = BigRational::from_integer(0.into());
    match data {
        Buffer::Int(_) => return None,
        Buffer::F32(xs) => {
            for &x in xs {
                if !x.is_finite() {
                    return None;
                }
                acc += BigRational::from_f32(x)?;
            }
        }
        Buffer::F64(xs) => {
            for &x in xs {
                if !x.is_finite() {
                    return None;
                }
                acc += BigRational::from_f64(x)?;
            }
        }
    }
    Some(acc)
}

/// Absolute error of a computed float against an exact rational value.
pub fn abs_error(computed: f64, exact: &BigRational) -> BigRational {
    let c = BigRational::from_f64(computed)
        .unwrap_or_else(|| panic!("non-finite computed value {computed}"));
    (c - exact).abs()
}
