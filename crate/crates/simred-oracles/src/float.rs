//! Floating-point accuracy instruments: compensated summation and a priori
//! rounding-error bounds.

use simred_core::{Buffer, ElemType, Scalar};

/// Unit roundoff of the element type (half an ulp at 1.0); 0 for ints.
pub fn unit_roundoff(elem: ElemType) -> f64 {
    match elem {
        ElemType::Int => 0.0,
        ElemType::F32 => (2.0f64).powi(-24),
        ElemType::F64 => (2.0f64).powi(-53),
    }
}

/// First-order a priori bound on the absolute error of summing `n` values
/// of magnitude at most `max_abs`, in any order:
/// `(n - 1) * u * (n * max_abs)`, where `n * max_abs` over-approximates the
/// sum of absolute values. Zero for `n <= 1` and for exact (int) types.
pub fn float_error_bound(n: usize, max_abs: f64, elem: ElemType) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (n - 1) as f64 * unit_roundoff(elem) * (n as f64 * max_abs)
}

/// Plain left-to-right summation in the buffer's own width. `None` for int
/// buffers — this is a float instrument, int addition is exact.
pub fn naive_sum(data: &Buffer) -> Option<Scalar> {
    match data {
        Buffer::Int(_) => None,
        Buffer::F32(xs) => Some(Scalar::F32(xs.iter().fold(0.0f32, |a, &x| a + x))),
        Buffer::F64(xs) => Some(Scalar::F64(xs.iter().fold(0.0f64, |a, &x| a + x))),
    }
}

macro_rules! neumaier_fold {
    ($name:ident, $t:ty) => {
        fn $name(xs: &[$t]) -> $t {
            let mut sum: $t = 0.0;
            let mut comp: $t = 0.0;
            for &x in xs {
                let t = sum + x;
                // Whichever operand was smaller lost digits; recover them.
                if sum.abs() >= x.abs() {
                    comp += (sum - t) + x;
                } else {
                    comp += (x - t) + sum;
                }
                sum = t;
            }
            sum + comp
        }
    };
}

neumaier_fold!(neumaier_f32, f32);
neumaier_fold!(neumaier_f64, f64);

/// Compensated summation in the buffer's own width — Neumaier's improved
/// Kahan–Babuška variant, whose error is bounded independently of `n`. The
/// "how accurate could a sequential sum be" yardstick. `None` for int
/// buffers.
pub fn compensated_sum(data: &Buffer) -> Option<Scalar> {
    match data {
        Buffer::Int(_) => None,
        Buffer::F32(xs) => Some(Scalar::F32(neumaier_f32(xs))),
        Buffer::F64(xs) => Some(Scalar::F64(neumaier_f64(xs))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{abs_error, exact_sum};
    use crate::reduce::{reduce_pairwise_tree, reduce_sequential};
    use num::{BigRational, FromPrimitive};
    use proptest::prelude::*;
    use simred_core::CombineKind;

    /// Frozen compensation witness: naive f64 summation loses the small
    /// terms entirely, Kahan keeps them.
    #[test]
    fn compensation_recovers_what_naive_loses() {
        let b = Buffer::F64(vec![1.0, 1.0e100, 1.0, -1.0e100]);
        assert_eq!(naive_sum(&b), Some(Scalar::F64(0.0)));
        assert_eq!(compensated_sum(&b), Some(Scalar::F64(2.0)));
    }

    #[test]
    fn error_bound_edge_cases() {
        assert_eq!(float_error_bound(0, 10.0, ElemType::F32), 0.0);
        assert_eq!(float_error_bound(1, 10.0, ElemType::F64), 0.0);
        assert_eq!(float_error_bound(1000, 10.0, ElemType::Int), 0.0);
        // n = 2, max 1.0, f64: one rounding of a sum bounded by 2.
        assert_eq!(float_error_bound(2, 1.0, ElemType::F64), (2.0f64).powi(-52));
        assert!(float_error_bound(100, 1.0, ElemType::F32) > float_error_bound(100, 1.0, ElemType::F64));
    }

    #[test]
    fn int_buffers_are_not_float_instruments() {
        let b = Buffer::Int(vec![1, 2, 3]);
        assert_eq!(naive_sum(&b), None);
        assert_eq!(compensated_sum(&b), None);
    }

    fn rational(x: f64) -> BigRational {
        BigRational::from_f64(x).unwrap()
    }

    proptest! {
        /// Both summation orders stay within the a priori bound.
        #[test]
        fn summation_error_stays_within_the_bound(
            xs in proptest::collection::vec(-1.0e6f64..1.0e6, 0..300),
        ) {
            let b = Buffer::F64(xs.clone());
            let exact = exact_sum(&b).unwrap();
            let max_abs = xs.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
            let bound = rational(float_error_bound(xs.len(), max_abs, ElemType::F64));

            let seq = reduce_sequential(CombineKind::Add, &b).unwrap().to_f64_lossy();
            prop_assert!(abs_error(seq, &exact) <= bound);

            let tree = reduce_pairwise_tree(CombineKind::Add, &b).unwrap().to_f64_lossy();
            prop_assert!(abs_error(tree, &exact) <= bound);
        }

        /// Compensated summation obeys its clean n-independent bound:
        /// |result - exact| <= 2u * sum(|x|) (+ a higher-order whisker).
        #[test]
        fn compensated_error_is_n_independent(
            xs in proptest::collection::vec(-1.0e6f64..1.0e6, 0..300),
        ) {
            let b = Buffer::F64(xs.clone());
            let exact = exact_sum(&b).unwrap();
            let comp = compensated_sum(&b).unwrap().to_f64_lossy();
            let abs_sum: f64 = xs.iter().map(|x| x.abs()).sum();
            let u = unit_roundoff(ElemType::F64);
            let bound = rational(4.0 * u * abs_sum + f64::MIN_POSITIVE);
            prop_assert!(abs_error(comp, &exact) <= bound);
        }
    }
}
