//! Expression builders shared by every kernel: combining two values under a
//! [`CombineOp`], and branch-free masked loads.
//!
//! # Masked terms
//!
//! Unrolled kernels issue loads that may fall past the end of the data (the
//! tail of the last iteration) or may need to contribute nothing (inactive
//! tree lanes). Branching on the bound would reintroduce the divergence the
//! kernels are trying to avoid, so instead each load is made *algebraically
//! inert* when its `flag` (an `Int` 0/1) is 0:
//!
//! * **Idempotent ops** (`Min`, `Max`, `BitAnd`, `BitOr`): the load address
//!   is clamped to a value that is already part of the reduction (element 0
//!   for global data, the lane's own word for local trees). Re-combining an
//!   element that is already in the set changes nothing.
//! * **Zero-identity ops** (`Add`, `BitXor`): the loaded value is multiplied
//!   by the flag, yielding the identity when masked.
//! * **`Mul`**: `flag * x + (1 - flag)` — the loaded value when active, the
//!   identity `1` otherwise.
//!
//! For `Int` data every path is exact (wrapping arithmetic included). For
//! floats, `Min`/`Max` clamping is total — even `±inf` data is safe — while
//! the multiply-by-flag paths assume finite loaded values (`0 * inf` is
//! `NaN`, the standard caveat of the flag-multiply idiom) and `Mul` can turn
//! `-0.0` into `+0.0`.

use simred_core::ir::dsl::*;
use simred_core::ir::Expr;
use simred_core::{CombineKind, CombineOp};

/// `a ⊕ b` for the operation's kind.
pub fn combine_expr(op: CombineOp, a: Expr, b: Expr) -> Expr {
    match op.kind() {
        CombineKind::Add => a + b,
        CombineKind::Mul => a * b,
        CombineKind::Min => a.min_(b),
        CombineKind::Max => a.max_(b),
        CombineKind::BitAnd => a.and(b),
        CombineKind::BitOr => a.or(b),
        CombineKind::BitXor => a.xor(b),
    }
}

/// The operation's identity as a constant expression.
pub fn identity_expr(op: CombineOp) -> Expr {
    cs(op.identity())
}

/// Make `loaded` inert when `flag` is 0 (see module docs). `loaded` must
/// already use a flag-safe address, e.g. via [`masked_global_term`] or a
/// self-referencing local index.
pub fn masked_value(op: CombineOp, loaded: Expr, flag: Expr) -> Expr {
    let elem = op.elem_type();
    match op.kind() {
        // Idempotent: a duplicate of an in-set element is inert by itself.
        CombineKind::Min | CombineKind::Max | CombineKind::BitAnd | CombineKind::BitOr => loaded,
        CombineKind::Add | CombineKind::BitXor => flag.cast(elem) * loaded,
        CombineKind::Mul => flag.clone().cast(elem) * loaded + (ci(1) - flag).cast(elem),
    }
}

/// Branch-free "load `buffer[index]` if `flag` else contribute nothing".
/// When masked, the address clamps to 0 — element 0 is always part of a
/// whole-buffer reduction, so the idempotent clamp stays inert.
pub fn masked_global_term(op: CombineOp, buffer: &str, index: Expr, flag: Expr) -> Expr {
    masked_value(op, load(buffer, index * flag.clone()), flag)
}

/// Right-nested combine of already-built terms: `t0 ⊕ (t1 ⊕ (t2 ⊕ …))`.
pub fn combine_all(op: CombineOp, terms: Vec<Expr>) -> Expr {
    let mut it = terms.into_iter().rev();
    let mut acc = it.next().expect("combine_all needs at least one term");
    for t in it {
        acc = combine_expr(op, t, acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use simred_core::ir::{BufferParam, Program};
    use simred_core::{launch, Buffer, ElemType, LaunchConfig, Scalar};
    use std::collections::HashMap;

    /// Run `out[gid] = acc0 ⊕ masked_global_term(input[gid], gid < 2)` over
    /// 4 lanes and return the outputs.
    fn run_masked(op: CombineOp, input: Buffer, acc0: Scalar) -> Vec<Scalar> {
        let elem = op.elem_type();
        let p = Program {
            name: "masked".to_string(),
            buffers: vec![
                BufferParam { name: "input".into(), elem, writable: false },
                BufferParam { name: "out".into(), elem, writable: true },
            ],
            scalars: vec![],
            local_arrays: vec![],
            body: vec![
                let_("flag", global_id().lt(ci(2))),
                store(
                    "out",
                    global_id(),
                    combine_expr(
                        op,
                        cs(acc0),
                        masked_global_term(op, "input", global_id(), v("flag")),
                    ),
                ),
            ],
        };
        let cfg = LaunchConfig {
            global_size: 4,
            local_size: 4,
            wavefront_width: 4,
            ..LaunchConfig::default()
        };
        let mut buffers = HashMap::new();
        buffers.insert("input".to_string(), input);
        buffers.insert("out".to_string(), Buffer::filled(Scalar::zero(elem), 4));
        let out = launch(&p, &cfg, buffers, &HashMap::new()).expect("masked term launch");
        out.buffers["out"].iter().collect()
    }

    #[test]
    fn masked_int_terms_follow_their_contract() {
        for kind in [
            CombineKind::Add,
            CombineKind::Mul,
            CombineKind::Min,
            CombineKind::Max,
            CombineKind::BitAnd,
            CombineKind::BitOr,
            CombineKind::BitXor,
        ] {
            let op = CombineOp::new(kind, ElemType::Int).unwrap();
            let acc0 = Scalar::Int(13);
            let out = run_masked(op, Buffer::from(vec![21i64, 22, 23, 24]), acc0);
            // Active lanes 0 and 1 combine their element.
            assert_eq!(out[0], op.apply(acc0, Scalar::Int(21)).unwrap(), "{kind}");
            assert_eq!(out[1], op.apply(acc0, Scalar::Int(22)).unwrap(), "{kind}");
            // Masked lanes: zero-identity and Mul paths produce the exact
            // identity; idempotent paths combine a duplicate of element 0,
            // which is inert for any reduction that already contains it.
            let masked_expect = if kind.is_idempotent() {
                op.apply(acc0, Scalar::Int(21)).unwrap()
            } else {
                acc0
            };
            assert_eq!(out[2], masked_expect, "{kind}");
            assert_eq!(out[3], masked_expect, "{kind}");
        }
    }

    #[test]
    fn idempotent_masked_duplicates_cannot_change_a_whole_set_reduction() {
        // The clamp's inertness argument, checked end to end: fold the whole
        // buffer, then fold it again with an extra duplicate of element 0
        // (what a masked lane contributes) — same answer.
        for kind in [
            CombineKind::Min,
            CombineKind::Max,
            CombineKind::BitAnd,
            CombineKind::BitOr,
        ] {
            let op = CombineOp::new(kind, ElemType::Int).unwrap();
            let data = [21i64, -7, 1023, 64];
            let fold = |xs: &[i64]| {
                xs.iter().fold(op.identity(), |a, &x| op.apply(a, Scalar::Int(x)).unwrap())
            };
            let with_dup: Vec<i64> =
                data.iter().copied().chain(std::iter::once(data[0])).collect();
            assert_eq!(fold(&data), fold(&with_dup), "{kind}");
        }
    }

    #[test]
    fn masked_min_survives_infinities() {
        // The naive select-by-multiply trick would produce 0 * inf = NaN
        // here; the idempotent clamp must not.
        let op = CombineOp::new(CombineKind::Min, ElemType::F64).unwrap();
        let input = Buffer::from(vec![f64::INFINITY, 5.0, 3.0, 8.0]);
        let out = run_masked(op, input, Scalar::F64(4.0));
        assert_eq!(out[0], Scalar::F64(4.0)); // min(4, inf)
        assert_eq!(out[1], Scalar::F64(4.0)); // min(4, 5)
        assert_eq!(out[2], Scalar::F64(4.0)); // masked: clamps to input[0]=inf, still inert
        assert_eq!(out[3], Scalar::F64(4.0));
    }

    #[test]
    fn masked_max_survives_negative_infinity() {
        let op = CombineOp::new(CombineKind::Max, ElemType::F32).unwrap();
        let input = Buffer::from(vec![f32::NEG_INFINITY, 5.0f32, 3.0, 8.0]);
        let out = run_masked(op, input, Scalar::F32(4.0));
        assert_eq!(out[0], Scalar::F32(4.0));
        assert_eq!(out[1], Scalar::F32(5.0));
        assert_eq!(out[2], Scalar::F32(4.0));
        assert_eq!(out[3], Scalar::F32(4.0));
    }

    #[test]
    fn masked_float_add_and_mul_are_identities_on_finite_data() {
        let add = CombineOp::new(CombineKind::Add, ElemType::F64).unwrap();
        let out = run_masked(add, Buffer::from(vec![1.5f64, 2.5, 9.0, 9.0]), Scalar::F64(10.0));
        assert_eq!(out, vec![
            Scalar::F64(11.5),
            Scalar::F64(12.5),
            Scalar::F64(10.0),
            Scalar::F64(10.0),
        ]);

        let mul = CombineOp::new(CombineKind::Mul, ElemType::F64).unwrap();
        let out = run_masked(mul, Buffer::from(vec![1.5f64, 2.5, 9.0, 9.0]), Scalar::F64(10.0));
        assert_eq!(out, vec![
            Scalar::F64(15.0),
            Scalar::F64(25.0),
            Scalar::F64(10.0),
            Scalar::F64(10.0),
        ]);
    }

    #[test]
    fn combine_all_nests_right() {
        let op = CombineOp::new(CombineKind::Add, ElemType::Int).unwrap();
        let e = combine_all(op, vec![ci(1), ci(2), ci(3)]);
        // Shape: 1 + (2 + 3).
        match e {
            Expr::Binary(_, a, b) => {
                assert!(matches!(*a, Expr::Const(Scalar::Int(1))));
                assert!(matches!(*b, Expr::Binary(_, _, _)));
            }
            other => panic!("expected binary, got {other:?}"),
        }
    }
}
