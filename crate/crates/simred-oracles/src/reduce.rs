//! Reference reductions.
//!
//! These folds are deliberately *re-derived* from the operation definitions
//! rather than calling into the machine's scalar arithmetic: they are the
//! yardstick the machine and the kernels are measured against, so they must
//! not share an implementation with either. They share only the type
//! vocabulary (`Buffer`, `Scalar`, `CombineKind`).

use simred_core::{Buffer, CombineKind, ElemType, Scalar};

/// Identity element of `kind` over `elem`; `None` when the operation does
/// not exist for the type (bitwise on floats).
pub fn identity(kind: CombineKind, elem: ElemType) -> Option<Scalar> {
    match elem {
        ElemType::Int => Some(Scalar::Int(match kind {
            CombineKind::Add => 0,
            CombineKind::Mul => 1,
            CombineKind::Min => i64::MAX,
            CombineKind::Max => i64::MIN,
            CombineKind::BitAnd => -1,
            CombineKind::BitOr | CombineKind::BitXor => 0,
        })),
        ElemType::F32 => match kind {
            CombineKind::Add => Some(Scalar::F32(0.0)),
            CombineKind::Mul => Some(Scalar::F32(1.0)),
            CombineKind::Min => Some(Scalar::F32(f32::INFINITY)),
            CombineKind::Max => Some(Scalar::F32(f32::NEG_INFINITY)),
            _ => None,
        },
        ElemType::F64 => match kind {
            CombineKind::Add => Some(Scalar::F64(0.0)),
            CombineKind::Mul => Some(Scalar::F64(1.0)),
            CombineKind::Min => Some(Scalar::F64(f64::INFINITY)),
            CombineKind::Max => Some(Scalar::F64(f64::NEG_INFINITY)),
            _ => None,
        },
    }
}

fn combine_i64(kind: CombineKind, a: i64, b: i64) -> i64 {
    match kind {
        CombineKind::Add => a.wrapping_add(b),
        CombineKind::Mul => a.wrapping_mul(b),
        CombineKind::Min => a.min(b),
        CombineKind::Max => a.max(b),
        CombineKind::BitAnd => a & b,
        CombineKind::BitOr => a | b,
        CombineKind::BitXor => a ^ b,
    }
}

fn combine_f32(kind: CombineKind, a: f32, b: f32) -> Option<f32> {
    match kind {
        CombineKind::Add => Some(a + b),
        CombineKind::Mul => Some(a * b),
        CombineKind::Min => Some(a.min(b)),
        CombineKind::Max => Some(a.max(b)),
        _ => None,
    }
}

fn combine_f64(kind: CombineKind, a: f64, b: f64) -> Option<f64> {
    match kind {
        CombineKind::Add => Some(a + b),
        CombineKind::Mul => Some(a * b),
        CombineKind::Min => Some(a.min(b)),
        CombineKind::Max => Some(a.max(b)),
        _ => None,
    }
}

/// Left fold from the identity, in buffer order: the result a sequential
/// loop would produce. `None` when the operation does not exist for the
/// buffer's element type.
pub fn reduce_sequential(kind: CombineKind, data: &Buffer) -> Option<Scalar> {
    match data {
        Buffer::Int(xs) => Some(Scalar::Int(
            xs.iter().fold(identity(kind, ElemType::Int)?.as_int().unwrap(), |acc, &x| {
                combine_i64(kind, acc, x)
            }),
        )),
        Buffer::F32(xs) => {
            let Scalar::F32(id) = identity(kind, ElemType::F32)? else { unreachable!() };
            let mut acc = id;
            for &x in xs {
                acc = combine_f32(kind, acc, x)?;
            }
            Some(Scalar::F32(acc))
        }
        Buffer::F64(xs) => {
            let Scalar::F64(id) = identity(kind, ElemType::F64)? else { unreachable!() };
            let mut acc = id;
            for &x in xs {
                acc = combine_f64(kind, acc, x)?;
            }
            Some(Scalar::F64(acc))
        }
    }
}

fn tree_level<T: Copy>(level: &[T], mut combine: impl FnMut(T, T) -> T) -> Vec<T> {
    let mut next = Vec::with_capacity(level.len().div_ceil(2));
    let mut i = 0;
    while i + 1 < level.len() {
        next.push(combine(level[i], level[i + 1]));
        i += 2;
    }
    if i < level.len() {
        // Odd element: carried up unchanged.
        next.push(level[i]);
    }
    next
}

/// Balanced binary-tree fold: adjacent pairs combine level by level, an odd
/// trailing element is carried up unchanged. For floats this is a *different
/// rounding order* than [`reduce_sequential`]; for ints the two agree
/// exactly.
pub fn reduce_pairwise_tree(kind: CombineKind, data: &Buffer) -> Option<Scalar> {
    match data {
        Buffer::Int(xs) => {
            if xs.is_empty() {
                return identity(kind, ElemType::Int);
            }
            let mut level = xs.clone();
            while level.len() > 1 {
                level = tree_level(&level, |a, b| combine_i64(kind, a, b));
            }
            Some(Scalar::Int(level[0]))
        }
        Buffer::F32(xs) => {
            if xs.is_empty() {
                return identity(kind, ElemType::F32);
            }
            // Probe operation support before folding.
            combine_f32(kind, 0.0, 0.0)?;
            let mut level = xs.clone();
            while level.len() > 1 {
                level = tree_level(&level, |a, b| combine_f32(kind, a, b).unwrap());
            }
            Some(Scalar::F32(level[0]))
        }
        Buffer::F64(xs) => {
            if xs.is_empty() {
                return identity(kind, ElemType::F64);
            }
            combine_f64(kind, 0.0, 0.0)?;
            let mut level = xs.clone();
            while level.len() > 1 {
                level = tree_level(&level, |a, b| combine_f64(kind, a, b).unwrap());
            }
            Some(Scalar::F64(level[0]))
        }
    }
}
