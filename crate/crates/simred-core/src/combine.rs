//! Reduction combine operators.
//!
//! A [`CombineOp`] is an associative, commutative binary operator together
//! with its identity element. These are the only operators the reduction
//! kernels accept; associativity is what makes every parallel evaluation
//! order equivalent (exactly so on `Int`, up to rounding on floats).

use std::fmt;

use crate::scalar::{self, ElemType, OpError, Scalar};

/// The kind of combine operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineKind {
    Add,
    Mul,
    Min,
    Max,
    BitAnd,
    BitOr,
    BitXor,
}

impl CombineKind {
    pub const ALL: [CombineKind; 7] = [
        CombineKind::Add,
        CombineKind::Mul,
        CombineKind::Min,
        CombineKind::Max,
        CombineKind::BitAnd,
        CombineKind::BitOr,
        CombineKind::BitXor,
    ];

    /// Idempotent operators satisfy `combine(x, x) == x`, which lets masked
    /// kernels feed a duplicate element instead of the identity.
    pub fn is_idempotent(self) -> bool {
        matches!(
            self,
            CombineKind::Min | CombineKind::Max | CombineKind::BitAnd | CombineKind::BitOr
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            CombineKind::Add => "add",
            CombineKind::Mul => "mul",
            CombineKind::Min => "min",
            CombineKind::Max => "max",
            CombineKind::BitAnd => "and",
            CombineKind::BitOr => "or",
            CombineKind::BitXor => "xor",
        }
    }
}

impl fmt::Display for CombineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An associative, commutative combine operator over one element type.
///
/// The identity is fixed by `(kind, elem)`: 0 for Add, 1 for Mul, the type's
/// greatest value for Min (`+inf` on floats, `i64::MAX` on ints), the least
/// for Max, all-ones for BitAnd, 0 for BitOr and BitXor. Bitwise kinds exist
/// only on `Int`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CombineOp {
    kind: CombineKind,
    identity: Scalar,
}

impl CombineOp {
    /// Build the operator for an element type. Returns `None` for bitwise
    /// kinds on float types, which have no such operator.
    pub fn new(kind: CombineKind, elem: ElemType) -> Option<CombineOp> {
        use CombineKind::*;
        let identity = match (kind, elem) {
            (Add, _) => Scalar::zero(elem),
            (Mul, _) => Scalar::one(elem),
            (Min, ElemType::Int) => Scalar::Int(i64::MAX),
            (Min, ElemType::F32) => Scalar::F32(f32::INFINITY),
            (Min, ElemType::F64) => Scalar::F64(f64::INFINITY),
            (Max, ElemType::Int) => Scalar::Int(i64::MIN),
            (Max, ElemType::F32) => Scalar::F32(f32::NEG_INFINITY),
            (Max, ElemType::F64) => Scalar::F64(f64::NEG_INFINITY),
            (BitAnd, ElemType::Int) => Scalar::Int(-1),
            (BitOr | BitXor, ElemType::Int) => Scalar::Int(0),
            (BitAnd | BitOr | BitXor, _) => return None,
        };
        Some(CombineOp { kind, identity })
    }

    pub fn kind(self) -> CombineKind {
        self.kind
    }

    pub fn elem_type(self) -> ElemType {
        self.identity.elem_type()
    }

    /// The operator's identity element.
    pub fn identity(self) -> Scalar {
        self.identity
    }

    /// Apply the operator to two operands of its element type.
    pub fn apply(self, a: Scalar, b: Scalar) -> Result<Scalar, OpError> {
        match self.kind {
            CombineKind::Add => scalar::add(a, b),
            CombineKind::Mul => scalar::mul(a, b),
            CombineKind::Min => scalar::min(a, b),
            CombineKind::Max => scalar::max(a, b),
            CombineKind::BitAnd => scalar::bit_and(a, b),
            CombineKind::BitOr => scalar::bit_or(a, b),
            CombineKind::BitXor => scalar::bit_xor(a, b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int_op(kind: CombineKind) -> CombineOp {
        CombineOp::new(kind, ElemType::Int).unwrap()
    }

    #[test]
    fn identities_are_fixed_by_kind_and_type() {
        assert_eq!(int_op(CombineKind::Add).identity(), Scalar::Int(0));
        assert_eq!(int_op(CombineKind::Mul).identity(), Scalar::Int(1));
        assert_eq!(int_op(CombineKind::Min).identity(), Scalar::Int(i64::MAX));
        assert_eq!(int_op(CombineKind::Max).identity(), Scalar::Int(i64::MIN));
        assert_eq!(int_op(CombineKind::BitAnd).identity(), Scalar::Int(-1));
        assert_eq!(int_op(CombineKind::BitOr).identity(), Scalar::Int(0));
        assert_eq!(int_op(CombineKind::BitXor).identity(), Scalar::Int(0));
        assert_eq!(
            CombineOp::new(CombineKind::Min, ElemType::F32).unwrap().identity(),
            Scalar::F32(f32::INFINITY)
        );
        assert_eq!(
            CombineOp::new(CombineKind::Max, ElemType::F64).unwrap().identity(),
            Scalar::F64(f64::NEG_INFINITY)
        );
    }

    #[test]
    fn bitwise_kinds_do_not_exist_on_floats() {
        for kind in [CombineKind::BitAnd, CombineKind::BitOr, CombineKind::BitXor] {
            assert!(CombineOp::new(kind, ElemType::F32).is_none());
            assert!(CombineOp::new(kind, ElemType::F64).is_none());
        }
    }

    #[test]
    fn idempotence_matches_the_kind_table() {
        assert!(CombineKind::Min.is_idempotent());
        assert!(CombineKind::Max.is_idempotent());
        assert!(CombineKind::BitAnd.is_idempotent());
        assert!(CombineKind::BitOr.is_idempotent());
        assert!(!CombineKind::Add.is_idempotent());
        assert!(!CombineKind::Mul.is_idempotent());
        assert!(!CombineKind::BitXor.is_idempotent());
    }

    proptest! {
        // On Int every combine operator is exactly associative and
        // commutative, and its identity really is an identity.
        #[test]
        fn int_laws_hold(a in any::<i64>(), b in any::<i64>(), c in any::<i64>()) {
            for kind in CombineKind::ALL {
                let op = int_op(kind);
                let (a, b, c) = (Scalar::Int(a), Scalar::Int(b), Scalar::Int(c));
                let ab_c = op.apply(op.apply(a, b).unwrap(), c).unwrap();
                let a_bc = op.apply(a, op.apply(b, c).unwrap()).unwrap();
                prop_assert_eq!(ab_c, a_bc);
                prop_assert_eq!(op.apply(a, b).unwrap(), op.apply(b, a).unwrap());
                prop_assert_eq!(op.apply(a, op.identity()).unwrap(), a);
                if kind.is_idempotent() {
                    prop_assert_eq!(op.apply(a, a).unwrap(), a);
                }
            }
        }
    }
}
