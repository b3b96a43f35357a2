//! Scalar values of the abstract machine.
//!
//! Three element types exist: `Int` (64-bit two's complement with wrapping
//! arithmetic), `F32`, and `F64` (IEEE-754, round-to-nearest-even, the host
//! float semantics). Operations never mix element types; the static validator
//! rejects mixed expressions before execution.

use std::fmt;

/// Element type of a scalar, buffer, or local array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElemType {
    Int,
    F32,
    F64,
}

impl fmt::Display for ElemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElemType::Int => write!(f, "int"),
            ElemType::F32 => write!(f, "f32"),
            ElemType::F64 => write!(f, "f64"),
        }
    }
}

/// A single machine value.
///
/// `Int` arithmetic wraps modulo 2^64; comparisons are signed. Floats follow
/// host IEEE-754 semantics. Comparison operators yield `Int` 0 or 1 so that
/// predicates can participate in ordinary arithmetic (flag algebra).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Int(i64),
    F32(f32),
    F64(f64),
}

impl Scalar {
    pub fn elem_type(self) -> ElemType {
        match self {
            Scalar::Int(_) => ElemType::Int,
            Scalar::F32(_) => ElemType::F32,
            Scalar::F64(_) => ElemType::F64,
        }
    }

    /// Zero of the given element type.
    pub fn zero(t: ElemType) -> Scalar {
        match t {
            ElemType::Int => Scalar::Int(0),
            ElemType::F32 => Scalar::F32(0.0),
            ElemType::F64 => Scalar::F64(0.0),
        }
    }

    /// One of the given element type.
    pub fn one(t: ElemType) -> Scalar {
        match t {
            ElemType::Int => Scalar::Int(1),
            ElemType::F32 => Scalar::F32(1.0),
            ElemType::F64 => Scalar::F64(1.0),
        }
    }

    /// Truthiness for control flow: `Int` non-zero. Conditions are required
    /// to be `Int`-typed by validation, so floats never reach this.
    pub fn is_truthy(self) -> bool {
        match self {
            Scalar::Int(v) => v != 0,
            Scalar::F32(v) => v != 0.0,
            Scalar::F64(v) => v != 0.0,
        }
    }

    /// The `Int` payload, if this is an `Int`.
    pub fn as_int(self) -> Option<i64> {
        match self {
            Scalar::Int(v) => Some(v),
            _ => None,
        }
    }

    /// Numeric value as `f64`, for reporting only (lossy on large ints).
    pub fn to_f64_lossy(self) -> f64 {
        match self {
            Scalar::Int(v) => v as f64,
            Scalar::F32(v) => v as f64,
            Scalar::F64(v) => v,
        }
    }

    /// Bit-exact equality: distinguishes NaN payloads and signed zeros are
    /// compared by bits, not by IEEE `==`. Used by determinism tests.
    pub fn bits_eq(self, other: Scalar) -> bool {
        match (self, other) {
            (Scalar::Int(a), Scalar::Int(b)) => a == b,
            (Scalar::F32(a), Scalar::F32(b)) => a.to_bits() == b.to_bits(),
            (Scalar::F64(a), Scalar::F64(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Int(v) => write!(f, "{v}"),
            Scalar::F32(v) => write!(f, "{v}"),
            Scalar::F64(v) => write!(f, "{v}"),
        }
    }
}

/// Error applying a scalar operation. The executor attaches lane context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpError {
    /// Operand types disagree, or the operation does not exist for the type.
    Type {
        op: &'static str,
        lhs: ElemType,
        rhs: ElemType,
    },
    /// Integer division or remainder by zero.
    DivideByZero,
}

// ---------------------------------------------------------------------------
// Arithmetic primitives
// ---------------------------------------------------------------------------

fn int_flag(b: bool) -> Scalar {
    Scalar::Int(b as i64)
}

macro_rules! arith {
    ($name:ident, $opname:literal, $int:expr, $f32:expr, $f64:expr) => {
        pub(crate) fn $name(a: Scalar, b: Scalar) -> Result<Scalar, OpError> {
            match (a, b) {
                (Scalar::Int(x), Scalar::Int(y)) => Ok(Scalar::Int($int(x, y))),
                (Scalar::F32(x), Scalar::F32(y)) => Ok(Scalar::F32($f32(x, y))),
                (Scalar::F64(x), Scalar::F64(y)) => Ok(Scalar::F64($f64(x, y))),
                _ => Err(OpError::Type {
                    op: $opname,
                    lhs: a.elem_type(),
                    rhs: b.elem_type(),
                }),
            }
        }
    };
}

arith!(add, "add", |x: i64, y: i64| x.wrapping_add(y), |x, y| x + y, |x, y| x + y);
arith!(sub, "sub", |x: i64, y: i64| x.wrapping_sub(y), |x, y| x - y, |x, y| x - y);
arith!(mul, "mul", |x: i64, y: i64| x.wrapping_mul(y), |x, y| x * y, |x, y| x * y);
arith!(min, "min", |x: i64, y: i64| x.min(y), f32::min, f64::min);
arith!(max, "max", |x: i64, y: i64| x.max(y), f32::max, f64::max);

pub(crate) fn div(a: Scalar, b: Scalar) -> Result<Scalar, OpError> {
    match (a, b) {
        (Scalar::Int(_), Scalar::Int(0)) => Err(OpError::DivideByZero),
        (Scalar::Int(x), Scalar::Int(y)) => Ok(Scalar::Int(x.wrapping_div(y))),
        (Scalar::F32(x), Scalar::F32(y)) => Ok(Scalar::F32(x / y)),
        (Scalar::F64(x), Scalar::F64(y)) => Ok(Scalar::F64(x / y)),
        _ => Err(OpError::Type {
            op: "div",
            lhs: a.elem_type(),
            rhs: b.elem_type(),
        }),
    }
}

macro_rules! compare {
    ($name:ident, $opname:literal, $cmp:expr) => {
        pub(crate) fn $name(a: Scalar, b: Scalar) -> Result<Scalar, OpError> {
            match (a, b) {
                (Scalar::Int(x), Scalar::Int(y)) => Ok(int_flag($cmp(&x, &y))),
                (Scalar::F32(x), Scalar::F32(y)) => Ok(int_flag($cmp(&x, &y))),
                (Scalar::F64(x), Scalar::F64(y)) => Ok(int_flag($cmp(&x, &y))),
                _ => Err(OpError::Type {
                    op: $opname,
                    lhs: a.elem_type(),
                    rhs: b.elem_type(),
                }),
            }
        }
    };
}

compare!(lt, "lt", |x, y| x < y);
compare!(le, "le", |x, y| x <= y);
compare!(gt, "gt", |x, y| x > y);
compare!(ge, "ge", |x, y| x >= y);
compare!(eq, "eq", |x, y| x == y);
compare!(ne, "ne", |x, y| x != y);

macro_rules! int_only {
    ($name:ident, $opname:literal, $int:expr) => {
        pub(crate) fn $name(a: Scalar, b: Scalar) -> Result<Scalar, OpError> {
            match (a, b) {
                (Scalar::Int(x), Scalar::Int(y)) => $int(x, y),
                _ => Err(OpError::Type {
                    op: $opname,
                    lhs: a.elem_type(),
                    rhs: b.elem_type(),
                }),
            }
        }
    };
}

int_only!(bit_and, "and", |x: i64, y: i64| Ok(Scalar::Int(x & y)));
int_only!(bit_or, "or", |x: i64, y: i64| Ok(Scalar::Int(x | y)));
int_only!(bit_xor, "xor", |x: i64, y: i64| Ok(Scalar::Int(x ^ y)));
int_only!(shl, "shl", |x: i64, y: i64| Ok(Scalar::Int(
    x.wrapping_shl(y as u32)
)));
int_only!(shr, "shr", |x: i64, y: i64| Ok(Scalar::Int(
    x.wrapping_shr(y as u32)
)));
int_only!(rem, "mod", |x: i64, y: i64| if y == 0 {
    Err(OpError::DivideByZero)
} else {
    Ok(Scalar::Int(x.wrapping_rem(y)))
});

pub(crate) fn neg(a: Scalar) -> Result<Scalar, OpError> {
    match a {
        Scalar::Int(x) => Ok(Scalar::Int(x.wrapping_neg())),
        Scalar::F32(x) => Ok(Scalar::F32(-x)),
        Scalar::F64(x) => Ok(Scalar::F64(-x)),
    }
}

pub(crate) fn not(a: Scalar) -> Result<Scalar, OpError> {
    match a {
        Scalar::Int(x) => Ok(int_flag(x == 0)),
        _ => Err(OpError::Type {
            op: "not",
            lhs: a.elem_type(),
            rhs: a.elem_type(),
        }),
    }
}

/// Numeric conversion. `Int` to float rounds to nearest; float to `Int`
/// truncates toward zero with saturation at the `i64` range (Rust `as`).
pub(crate) fn cast(target: ElemType, a: Scalar) -> Scalar {
    match (target, a) {
        (ElemType::Int, Scalar::Int(x)) => Scalar::Int(x),
        (ElemType::Int, Scalar::F32(x)) => Scalar::Int(x as i64),
        (ElemType::Int, Scalar::F64(x)) => Scalar::Int(x as i64),
        (ElemType::F32, Scalar::Int(x)) => Scalar::F32(x as f32),
        (ElemType::F32, Scalar::F32(x)) => Scalar::F32(x),
        (ElemType::F32, Scalar::F64(x)) => Scalar::F32(x as f32),
        (ElemType::F64, Scalar::Int(x)) => Scalar::F64(x as f64),
        (ElemType::F64, Scalar::F32(x)) => Scalar::F64(x as f64),
        (ElemType::F64, Scalar::F64(x)) => Scalar::F64(x),
    }
}
