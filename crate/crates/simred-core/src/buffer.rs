//! Global-memory buffers.
//!
//! A buffer is a homogeneous, linearly addressed array of scalars. Typed
//! storage guarantees the homogeneity invariant by construction.

use crate::scalar::{ElemType, Scalar};

/// A global-memory buffer bound to a kernel parameter at launch.
#[derive(Debug, Clone, PartialEq)]
pub enum Buffer {
    Int(Vec<i64>),
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl Buffer {
    /// A buffer of `len` copies of `value`.
    pub fn filled(value: Scalar, len: usize) -> Buffer {
        match value {
            Scalar::Int(v) => Buffer::Int(vec![v; len]),
            Scalar::F32(v) => Buffer::F32(vec![v; len]),
            Scalar::F64(v) => Buffer::F64(vec![v; len]),
        }
    }

    pub fn elem_type(&self) -> ElemType {
        match self {
            Buffer::Int(_) => ElemType::Int,
            Buffer::F32(_) => ElemType::F32,
            Buffer::F64(_) => ElemType::F64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Buffer::Int(v) => v.len(),
            Buffer::F32(v) => v.len(),
            Buffer::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Element at `i`. Panics if out of range; the executor bounds-checks
    /// before calling.
    pub fn get(&self, i: usize) -> Scalar {
        match self {
            Buffer::Int(v) => Scalar::Int(v[i]),
            Buffer::F32(v) => Scalar::F32(v[i]),
            Buffer::F64(v) => Scalar::F64(v[i]),
        }
    }

    /// Store `value` at `i`. Panics on type mismatch or out-of-range index;
    /// validation and the executor's bounds checks make both unreachable.
    pub fn set(&mut self, i: usize, value: Scalar) {
        match (self, value) {
            (Buffer::Int(v), Scalar::Int(x)) => v[i] = x,
            (Buffer::F32(v), Scalar::F32(x)) => v[i] = x,
            (Buffer::F64(v), Scalar::F64(x)) => v[i] = x,
            (b, x) => panic!(
                "type-checked store mismatch: {} into {} buffer",
                x.elem_type(),
                b.elem_type()
            ),
        }
    }

    /// Iterate elements as scalars.
    pub fn iter(&self) -> impl Iterator<Item = Scalar> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Bit-exact buffer equality (NaN-safe), for determinism checks.
    pub fn bits_eq(&self, other: &Buffer) -> bool {
        self.len() == other.len()
            && self.elem_type() == other.elem_type()
            && self.iter().zip(other.iter()).all(|(a, b)| a.bits_eq(b))
    }
}

impl From<Vec<i64>> for Buffer {
    fn from(v: Vec<i64>) -> Buffer {
        Buffer::Int(v)
    }
}

impl From<Vec<f32>> for Buffer {
    fn from(v: Vec<f32>) -> Buffer {
        Buffer::F32(v)
    }
}

impl From<Vec<f64>> for Buffer {
    fn from(v: Vec<f64>) -> Buffer {
        Buffer::F64(v)
    }
}
