//! Kernel intermediate representation.
//!
//! Programs are structured (no gotos): straight-line `Let`/`Assign`/store
//! instructions plus `If`, `While`, and `Barrier`. A wavefront executes the
//! then-side of an `If` with mask `active AND pred` and the else-side with
//! `active AND NOT pred`, reconverging at the join; `While` re-evaluates its
//! guard each iteration and masks off exited lanes until all are out.
//!
//! The [`dsl`] module provides terse constructors so kernel builders read
//! close to the source they model.

use std::fmt;

use crate::scalar::{ElemType, Scalar};

/// Per-lane built-in values available to every program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    /// Global work-item index in `[0, global_size)`.
    GlobalId,
    /// Work-item index within its work-group, in `[0, local_size)`.
    LocalId,
    /// Work-group index in `[0, global_size / local_size)`.
    GroupId,
    GlobalSize,
    LocalSize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    /// Arithmetic negation (wrapping on `Int`).
    Neg,
    /// Logical not on `Int`: 0 becomes 1, non-zero becomes 0.
    Not,
    /// Numeric conversion to the target element type.
    Cast(ElemType),
}

/// Binary operators. Comparisons yield `Int` 0 or 1 regardless of operand
/// type; `And`/`Or`/`Xor` are bitwise (which coincides with logical on 0/1
/// flags); shifts and `Mod` exist on `Int` only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
    Xor,
    Shl,
    Shr,
    Mod,
}

/// A side-effect-free expression evaluated per lane.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Builtin(Builtin),
    /// A `Let`-bound variable or scalar parameter.
    Var(String),
    /// `buffer[index]`; the index must be `Int`-typed and in bounds.
    LoadGlobal(String, Box<Expr>),
    /// `local_array[index]` within the lane's work-group.
    LoadLocal(String, Box<Expr>),
    /// The named variable's value in lane `i + delta` of the same wavefront;
    /// lanes with `i + delta >= wavefront_width` receive their own value.
    ShflDown(String, u32),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    fn bin(self, op: BinOp, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(self), Box::new(rhs))
    }

    pub fn lt(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Lt, rhs)
    }
    pub fn le(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Le, rhs)
    }
    pub fn gt(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Gt, rhs)
    }
    pub fn ge(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Ge, rhs)
    }
    pub fn eq_(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Eq, rhs)
    }
    pub fn ne(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Ne, rhs)
    }
    pub fn min_(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Min, rhs)
    }
    pub fn max_(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Max, rhs)
    }
    pub fn and(self, rhs: Expr) -> Expr {
        self.bin(BinOp::And, rhs)
    }
    pub fn or(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Or, rhs)
    }
    pub fn xor(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Xor, rhs)
    }
    pub fn shl(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Shl, rhs)
    }
    pub fn shr(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Shr, rhs)
    }
    pub fn rem(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Mod, rhs)
    }
    pub fn cast(self, t: ElemType) -> Expr {
        Expr::Unary(UnaryOp::Cast(t), Box::new(self))
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Add, rhs)
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Sub, rhs)
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Mul, rhs)
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        self.bin(BinOp::Div, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Unary(UnaryOp::Neg, Box::new(self))
    }
}

/// One statement of a program body.
#[derive(Debug, Clone, PartialEq)]
pub enum Instr {
    /// Declare a variable in the current scope and initialise it per lane.
    Let(String, Expr),
    /// Overwrite a previously declared variable per lane.
    Assign(String, Expr),
    /// `buffer[index] = value` per active lane.
    StoreGlobal(String, Expr, Expr),
    /// `local_array[index] = value` per active lane.
    StoreLocal(String, Expr, Expr),
    /// Work-group rendezvous. Must be reached by every lane of the group
    /// under uniform control flow, otherwise the launch fails.
    Barrier,
    If(Expr, Vec<Instr>, Vec<Instr>),
    While(Expr, Vec<Instr>),
}

/// A global-memory buffer parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferParam {
    pub name: String,
    pub elem: ElemType,
    /// Whether the program may store to the buffer.
    pub writable: bool,
}

/// A uniform scalar parameter (same value for every lane).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarParam {
    pub name: String,
    pub elem: ElemType,
}

/// A per-work-group local-memory array.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalArray {
    pub name: String,
    pub elem: ElemType,
    /// Length in elements (= words) per work-group.
    pub len: usize,
}

/// A complete kernel program.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub name: String,
    pub buffers: Vec<BufferParam>,
    pub scalars: Vec<ScalarParam>,
    pub local_arrays: Vec<LocalArray>,
    pub body: Vec<Instr>,
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "program `{}`", self.name)
    }
}

// ---------------------------------------------------------------------------
// Builder DSL
// ---------------------------------------------------------------------------

/// Terse constructors for building programs in kernel code.
pub mod dsl {
    use super::*;

    /// `Int` constant.
    pub fn ci(v: i64) -> Expr {
        Expr::Const(Scalar::Int(v))
    }

    /// Constant of any scalar value.
    pub fn cs(v: Scalar) -> Expr {
        Expr::Const(v)
    }

    /// Variable reference.
    pub fn v(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn global_id() -> Expr {
        Expr::Builtin(Builtin::GlobalId)
    }
    pub fn local_id() -> Expr {
        Expr::Builtin(Builtin::LocalId)
    }
    pub fn group_id() -> Expr {
        Expr::Builtin(Builtin::GroupId)
    }
    pub fn global_size() -> Expr {
        Expr::Builtin(Builtin::GlobalSize)
    }
    pub fn local_size() -> Expr {
        Expr::Builtin(Builtin::LocalSize)
    }

    pub fn load(buffer: &str, index: Expr) -> Expr {
        Expr::LoadGlobal(buffer.to_string(), Box::new(index))
    }

    pub fn load_local(array: &str, index: Expr) -> Expr {
        Expr::LoadLocal(array.to_string(), Box::new(index))
    }

    pub fn shfl_down(var: &str, delta: u32) -> Expr {
        Expr::ShflDown(var.to_string(), delta)
    }

    pub fn let_(name: &str, init: Expr) -> Instr {
        Instr::Let(name.to_string(), init)
    }

    pub fn assign(name: &str, value: Expr) -> Instr {
        Instr::Assign(name.to_string(), value)
    }

    pub fn store(buffer: &str, index: Expr, value: Expr) -> Instr {
        Instr::StoreGlobal(buffer.to_string(), index, value)
    }

    pub fn store_local(array: &str, index: Expr, value: Expr) -> Instr {
        Instr::StoreLocal(array.to_string(), index, value)
    }

    pub fn barrier() -> Instr {
        Instr::Barrier
    }

    pub fn if_(cond: Expr, then: Vec<Instr>, otherwise: Vec<Instr>) -> Instr {
        Instr::If(cond, then, otherwise)
    }

    pub fn while_(cond: Expr, body: Vec<Instr>) -> Instr {
        Instr::While(cond, body)
    }
}
