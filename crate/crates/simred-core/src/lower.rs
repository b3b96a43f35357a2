//! Lowering from the nested instruction tree to a flat program.
//!
//! The interpreter does not walk the `Instr` tree directly. Lowering
//! resolves every name to a dense index once — variables to register slots,
//! buffers and local arrays to table positions — and flattens structured
//! control flow into ops with pre-computed jump targets. Expression trees
//! move into a single arena so evaluation needs no pointer chasing and every
//! syntactic memory-access node keeps a stable id for metric grouping.
//!
//! Lowering assumes the program has already passed validation; it panics on
//! malformed input rather than reporting errors.

use std::collections::HashMap;

use crate::ir::{Builtin, Expr, Instr, Program, UnaryOp};
use crate::scalar::{ElemType, Scalar};

/// Index of an expression node in [`FlatProgram::exprs`].
pub(crate) type ExprId = u32;

/// Lowered expression node. Children always precede parents in the arena.
#[derive(Debug, Clone)]
pub(crate) enum LExpr {
    Const(Scalar),
    Builtin(Builtin),
    /// Read of a register slot (a `Let` variable or scalar parameter).
    Slot(u16),
    LoadGlobal { buf: u16, idx: ExprId },
    LoadLocal { arr: u16, idx: ExprId },
    ShflDown { slot: u16, delta: u32 },
    Unary(UnaryOp, ExprId),
    Binary(crate::ir::BinOp, ExprId, ExprId),
}

/// Flat instruction. Jump targets are op indices fixed at lowering time.
#[derive(Debug, Clone, Copy)]
pub(crate) enum FlatOp {
    Let { slot: u16, expr: ExprId },
    Assign { slot: u16, expr: ExprId },
    StoreGlobal { buf: u16, index: ExprId, value: ExprId },
    StoreLocal { arr: u16, index: ExprId, value: ExprId },
    Barrier,
    /// `else_pc` is where a lane group with an empty then-mask resumes: the
    /// first else op when an else branch exists, otherwise the `IfEnd`.
    IfBegin { cond: ExprId, else_pc: usize, end_pc: usize },
    /// Fall-through marker between the branches; `end_pc` is the `IfEnd`.
    Else { end_pc: usize },
    IfEnd,
    /// Loop head; evaluates the guard each arrival. `exit_pc` is the op
    /// after the matching `LoopEnd`.
    LoopBegin { cond: ExprId, exit_pc: usize },
    LoopEnd { head_pc: usize },
}

/// A local array's placement in the group-shared word space.
#[derive(Debug, Clone)]
pub(crate) struct LocalArrayInfo {
    pub name: String,
    pub elem: ElemType,
    pub base: usize,
    pub len: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct BufferInfo {
    pub name: String,
    pub elem: ElemType,
}

#[derive(Debug, Clone)]
pub(crate) struct FlatProgram {
    pub ops: Vec<FlatOp>,
    pub exprs: Vec<LExpr>,
    /// Register slots per lane (scalar parameters first, then one per `Let`
    /// site).
    pub num_slots: usize,
    /// Slot of each scalar parameter, in `Program::scalars` order.
    pub scalar_slots: Vec<u16>,
    /// Buffer parameters, in `Program::buffers` order.
    pub buffers: Vec<BufferInfo>,
    pub local_arrays: Vec<LocalArrayInfo>,
    /// Total local-memory words the program requires per group.
    pub local_words: usize,
}

// ---------------------------------------------------------------------------

struct Lowerer<'p> {
    ops: Vec<FlatOp>,
    exprs: Vec<LExpr>,
    buffer_index: HashMap<&'p str, u16>,
    local_index: HashMap<&'p str, u16>,
    /// Scope stack of name → slot bindings.
    scopes: Vec<HashMap<&'p str, u16>>,
    next_slot: u16,
}

impl<'p> Lowerer<'p> {
    fn resolve_var(&self, name: &str) -> u16 {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name).copied())
            .unwrap_or_else(|| panic!("lowering unvalidated program: unknown variable `{name}`"))
    }

    fn fresh_slot(&mut self, name: &'p str) -> u16 {
        let slot = self.next_slot;
        self.next_slot = self
            .next_slot
            .checked_add(1)
            .expect("register slot count exceeds u16");
        self.scopes.last_mut().unwrap().insert(name, slot);
        slot
    }

    fn push_expr(&mut self, node: LExpr) -> ExprId {
        let id = self.exprs.len() as ExprId;
        self.exprs.push(node);
        id
    }

    fn lower_expr(&mut self, e: &'p Expr) -> ExprId {
        match e {
            Expr::Const(s) => self.push_expr(LExpr::Const(*s)),
            Expr::Builtin(b) => self.push_expr(LExpr::Builtin(*b)),
            Expr::Var(name) => {
                let slot = self.resolve_var(name);
                self.push_expr(LExpr::Slot(slot))
            }
            Expr::LoadGlobal(name, idx) => {
                let idx = self.lower_expr(idx);
                let buf = self.buffer_index[name.as_str()];
                self.push_expr(LExpr::LoadGlobal { buf, idx })
            }
            Expr::LoadLocal(name, idx) => {
                let idx = self.lower_expr(idx);
                let arr = self.local_index[name.as_str()];
                self.push_expr(LExpr::LoadLocal { arr, idx })
            }
            Expr::ShflDown(name, delta) => {
                let slot = self.resolve_var(name);
                self.push_expr(LExpr::ShflDown { slot, delta: *delta })
            }
            Expr::Unary(op, a) => {
                let a = self.lower_expr(a);
                self.push_expr(LExpr::Unary(*op, a))
            }
            Expr::Binary(op, a, b) => {
                let a = self.lower_expr(a);
                let b = self.lower_expr(b);
                self.push_expr(LExpr::Binary(*op, a, b))
            }
        }
    }

    fn lower_block(&mut self, block: &'p [Instr]) {
        self.scopes.push(HashMap::new());
        for instr in block {
            self.lower_instr(instr);
        }
        self.scopes.pop();
    }

    fn lower_instr(&mut self, instr: &'p Instr) {
        match instr {
            Instr::Let(name, init) => {
                let expr = self.lower_expr(init);
                let slot = self.fresh_slot(name);
                self.ops.push(FlatOp::Let { slot, expr });
            }
            Instr::Assign(name, value) => {
                let expr = self.lower_expr(value);
                let slot = self.resolve_var(name);
                self.ops.push(FlatOp::Assign { slot, expr });
            }
            Instr::StoreGlobal(name, idx, value) => {
                let index = self.lower_expr(idx);
                let value = self.lower_expr(value);
                let buf = self.buffer_index[name.as_str()];
                self.ops.push(FlatOp::StoreGlobal { buf, index, value });
            }
            Instr::StoreLocal(name, idx, value) => {
                let index = self.lower_expr(idx);
                let value = self.lower_expr(value);
                let arr = self.local_index[name.as_str()];
                self.ops.push(FlatOp::StoreLocal { arr, index, value });
            }
            Instr::Barrier => self.ops.push(FlatOp::Barrier),
            Instr::If(cond, then, otherwise) => {
                let cond = self.lower_expr(cond);
                let if_pc = self.ops.len();
                self.ops.push(FlatOp::IfBegin { cond, else_pc: 0, end_pc: 0 });
                self.lower_block(then);
                let else_pc = if otherwise.is_empty() {
                    // No else branch: empty then-mask jumps straight to IfEnd.
                    None
                } else {
                    let marker_pc = self.ops.len();
                    self.ops.push(FlatOp::Else { end_pc: 0 });
                    self.lower_block(otherwise);
                    Some(marker_pc)
                };
                let end = self.ops.len();
                self.ops.push(FlatOp::IfEnd);
                match &mut self.ops[if_pc] {
                    FlatOp::IfBegin { else_pc: e, end_pc: n, .. } => {
                        *e = match else_pc {
                            Some(marker) => marker + 1,
                            None => end,
                        };
                        *n = end;
                    }
                    _ => unreachable!(),
                }
                if let Some(marker) = else_pc {
                    match &mut self.ops[marker] {
                        FlatOp::Else { end_pc: n } => *n = end,
                        _ => unreachable!(),
                    }
                }
            }
            Instr::While(cond, body) => {
                let cond = self.lower_expr(cond);
                let head_pc = self.ops.len();
                self.ops.push(FlatOp::LoopBegin { cond, exit_pc: 0 });
                self.lower_block(body);
                self.ops.push(FlatOp::LoopEnd { head_pc });
                let exit = self.ops.len();
                match &mut self.ops[head_pc] {
                    FlatOp::LoopBegin { exit_pc, .. } => *exit_pc = exit,
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// Flatten a validated program.
pub(crate) fn lower(program: &Program) -> FlatProgram {
    let buffer_index: HashMap<&str, u16> = program
        .buffers
        .iter()
        .enumerate()
        .map(|(i, b)| (b.name.as_str(), i as u16))
        .collect();
    let local_index: HashMap<&str, u16> = program
        .local_arrays
        .iter()
        .enumerate()
        .map(|(i, a)| (a.name.as_str(), i as u16))
        .collect();

    let mut lowerer = Lowerer {
        ops: Vec::new(),
        exprs: Vec::new(),
        buffer_index,
        local_index,
        scopes: vec![HashMap::new()],
        next_slot: 0,
    };

    let mut scalar_slots = Vec::with_capacity(program.scalars.len());
    for s in &program.scalars {
        scalar_slots.push(lowerer.fresh_slot(&s.name));
    }
    lowerer.lower_block(&program.body);

    let mut base = 0usize;
    let mut local_arrays = Vec::with_capacity(program.local_arrays.len());
    for a in &program.local_arrays {
        local_arrays.push(LocalArrayInfo {
            name: a.name.clone(),
            elem: a.elem,
            base,
            len: a.len,
        });
        base += a.len;
    }

    FlatProgram {
        ops: lowerer.ops,
        exprs: lowerer.exprs,
        num_slots: lowerer.next_slot as usize,
        scalar_slots,
        buffers: program
            .buffers
            .iter()
            .map(|b| BufferInfo { name: b.name.clone(), elem: b.elem })
            .collect(),
        local_arrays,
        local_words: base,
    }
}
