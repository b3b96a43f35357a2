//! The abstract machine: masked execution, scheduling, and metric counting.
//!
//! A launch runs one work-group at a time (groups share only global memory
//! and never synchronise with each other, so sequential group execution is
//! observationally exact). Within a group, execution is organised around
//! *units*: under [`Scheduler::LockstepWorkgroup`] the whole group is one
//! unit; under the wavefront schedulers each wavefront is its own unit.
//!
//! Every unit carries a program counter, an execution mask, and a stack of
//! reconvergence frames. A statement executes in two phases: first every
//! active lane evaluates its expressions against the *pre-statement* state
//! (register reads, memory loads, shuffles all see old values), then the
//! results commit in ascending lane order. The phase boundary is the unit,
//! so lockstep gives whole-group read-before-write while wavefront units
//! give per-wavefront read-before-write — exactly the difference the hazard
//! detector makes visible.
//!
//! Metrics are counted per wavefront regardless of unit shape: a lockstep
//! unit is partitioned into wavefront-sized lane ranges and each range with
//! at least one active lane counts as one issue. All three schedulers
//! therefore report identical metrics for any program.

use std::collections::HashMap;

use crate::buffer::Buffer;
use crate::config::{LaunchConfig, Scheduler};
use crate::error::ExecError;
use crate::hazard::{detect_hazards, AccessLog, LocalAccessRecord};
use crate::ir::{BinOp, Builtin, Program, UnaryOp};
use crate::lower::{lower, ExprId, FlatOp, FlatProgram, LExpr};
use crate::memmodel::{bank_conflict_degree, coalesce_transactions};
use crate::metrics::Metrics;
use crate::scalar::{self, OpError, Scalar};
use crate::validate::validate_program;

/// Result of a launch: final buffer contents (bound parameters plus any
/// extra bindings passed through untouched), accumulated metrics, and the
/// local-memory access log when hazard detection was enabled.
#[derive(Debug, Clone)]
pub struct LaunchOutput {
    pub buffers: HashMap<String, Buffer>,
    pub metrics: Metrics,
    pub access_log: Option<AccessLog>,
}

/// Validate, lower, bind, and run a program under the given configuration.
///
/// `buffers` must contain one binding per declared buffer parameter with a
/// matching element type; extra entries are returned unchanged. `scalars`
/// must cover every declared scalar parameter.
pub fn launch(
    program: &Program,
    cfg: &LaunchConfig,
    buffers: HashMap<String, Buffer>,
    scalars: &HashMap<String, Scalar>,
) -> Result<LaunchOutput, ExecError> {
    cfg.check().map_err(ExecError::InvalidConfig)?;
    let report = validate_program(program);
    if !report.ok() {
        return Err(ExecError::InvalidProgram(report));
    }
    let flat = lower(program);
    if flat.local_words > cfg.local_mem_words {
        return Err(ExecError::LocalMemOverflow {
            required: flat.local_words,
            available: cfg.local_mem_words,
        });
    }

    let mut buffers = buffers;
    let mut bound = Vec::with_capacity(flat.buffers.len());
    for b in &flat.buffers {
        let buf = buffers
            .remove(&b.name)
            .ok_or_else(|| ExecError::MissingBinding(b.name.clone()))?;
        if buf.elem_type() != b.elem {
            return Err(ExecError::TypeMismatch(format!(
                "buffer `{}` is declared {} but bound as {}",
                b.name,
                b.elem,
                buf.elem_type()
            )));
        }
        bound.push(buf);
    }
    let mut scalar_values = Vec::with_capacity(program.scalars.len());
    for s in &program.scalars {
        let val = *scalars
            .get(&s.name)
            .ok_or_else(|| ExecError::MissingBinding(s.name.clone()))?;
        if val.elem_type() != s.elem {
            return Err(ExecError::TypeMismatch(format!(
                "scalar `{}` is declared {} but bound as {}",
                s.name,
                s.elem,
                val.elem_type()
            )));
        }
        scalar_values.push(val);
    }

    let mut metrics = Metrics::default();
    let mut log = AccessLog::default();
    for group in 0..cfg.num_groups() {
        let group_log = run_group(&flat, cfg, group, &scalar_values, &mut bound, &mut metrics)?;
        if cfg.hazard_detection {
            log.per_group.push(group_log);
        }
    }
    if cfg.hazard_detection {
        metrics.hazards = detect_hazards(&log);
    }

    let mut out = buffers;
    for (info, buf) in flat.buffers.iter().zip(bound) {
        out.insert(info.name.clone(), buf);
    }
    Ok(LaunchOutput {
        buffers: out,
        metrics,
        access_log: if cfg.hazard_detection { Some(log) } else { None },
    })
}

// ---------------------------------------------------------------------------
// Execution masks
// ---------------------------------------------------------------------------

/// Bitset over a unit's lanes.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Mask {
    n: usize,
    words: Vec<u64>,
}

impl Mask {
    fn full(n: usize) -> Mask {
        let mut words = vec![!0u64; n.div_ceil(64)];
        if n % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (n % 64)) - 1;
            }
        }
        Mask { n, words }
    }

    fn empty(n: usize) -> Mask {
        Mask { n, words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 != 0
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn is_full(&self) -> bool {
        self.count() == self.n
    }

    fn any_in(&self, start: usize, len: usize) -> bool {
        (start..start + len).any(|i| self.get(i))
    }

    fn and(&self, other: &Mask) -> Mask {
        debug_assert_eq!(self.n, other.n);
        Mask {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn and_not(&self, other: &Mask) -> Mask {
        debug_assert_eq!(self.n, other.n);
        Mask {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Units and reconvergence frames
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UnitState {
    Running,
    /// Arrived at a barrier; waiting for the group rendezvous.
    Blocked,
    Done,
}

/// A wavefront-sized span of a unit's lanes, used for metric attribution.
#[derive(Debug, Clone, Copy)]
struct RangeInfo {
    /// Unit-relative first lane.
    start: usize,
    len: usize,
}

#[derive(Debug, Clone)]
enum Frame {
    If {
        saved: Mask,
        else_mask: Mask,
    },
    Loop {
        head_pc: usize,
        saved: Mask,
    },
}

/// An independently scheduled lane set: the whole group under lockstep, one
/// wavefront otherwise.
struct Unit {
    /// Group-relative index of the unit's first lane.
    first: usize,
    count: usize,
    ranges: Vec<RangeInfo>,
    pc: usize,
    mask: Mask,
    frames: Vec<Frame>,
    state: UnitState,
}

impl Unit {
    fn new(first: usize, count: usize, wavefront_width: usize) -> Unit {
        let ranges = (0..count)
            .step_by(wavefront_width)
            .map(|start| RangeInfo {
                start,
                len: wavefront_width.min(count - start),
            })
            .collect();
        Unit {
            first,
            count,
            ranges,
            pc: 0,
            mask: Mask::full(count),
            frames: Vec::new(),
            state: UnitState::Running,
        }
    }
}

fn make_units(cfg: &LaunchConfig) -> Vec<Unit> {
    let ls = cfg.local_size;
    let w = cfg.wavefront_width;
    match cfg.scheduler {
        Scheduler::LockstepWorkgroup => vec![Unit::new(0, ls, w)],
        Scheduler::WavefrontRoundRobin | Scheduler::WavefrontSerial => (0..ls)
            .step_by(w)
            .map(|first| Unit::new(first, w.min(ls - first), w))
            .collect(),
    }
}

// ---------------------------------------------------------------------------
// Per-group execution
// ---------------------------------------------------------------------------

/// Sentinel metric-grouping id for a store's own address stream (loads use
/// their expression-arena id).
const STORE_NODE: u32 = u32::MAX;

fn run_group(
    flat: &FlatProgram,
    cfg: &LaunchConfig,
    group: usize,
    scalar_values: &[Scalar],
    buffers: &mut [Buffer],
    metrics: &mut Metrics,
) -> Result<Vec<LocalAccessRecord>, ExecError> {
    let ls = cfg.local_size;
    let num_slots = flat.num_slots;
    let mut regs = vec![Scalar::Int(0); ls * num_slots];
    for lane in 0..ls {
        for (k, &slot) in flat.scalar_slots.iter().enumerate() {
            regs[lane * num_slots + slot as usize] = scalar_values[k];
        }
    }
    // Local memory starts as the zero of each array's element type, so
    // reading before writing is deterministic (and clearly meaningless).
    let mut locals = vec![Scalar::Int(0); flat.local_words];
    for a in &flat.local_arrays {
        let zero = Scalar::zero(a.elem);
        for word in a.base..a.base + a.len {
            locals[word] = zero;
        }
    }

    let mut exec = GroupExec {
        flat,
        cfg,
        group,
        num_slots,
        regs,
        locals,
        buffers,
        metrics,
        epoch: 0,
        hazards_on: cfg.hazard_detection,
        log: Vec::new(),
        reg_stash: Vec::new(),
        store_stash: Vec::new(),
        g_reads: Vec::new(),
        g_writes: Vec::new(),
        l_events: Vec::new(),
        shfl_nodes: Vec::new(),
        addr_scratch: Vec::new(),
    };
    let mut units = make_units(cfg);
    exec.run_units(&mut units)?;
    Ok(exec.log)
}

struct GroupExec<'a> {
    flat: &'a FlatProgram,
    cfg: &'a LaunchConfig,
    group: usize,
    num_slots: usize,
    /// Lane-major register file: slot `s` of lane `l` is `regs[l * num_slots + s]`.
    regs: Vec<Scalar>,
    /// Group-shared local memory, all arrays packed by their base offsets.
    locals: Vec<Scalar>,
    buffers: &'a mut [Buffer],
    metrics: &'a mut Metrics,
    /// Barrier epoch; incremented at every group rendezvous.
    epoch: u32,
    hazards_on: bool,
    log: Vec<LocalAccessRecord>,
    // Reusable scratch, cleared per statement or per wavefront range.
    reg_stash: Vec<(u32, Scalar)>,
    store_stash: Vec<(usize, Scalar)>,
    g_reads: Vec<(u16, u64)>,
    g_writes: Vec<(u16, u64)>,
    /// (metric node, group-relative lane, word)
    l_events: Vec<(u32, u32, u64)>,
    shfl_nodes: Vec<u32>,
    addr_scratch: Vec<u64>,
}

impl<'a> GroupExec<'a> {
    // -- scheduling ---------------------------------------------------------

    fn run_units(&mut self, units: &mut [Unit]) -> Result<(), ExecError> {
        loop {
            match self.cfg.scheduler {
                Scheduler::LockstepWorkgroup | Scheduler::WavefrontSerial => {
                    for unit in units.iter_mut() {
                        while unit.state == UnitState::Running {
                            self.step(unit)?;
                        }
                    }
                }
                Scheduler::WavefrontRoundRobin => {
                    for unit in units.iter_mut() {
                        if unit.state == UnitState::Running {
                            self.step(unit)?;
                        }
                    }
                }
            }
            if units.iter().all(|u| u.state == UnitState::Done) {
                return Ok(());
            }
            if units.iter().any(|u| u.state == UnitState::Running) {
                continue;
            }
            self.release_barrier(units)?;
        }
    }

    /// Rendezvous: every unit is blocked or done. All must be blocked at the
    /// same barrier; releasing counts it once and opens a new hazard epoch.
    fn release_barrier(&mut self, units: &mut [Unit]) -> Result<(), ExecError> {
        if units.iter().any(|u| u.state == UnitState::Done) {
            return Err(ExecError::BarrierDivergence {
                group: self.group,
                detail: "some wavefronts finished while others wait at a barrier".to_string(),
            });
        }
        let pc0 = units[0].pc;
        if units.iter().any(|u| u.pc != pc0) {
            return Err(ExecError::BarrierDivergence {
                group: self.group,
                detail: "wavefronts are waiting at different barriers".to_string(),
            });
        }
        self.metrics.barriers += 1;
        self.epoch += 1;
        let end = self.flat.ops.len();
        for unit in units.iter_mut() {
            unit.pc += 1;
            unit.state = if unit.pc >= end { UnitState::Done } else { UnitState::Running };
        }
        Ok(())
    }

    // -- single instruction -------------------------------------------------

    fn step(&mut self, unit: &mut Unit) -> Result<(), ExecError> {
        debug_assert_eq!(unit.state, UnitState::Running);
        let op = self.flat.ops[unit.pc];
        match op {
            FlatOp::Let { slot, expr } | FlatOp::Assign { slot, expr } => {
                self.exec_reg_write(unit, slot, expr)?;
                unit.pc += 1;
            }
            FlatOp::StoreGlobal { buf, index, value } => {
                self.exec_store_global(unit, buf, index, value)?;
                unit.pc += 1;
            }
            FlatOp::StoreLocal { arr, index, value } => {
                self.exec_store_local(unit, arr, index, value)?;
                unit.pc += 1;
            }
            FlatOp::Barrier => {
                if !unit.mask.is_full() {
                    return Err(ExecError::BarrierDivergence {
                        group: self.group,
                        detail: format!(
                            "a barrier executed with only {} of {} lanes active",
                            unit.mask.count(),
                            unit.count
                        ),
                    });
                }
                self.metrics.wavefront_issues += unit.ranges.len() as u64;
                // The pc stays on the barrier; the rendezvous advances it.
                unit.state = UnitState::Blocked;
                return Ok(());
            }
            FlatOp::IfBegin { cond, else_pc, end_pc } => {
                let pred = self.eval_guard(unit, cond)?;
                let then_mask = unit.mask.and(&pred);
                let else_mask = unit.mask.and_not(&pred);
                unit.frames.push(Frame::If {
                    saved: unit.mask.clone(),
                    else_mask: else_mask.clone(),
                });
                if then_mask.any() {
                    unit.mask = then_mask;
                    unit.pc += 1;
                } else if else_mask.any() {
                    unit.mask = else_mask;
                    unit.pc = else_pc;
                } else {
                    unit.pc = end_pc;
                }
            }
            FlatOp::Else { end_pc } => {
                let else_mask = match unit.frames.last() {
                    Some(Frame::If { else_mask, .. }) => else_mask.clone(),
                    _ => unreachable!("Else without matching IfBegin frame"),
                };
                if else_mask.any() {
                    unit.mask = else_mask;
                    unit.pc += 1;
                } else {
                    unit.pc = end_pc;
                }
            }
            FlatOp::IfEnd => {
                match unit.frames.pop() {
                    Some(Frame::If { saved, .. }) => unit.mask = saved,
                    _ => unreachable!("IfEnd without matching IfBegin frame"),
                }
                unit.pc += 1;
            }
            FlatOp::LoopBegin { cond, exit_pc } => {
                let revisit = matches!(
                    unit.frames.last(),
                    Some(Frame::Loop { head_pc, .. }) if *head_pc == unit.pc
                );
                if !revisit {
                    if !unit.mask.any() {
                        unit.pc = exit_pc;
                        return Ok(());
                    }
                    unit.frames.push(Frame::Loop {
                        head_pc: unit.pc,
                        saved: unit.mask.clone(),
                    });
                }
                let pred = self.eval_guard(unit, cond)?;
                let live = unit.mask.and(&pred);
                if live.any() {
                    unit.mask = live;
                    unit.pc += 1;
                } else {
                    match unit.frames.pop() {
                        Some(Frame::Loop { saved, .. }) => unit.mask = saved,
                        _ => unreachable!("LoopBegin without its own frame"),
                    }
                    unit.pc = exit_pc;
                }
            }
            FlatOp::LoopEnd { head_pc } => {
                unit.pc = head_pc;
            }
        }
        if unit.pc >= self.flat.ops.len() {
            debug_assert!(unit.frames.is_empty());
            unit.state = UnitState::Done;
        }
        Ok(())
    }

    // -- statement execution (evaluate everything, then commit) -------------

    fn exec_reg_write(&mut self, unit: &Unit, slot: u16, expr: ExprId) -> Result<(), ExecError> {
        let mut stash = std::mem::take(&mut self.reg_stash);
        stash.clear();
        for r in 0..unit.ranges.len() {
            let range = unit.ranges[r];
            if !unit.mask.any_in(range.start, range.len) {
                continue;
            }
            self.metrics.wavefront_issues += 1;
            self.begin_range();
            for i in range.start..range.start + range.len {
                if unit.mask.get(i) {
                    let lane = unit.first + i;
                    let val = self.eval(expr, lane)?;
                    stash.push((lane as u32, val));
                }
            }
            self.flush_range();
        }
        for &(lane, val) in &stash {
            self.regs[lane as usize * self.num_slots + slot as usize] = val;
        }
        self.reg_stash = stash;
        Ok(())
    }

    fn exec_store_global(
        &mut self,
        unit: &Unit,
        buf: u16,
        index: ExprId,
        value: ExprId,
    ) -> Result<(), ExecError> {
        let mut stash = std::mem::take(&mut self.store_stash);
        stash.clear();
        let len = self.buffers[buf as usize].len();
        for r in 0..unit.ranges.len() {
            let range = unit.ranges[r];
            if !unit.mask.any_in(range.start, range.len) {
                continue;
            }
            self.metrics.wavefront_issues += 1;
            self.begin_range();
            for i in range.start..range.start + range.len {
                if unit.mask.get(i) {
                    let lane = unit.first + i;
                    let raw = self.eval(index, lane)?;
                    let idx = self.int_of(raw, lane)?;
                    if idx < 0 || idx as usize >= len {
                        return Err(ExecError::OutOfBounds {
                            buffer: self.flat.buffers[buf as usize].name.clone(),
                            index: idx,
                            lane: self.global_lane(lane),
                        });
                    }
                    let val = self.eval(value, lane)?;
                    self.g_writes.push((buf, idx as u64));
                    stash.push((idx as usize, val));
                }
            }
            self.flush_range();
        }
        for &(idx, val) in &stash {
            self.buffers[buf as usize].set(idx, val);
        }
        self.store_stash = stash;
        Ok(())
    }

    fn exec_store_local(
        &mut self,
        unit: &Unit,
        arr: u16,
        index: ExprId,
        value: ExprId,
    ) -> Result<(), ExecError> {
        let mut stash = std::mem::take(&mut self.store_stash);
        stash.clear();
        let (base, len) = {
            let a = &self.flat.local_arrays[arr as usize];
            (a.base, a.len)
        };
        for r in 0..unit.ranges.len() {
            let range = unit.ranges[r];
            if !unit.mask.any_in(range.start, range.len) {
                continue;
            }
            self.metrics.wavefront_issues += 1;
            self.begin_range();
            for i in range.start..range.start + range.len {
                if unit.mask.get(i) {
                    let lane = unit.first + i;
                    let raw = self.eval(index, lane)?;
                    let idx = self.int_of(raw, lane)?;
                    if idx < 0 || idx as usize >= len {
                        return Err(ExecError::LocalOutOfBounds {
                            array: self.flat.local_arrays[arr as usize].name.clone(),
                            index: idx,
                            lane: self.global_lane(lane),
                        });
                    }
                    let word = base + idx as usize;
                    let val = self.eval(value, lane)?;
                    self.l_events.push((STORE_NODE, lane as u32, word as u64));
                    if self.hazards_on {
                        self.log.push(LocalAccessRecord {
                            epoch: self.epoch,
                            wavefront: (lane / self.cfg.wavefront_width) as u32,
                            word: word as u32,
                            is_write: true,
                        });
                    }
                    stash.push((word, val));
                }
            }
            self.flush_range();
        }
        for &(word, val) in &stash {
            self.locals[word] = val;
        }
        self.store_stash = stash;
        Ok(())
    }

    /// Evaluate a guard over the unit's active lanes, counting one issue per
    /// active wavefront and one divergent branch per wavefront whose active
    /// lanes disagree. Returns the predicate as a unit-relative mask.
    fn eval_guard(&mut self, unit: &Unit, cond: ExprId) -> Result<Mask, ExecError> {
        let mut pred = Mask::empty(unit.count);
        for r in 0..unit.ranges.len() {
            let range = unit.ranges[r];
            if !unit.mask.any_in(range.start, range.len) {
                continue;
            }
            self.metrics.wavefront_issues += 1;
            self.begin_range();
            let mut saw_true = false;
            let mut saw_false = false;
            for i in range.start..range.start + range.len {
                if unit.mask.get(i) {
                    let lane = unit.first + i;
                    if self.eval(cond, lane)?.is_truthy() {
                        pred.set(i);
                        saw_true = true;
                    } else {
                        saw_false = true;
                    }
                }
            }
            if saw_true && saw_false {
                self.metrics.divergent_branches += 1;
            }
            self.flush_range();
        }
        Ok(pred)
    }

    // -- expression evaluation ----------------------------------------------

    fn eval(&mut self, id: ExprId, lane: usize) -> Result<Scalar, ExecError> {
        let flat = self.flat;
        match &flat.exprs[id as usize] {
            LExpr::Const(s) => Ok(*s),
            LExpr::Builtin(b) => {
                let v = match b {
                    Builtin::GlobalId => self.global_lane(lane),
                    Builtin::LocalId => lane,
                    Builtin::GroupId => self.group,
                    Builtin::GlobalSize => self.cfg.global_size,
                    Builtin::LocalSize => self.cfg.local_size,
                };
                Ok(Scalar::Int(v as i64))
            }
            LExpr::Slot(slot) => Ok(self.regs[lane * self.num_slots + *slot as usize]),
            LExpr::LoadGlobal { buf, idx } => {
                let raw = self.eval(*idx, lane)?;
                let i = self.int_of(raw, lane)?;
                let b = &self.buffers[*buf as usize];
                if i < 0 || i as usize >= b.len() {
                    return Err(ExecError::OutOfBounds {
                        buffer: flat.buffers[*buf as usize].name.clone(),
                        index: i,
                        lane: self.global_lane(lane),
                    });
                }
                self.g_reads.push((*buf, i as u64));
                Ok(self.buffers[*buf as usize].get(i as usize))
            }
            LExpr::LoadLocal { arr, idx } => {
                let raw = self.eval(*idx, lane)?;
                let i = self.int_of(raw, lane)?;
                let info = &flat.local_arrays[*arr as usize];
                if i < 0 || i as usize >= info.len {
                    return Err(ExecError::LocalOutOfBounds {
                        array: info.name.clone(),
                        index: i,
                        lane: self.global_lane(lane),
                    });
                }
                let word = info.base + i as usize;
                self.l_events.push((id, lane as u32, word as u64));
                if self.hazards_on {
                    self.log.push(LocalAccessRecord {
                        epoch: self.epoch,
                        wavefront: (lane / self.cfg.wavefront_width) as u32,
                        word: word as u32,
                        is_write: false,
                    });
                }
                Ok(self.locals[word])
            }
            LExpr::ShflDown { slot, delta } => {
                self.shfl_nodes.push(id);
                let w = self.cfg.wavefront_width;
                let base = lane - lane % w;
                let rel = lane % w + *delta as usize;
                // A source past the wavefront's last lane returns the
                // caller's own value. Masked-off source lanes yield their
                // last committed register value.
                let src = if rel < w && base + rel < self.cfg.local_size {
                    base + rel
                } else {
                    lane
                };
                Ok(self.regs[src * self.num_slots + *slot as usize])
            }
            LExpr::Unary(op, a) => {
                let x = self.eval(*a, lane)?;
                match op {
                    UnaryOp::Neg => scalar::neg(x).map_err(|e| self.op_err(e, lane)),
                    UnaryOp::Not => scalar::not(x).map_err(|e| self.op_err(e, lane)),
                    UnaryOp::Cast(t) => Ok(scalar::cast(*t, x)),
                }
            }
            LExpr::Binary(op, a, b) => {
                let x = self.eval(*a, lane)?;
                let y = self.eval(*b, lane)?;
                let f = match op {
                    BinOp::Add => scalar::add,
                    BinOp::Sub => scalar::sub,
                    BinOp::Mul => scalar::mul,
                    BinOp::Div => scalar::div,
                    BinOp::Min => scalar::min,
                    BinOp::Max => scalar::max,
                    BinOp::Lt => scalar::lt,
                    BinOp::Le => scalar::le,
                    BinOp::Gt => scalar::gt,
                    BinOp::Ge => scalar::ge,
                    BinOp::Eq => scalar::eq,
                    BinOp::Ne => scalar::ne,
                    BinOp::And => scalar::bit_and,
                    BinOp::Or => scalar::bit_or,
                    BinOp::Xor => scalar::bit_xor,
                    BinOp::Shl => scalar::shl,
                    BinOp::Shr => scalar::shr,
                    BinOp::Mod => scalar::rem,
                };
                f(x, y).map_err(|e| self.op_err(e, lane))
            }
        }
    }

    // -- metric bookkeeping ---------------------------------------------------

    fn begin_range(&mut self) {
        self.g_reads.clear();
        self.g_writes.clear();
        self.l_events.clear();
        self.shfl_nodes.clear();
    }

    /// Fold one wavefront range's collected accesses into the metrics:
    /// global reads and writes coalesce into segments per buffer, local
    /// events group by access node and split into `num_banks`-lane phases
    /// for conflict counting, shuffles count once per node.
    fn flush_range(&mut self) {
        let elem_bytes = self.cfg.elem_bytes;
        let segment_bytes = self.cfg.segment_bytes;
        let mut scratch = std::mem::take(&mut self.addr_scratch);

        let mut reads = std::mem::take(&mut self.g_reads);
        let mut writes = std::mem::take(&mut self.g_writes);
        for list in [&mut reads, &mut writes] {
            if list.is_empty() {
                continue;
            }
            list.sort_unstable();
            let mut start = 0;
            while start < list.len() {
                let buf = list[start].0;
                scratch.clear();
                let mut end = start;
                while end < list.len() && list[end].0 == buf {
                    scratch.push(list[end].1);
                    end += 1;
                }
                self.metrics.global_transactions +=
                    coalesce_transactions(&scratch, elem_bytes, segment_bytes);
                start = end;
            }
            list.clear();
        }
        self.g_reads = reads;
        self.g_writes = writes;

        let mut events = std::mem::take(&mut self.l_events);
        if !events.is_empty() {
            events.sort_unstable();
            let w = self.cfg.wavefront_width;
            let banks = self.cfg.num_banks;
            let mut start = 0;
            while start < events.len() {
                let node = events[start].0;
                let mut end = start;
                while end < events.len() && events[end].0 == node {
                    end += 1;
                }
                self.metrics.local_accesses += 1;
                let mut p = start;
                while p < end {
                    let phase = (events[p].1 as usize % w) / banks;
                    scratch.clear();
                    let mut q = p;
                    while q < end && (events[q].1 as usize % w) / banks == phase {
                        scratch.push(events[q].2);
                        q += 1;
                    }
                    let degree = bank_conflict_degree(&scratch, banks);
                    self.metrics.bank_conflict_extra += degree.saturating_sub(1);
                    p = q;
                }
                start = end;
            }
            events.clear();
        }
        self.l_events = events;

        let mut shfl = std::mem::take(&mut self.shfl_nodes);
        if !shfl.is_empty() {
            shfl.sort_unstable();
            shfl.dedup();
            self.metrics.shfl_ops += shfl.len() as u64;
            shfl.clear();
        }
        self.shfl_nodes = shfl;

        scratch.clear();
        self.addr_scratch = scratch;
    }

    // -- small helpers --------------------------------------------------------

    fn global_lane(&self, lane: usize) -> usize {
        self.group * self.cfg.local_size + lane
    }

    fn int_of(&self, s: Scalar, lane: usize) -> Result<i64, ExecError> {
        s.as_int().ok_or_else(|| {
            ExecError::TypeMismatch(format!(
                "address or condition must be int, got {} (lane {})",
                s.elem_type(),
                self.global_lane(lane)
            ))
        })
    }

    fn op_err(&self, e: OpError, lane: usize) -> ExecError {
        match e {
            OpError::DivideByZero => ExecError::DivisionByZero {
                lane: self.global_lane(lane),
            },
            OpError::Type { op, lhs, rhs } => ExecError::TypeMismatch(format!(
                "operator `{op}` applied to {lhs} and {rhs}"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
