//! Two-stage reduction plans: geometry checks, program construction, and
//! the stage-1 → stage-2 launch sequence.

use std::collections::HashMap;

use simred_core::ir::Program;
use simred_core::{
    launch, Buffer, CombineKind, CombineOp, ElemType, ExecError, LaunchConfig, LaunchOutput,
    Metrics, Scalar,
};
use thiserror::Error;

use crate::kinds::KernelKind;
use crate::stage1::build_stage1;
use crate::stage2::{build_stage2_local, build_stage2_shuffle};

/// Why a plan could not be built.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("operation `{op}` is not defined for element type {elem}")]
    UnsupportedOp { op: CombineKind, elem: ElemType },
    #[error("launch geometry unusable: {0}")]
    Geometry(String),
    #[error("invalid launch configuration: {0}")]
    Config(String),
}

/// Why a planned reduction failed to run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("data element type {found} does not match plan element type {expected}")]
    DataType { expected: ElemType, found: ElemType },
}

/// Result of a full two-stage reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct ReduceRun {
    /// The combined value (the operation's identity when `n == 0`).
    pub result: Scalar,
    /// Metrics merged across both stages (zeroed when `n == 0`: nothing
    /// launches).
    pub metrics: Metrics,
}

/// A compiled two-stage reduction: both programs plus the launch
/// configurations and the partial-buffer geometry connecting them.
#[derive(Debug, Clone)]
pub struct ReducePlan {
    kind: KernelKind,
    op: CombineOp,
    /// Stage-1 program (`input`, `partials`, scalar `n`).
    pub stage1: Program,
    /// Stage-2 program (`partials`, `out`, scalar `m`).
    pub stage2: Program,
    pub stage1_cfg: LaunchConfig,
    pub stage2_cfg: LaunchConfig,
    /// Number of partials stage 1 produces (= stage 2's `m`).
    pub partials_len: usize,
}

impl ReducePlan {
    /// Build a plan. `base` supplies the stage-1 geometry and machine
    /// parameters; stage 2 reuses the machine parameters with a single
    /// work-group sized to fit the partials.
    pub fn new(
        kind: KernelKind,
        op_kind: CombineKind,
        elem: ElemType,
        base: &LaunchConfig,
    ) -> Result<ReducePlan, PlanError> {
        base.check().map_err(PlanError::Config)?;
        let op = CombineOp::new(op_kind, elem)
            .ok_or(PlanError::UnsupportedOp { op: op_kind, elem })?;
        if kind.factor() == 0 {
            return Err(PlanError::Geometry("unroll factor must be at least 1".into()));
        }

        let (ls, w, gs) = (base.local_size, base.wavefront_width, base.global_size);
        let (partials_len, stage2, stage2_cfg) = if kind.uses_local_memory() {
            let groups = base.num_groups();
            if groups > ls {
                return Err(PlanError::Geometry(format!(
                    "{groups} work-groups produce more partials than the \
                     {ls}-lane second stage can fold; lower global_size or \
                     raise local_size"
                )));
            }
            let cfg = LaunchConfig { global_size: ls, local_size: ls, ..base.clone() };
            (groups, build_stage2_local(op, ls), cfg)
        } else {
            let wavefronts = gs / w;
            if wavefronts > w {
                return Err(PlanError::Geometry(format!(
                    "{wavefronts} wavefronts produce more partials than one \
                     {w}-lane wavefront can fold; lower global_size"
                )));
            }
            let cfg = LaunchConfig { global_size: w, local_size: w, ..base.clone() };
            (wavefronts, build_stage2_shuffle(op, w), cfg)
        };

        Ok(ReducePlan {
            kind,
            op,
            stage1: build_stage1(kind, op, ls, w),
            stage2,
            stage1_cfg: base.clone(),
            stage2_cfg,
            partials_len,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn op(&self) -> CombineOp {
        self.op
    }

    /// Launch only stage 1 on `data`, returning the raw machine output
    /// (partials buffer plus stage-1 metrics). `data` must be non-empty.
    pub fn run_stage1(&self, data: &Buffer) -> Result<LaunchOutput, ReduceError> {
        self.check_data(data)?;
        let mut buffers = HashMap::new();
        buffers.insert("input".to_string(), data.clone());
        buffers.insert(
            "partials".to_string(),
            Buffer::filled(self.op.identity(), self.partials_len),
        );
        let mut scalars = HashMap::new();
        scalars.insert("n".to_string(), Scalar::Int(data.len() as i64));
        Ok(launch(&self.stage1, &self.stage1_cfg, buffers, &scalars)?)
    }

    /// Run the full two-stage reduction. An empty buffer reduces to the
    /// operation's identity without launching anything.
    pub fn run(&self, data: &Buffer) -> Result<ReduceRun, ReduceError> {
        self.check_data(data)?;
        if data.is_empty() {
            return Ok(ReduceRun { result: self.op.identity(), metrics: Metrics::default() });
        }

        let mut stage1_out = self.run_stage1(data)?;
        let mut metrics = stage1_out.metrics.clone();
        let partials = stage1_out
            .buffers
            .remove("partials")
            .expect("stage 1 binds a partials buffer");

        let mut buffers = HashMap::new();
        buffers.insert("partials".to_string(), partials);
        buffers.insert("out".to_string(), Buffer::filled(self.op.identity(), 1));
        let mut scalars = HashMap::new();
        scalars.insert("m".to_string(), Scalar::Int(self.partials_len as i64));
        let stage2_out = launch(&self.stage2, &self.stage2_cfg, buffers, &scalars)?;
        metrics.merge(&stage2_out.metrics);

        let result = stage2_out.buffers["out"].get(0);
        Ok(ReduceRun { result, metrics })
    }

    fn check_data(&self, data: &Buffer) -> Result<(), ReduceError> {
        if data.elem_type() != self.op.elem_type() {
            return Err(ReduceError::DataType {
                expected: self.op.elem_type(),
                found: data.elem_type(),
            });
        }
        Ok(())
    }
}

/// Plan and run a reduction in one call.
pub fn reduce(
    kind: KernelKind,
    op: CombineKind,
    data: &Buffer,
    cfg: &LaunchConfig,
) -> Result<ReduceRun, ReduceError> {
    let plan = ReducePlan::new(kind, op, data.elem_type(), cfg)?;
    plan.run(data)
}
