//! Benchmark execution: run reduction strategies over one dataset, verify
//! every result against the oracles, and price the metrics with the cost
//! model.
//!
//! A result is only worth timing if it is right, so each row records a
//! `result_ok` verdict computed *before* any cycle estimate:
//!
//! * integers: bit-exact match with the sequential fold (no excuses);
//! * float add: within the a priori rounding bound of a compensated
//!   (Neumaier) reference sum — reassociation moves the result, the bound
//!   says by at most how much;
//! * float min/max: numerically exact — order never changes *which value*
//!   wins, though it may swap `-0.0` for `+0.0`, so either zero is accepted;
//! * float mul: within a first-order relative bound of the sequential fold.
//!
//! Rows execute serially in spec order over the same in-memory dataset, so
//! a report is a pure function of (data, geometry, cost model).

use serde::Serialize;
use simred_core::{Buffer, CombineKind, ElemType, LaunchConfig, Scalar};
use simred_kernels::{reduce, KernelKind, ReduceRun};
use simred_oracles::{compensated_sum, float_error_bound, reduce_sequential, unit_roundoff};

use crate::cost::{estimate_cycles, CostModel};

// ---------------------------------------------------------------------------
// Targets
// ---------------------------------------------------------------------------

/// Anything the harness can run and meter. The library kernels are the real
/// targets; tests substitute deliberately wrong ones to prove the verifier
/// has teeth.
pub trait BenchTarget {
    /// Row label, e.g. `catanzaro` or `new-stage1`.
    fn label(&self) -> String;
    /// Elements folded per lane per pass (the `F` column).
    fn factor(&self) -> u32;
    fn run(
        &self,
        data: &Buffer,
        op: CombineKind,
        cfg: &LaunchConfig,
    ) -> Result<ReduceRun, String>;
}

impl<T: BenchTarget + ?Sized> BenchTarget for &T {
    fn label(&self) -> String {
        (**self).label()
    }

    fn factor(&self) -> u32 {
        (**self).factor()
    }

    fn run(
        &self,
        data: &Buffer,
        op: CombineKind,
        cfg: &LaunchConfig,
    ) -> Result<ReduceRun, String> {
        (**self).run(data, op, cfg)
    }
}

impl BenchTarget for KernelKind {
    fn label(&self) -> String {
        self.name().to_string()
    }

    fn factor(&self) -> u32 {
        KernelKind::factor(*self)
    }

    fn run(
        &self,
        data: &Buffer,
        op: CombineKind,
        cfg: &LaunchConfig,
    ) -> Result<ReduceRun, String> {
        reduce(*self, op, data, cfg).map_err(|e| e.to_string())
    }
}

// ---------------------------------------------------------------------------
// Rows and reports
// ---------------------------------------------------------------------------

/// One benchmark measurement. Field order matches the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub kernel: String,
    #[serde(rename = "F")]
    pub factor: u32,
    pub n: usize,
    pub op: String,
    pub result_ok: bool,
    pub divergent_branches: u64,
    pub barriers: u64,
    pub global_transactions: u64,
    pub local_accesses: u64,
    pub bank_conflict_extra: u64,
    pub shfl_ops: u64,
    pub wavefront_issues: u64,
    pub sim_cycles: u64,
    /// Baseline cycles divided by this row's cycles; the baseline row is
    /// exactly 1.0 by construction.
    pub speedup: f64,
}

/// Everything a benchmark invocation produced: the rows that ran, plus a
/// note for every target that failed to run at all. Failures never erase
/// the rows that did complete.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<BenchRow>,
    pub errors: Vec<String>,
}

impl Report {
    /// True when every row verified and nothing failed to run.
    pub fn all_ok(&self) -> bool {
        self.errors.is_empty() && self.rows.iter().all(|r| r.result_ok)
    }
}

fn speedup_vs(baseline_cycles: Option<u64>, cycles: u64) -> f64 {
    match baseline_cycles {
        // 0/0 happens only for empty launches; call equal costs equal.
        Some(b) if b == cycles => 1.0,
        Some(b) => b as f64 / cycles as f64,
        None => f64::NAN,
    }
}

fn make_row(
    label: String,
    factor: u32,
    data: &Buffer,
    op: CombineKind,
    run: &ReduceRun,
    cost: &CostModel,
    baseline_cycles: Option<u64>,
) -> BenchRow {
    // Verify first; a cycle count for a wrong answer is noise.
    let result_ok = verify_result(op, data, run.result);
    let m = &run.metrics;
    let sim_cycles = estimate_cycles(m, cost);
    BenchRow {
        kernel: label,
        factor,
        n: data.len(),
        op: op.name().to_string(),
        result_ok,
        divergent_branches: m.divergent_branches,
        barriers: m.barriers,
        global_transactions: m.global_transactions,
        local_accesses: m.local_accesses,
        bank_conflict_extra: m.bank_conflict_extra,
        shfl_ops: m.shfl_ops,
        wavefront_issues: m.wavefront_issues,
        sim_cycles,
        speedup: speedup_vs(baseline_cycles.or(Some(sim_cycles)), sim_cycles),
    }
}

// ---------------------------------------------------------------------------
// Result verification
// ---------------------------------------------------------------------------

/// Accept or reject a reduction result against the oracles. The policy per
/// op class is documented in the module header.
pub fn verify_result(op: CombineKind, data: &Buffer, result: Scalar) -> bool {
    let Some(expected) = reduce_sequential(op, data) else {
        return false; // op/type combination the oracle refuses (bitwise float)
    };
    let elem = data.elem_type();
    if elem == ElemType::Int {
        return result.bits_eq(expected);
    }
    match op {
        CombineKind::Add => verify_float_add(data, result),
        // min/max never invent values, but the IEEE min of two zeros may
        // carry either sign depending on operand order; accept both.
        CombineKind::Min | CombineKind::Max => {
            result.bits_eq(expected) || result.to_f64_lossy() == expected.to_f64_lossy()
        }
        CombineKind::Mul => verify_float_mul(data, result, expected),
        _ => false,
    }
}

fn verify_float_add(data: &Buffer, result: Scalar) -> bool {
    let n = data.len();
    if n <= 1 {
        // Nothing was actually added; the result must be exact.
        return result.bits_eq(reduce_sequential(CombineKind::Add, data).unwrap());
    }
    let reference = compensated_sum(data).unwrap().to_f64_lossy();
    let got = result.to_f64_lossy();
    if !reference.is_finite() || !got.is_finite() {
        // Overflowed or NaN data: demand agreement, tolerances are moot.
        return got == reference || (got.is_nan() && reference.is_nan());
    }
    let max_abs = buffer_max_abs(data);
    // The kernel's error vs. the true sum is within the bound for any
    // association; the compensated reference adds one more rounding's
    // worth, hence the factor of two.
    let tol = 2.0 * float_error_bound(n, max_abs, data.elem_type());
    (got - reference).abs() <= tol
}

fn verify_float_mul(data: &Buffer, result: Scalar, expected: Scalar) -> bool {
    let got = result.to_f64_lossy();
    let want = expected.to_f64_lossy();
    if !got.is_finite() || !want.is_finite() {
        return got == want || (got.is_nan() && want.is_nan());
    }
    // First-order relative bound: each of the <= n real multiplies in either
    // association contributes one rounding.
    let tol = 4.0 * data.len() as f64 * unit_roundoff(data.elem_type());
    (got - want).abs() <= tol * got.abs().max(want.abs())
}

fn buffer_max_abs(data: &Buffer) -> f64 {
    (0..data.len())
        .map(|i| data.get(i).to_f64_lossy().abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Benchmark drivers
// ---------------------------------------------------------------------------

/// Run each target over the same dataset. The first target that completes
/// is the speedup baseline. Targets that fail to run are recorded in
/// `errors`; the report is still produced.
pub fn run_benchmark<T: BenchTarget>(
    targets: &[T],
    data: &Buffer,
    op: CombineKind,
    cfg: &LaunchConfig,
    cost: &CostModel,
) -> Report {
    let mut report = Report::default();
    let mut baseline_cycles = None;
    for target in targets {
        match target.run(data, op, cfg) {
            Ok(run) => {
                let row = make_row(
                    target.label(),
                    target.factor(),
                    data,
                    op,
                    &run,
                    cost,
                    baseline_cycles,
                );
                baseline_cycles.get_or_insert(row.sim_cycles);
                report.rows.push(row);
            }
            Err(e) => report.errors.push(format!("{}: {e}", target.label())),
        }
    }
    report
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SweepError {
    #[error("factor list must not be empty")]
    Empty,
    #[error("factor list must contain 1, the baseline unroll")]
    NoBaseline,
}

/// Unroll-factor sweep: one `catanzaro` baseline row, then the branchless
/// multi-element kernel at every requested factor, all over the same data.
/// Speedups are relative to the baseline row, which is exactly 1.0.
pub fn sweep_unroll(
    factors: &[u32],
    data: &Buffer,
    op: CombineKind,
    cfg: &LaunchConfig,
    cost: &CostModel,
) -> Result<Report, SweepError> {
    if factors.is_empty() {
        return Err(SweepError::Empty);
    }
    if !factors.contains(&1) {
        return Err(SweepError::NoBaseline);
    }
    let mut targets = vec![KernelKind::Catanzaro];
    targets.extend(
        factors
            .iter()
            .map(|&f| KernelKind::NewStage1Branchless { factor: f }),
    );
    Ok(run_benchmark(&targets, data, op, cfg, cost))
}

// ---------------------------------------------------------------------------
