//! The `simred` command-line surface: `run`, `sweep`, and `hazards`.
//!
//! Exit codes are part of the contract:
//!
//! * `0` — everything ran and every result verified;
//! * `1` — a kernel produced a wrong answer (the report says which);
//! * `2` — the invocation itself was unusable (bad flag, bad vocabulary,
//!   impossible geometry, bad generator range);
//! * `3` — a runtime failure (I/O, unreadable input data, launch error).

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use simred_core::{Buffer, CombineKind, CombineOp, ElemType, LaunchConfig};
use simred_kernels::ReducePlan;

use crate::bench::{run_benchmark, sweep_unroll, Report};
use crate::cost::CostModel;
use crate::data::{generate_data, load_data, DataError, FileFormat};
use crate::report::{render, ReportFormat};
use crate::settings::{
    load_config_file, make_launch_config, parse_dtype, parse_emit, parse_factors,
    parse_file_format, parse_kernel, parse_kernel_list, parse_op, parse_scheduler, resolve,
    resolve_cost, resolve_data_spec, resolve_with,
};

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "simred",
    version,
    about = "Deterministic SIMT reduction-kernel benchmark harness"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run kernels over one dataset and report verified metrics
    Run(RunArgs),
    /// Sweep the unroll factor of the branchless kernel against the
    /// catanzaro baseline
    Sweep(SweepArgs),
    /// Audit a kernel's group-stage local-memory traffic for races
    Hazards(HazardsArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Comma-separated kernel names, or `all`
    #[arg(long)]
    kernel: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated unroll factors; must include the baseline factor 1
    #[arg(long)]
    factors: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct HazardsArgs {
    /// A single kernel name
    #[arg(long)]
    kernel: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Number of generated input elements (ignored with --input)
    #[arg(long)]
    n: Option<usize>,

    /// Combine operator: add|mul|min|max|and|or|xor
    #[arg(long)]
    op: Option<String>,

    /// Element type: i64|f32|f64
    #[arg(long)]
    dtype: Option<String>,

    /// Elements folded per lane by the multi-element kernels
    #[arg(long)]
    unroll: Option<u32>,

    /// Lanes per work-group
    #[arg(long)]
    local_size: Option<usize>,

    /// Number of work-groups
    #[arg(long)]
    groups: Option<usize>,

    /// Lanes per wavefront
    #[arg(long)]
    wavefront: Option<usize>,

    /// Wavefront interleaving: lockstep|rr|serial
    #[arg(long)]
    scheduler: Option<String>,

    /// Dataset generator seed
    #[arg(long)]
    seed: Option<u64>,

    /// Generator distribution: uniform|constant
    #[arg(long)]
    dist: Option<String>,

    /// Lower generator bound (inclusive)
    #[arg(long)]
    lo: Option<String>,

    /// Upper generator bound (ints inclusive, floats exclusive)
    #[arg(long)]
    hi: Option<String>,

    /// Element value for the constant distribution
    #[arg(long)]
    value: Option<String>,

    /// Read the dataset from this file instead of generating it
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input file encoding: text|raw
    #[arg(long)]
    format: Option<String>,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Report encoding: csv|json
    #[arg(long)]
    emit: Option<String>,

    /// key=value file supplying defaults for these options
    #[arg(long)]
    config: Option<PathBuf>,

    /// Cycles per wavefront instruction issue
    #[arg(long)]
    cost_alu: Option<u64>,

    /// Cycles per global-memory transaction
    #[arg(long)]
    cost_global: Option<u64>,

    /// Cycles per local-memory access (and per conflict replay)
    #[arg(long)]
    cost_local: Option<u64>,

    /// Cycles per work-group barrier
    #[arg(long)]
    cost_barrier: Option<u64>,

    /// Cycles per wavefront shuffle
    #[arg(long)]
    cost_shfl: Option<u64>,
}

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub enum CliError {
    /// The invocation cannot be acted on (exit 2).
    Usage(String),
    /// The invocation was fine but execution failed (exit 3).
    Runtime(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

// ---------------------------------------------------------------------------
// Option resolution
// ---------------------------------------------------------------------------

/// Everything a subcommand needs, after defaults/file/flags are merged.
struct Resolved {
    op: CombineKind,
    elem: ElemType,
    unroll: u32,
    cfg: LaunchConfig,
    data: Buffer,
    cost: CostModel,
    emit: ReportFormat,
    out: Option<PathBuf>,
}

fn resolve_common(a: &CommonArgs) -> Result<Resolved, CliError> {
    let file: HashMap<String, String> = match &a.config {
        Some(path) => load_config_file(path).map_err(CliError::Usage)?,
        None => HashMap::new(),
    };
    let u = CliError::Usage;

    let op = resolve_with(a.op.as_deref(), &file, "op", CombineKind::Add, parse_op).map_err(u)?;
    let elem =
        resolve_with(a.dtype.as_deref(), &file, "dtype", ElemType::Int, parse_dtype).map_err(u)?;
    if CombineOp::new(op, elem).is_none() {
        return usage(format!(
            "op {:?} is not defined for dtype {elem}",
            op.name()
        ));
    }
    let unroll = resolve(a.unroll, &file, "unroll", 1).map_err(u)?;
    if unroll == 0 {
        return usage("--unroll must be at least 1");
    }

    let local_size = resolve(a.local_size, &file, "local-size", 256).map_err(u)?;
    let groups = resolve(a.groups, &file, "groups", 8).map_err(u)?;
    let wavefront = resolve(a.wavefront, &file, "wavefront", 64).map_err(u)?;
    let scheduler = resolve_with(
        a.scheduler.as_deref(),
        &file,
        "scheduler",
        simred_core::Scheduler::LockstepWorkgroup,
        parse_scheduler,
    )
    .map_err(u)?;
    let cfg = make_launch_config(local_size, groups, wavefront, scheduler).map_err(u)?;

    let cost = resolve_cost(
        a.cost_alu,
        a.cost_global,
        a.cost_local,
        a.cost_barrier,
        a.cost_shfl,
        &file,
    )
    .map_err(u)?;
    let emit =
        resolve_with(a.emit.as_deref(), &file, "emit", ReportFormat::Csv, parse_emit).map_err(u)?;

    let data = match &a.input {
        Some(path) => {
            let format = match a.format.as_deref() {
                Some(text) => parse_file_format(text).map_err(u)?,
                None => FileFormat::Text,
            };
            load_data(path, format, elem).map_err(|e| match e {
                DataError::BadRange(m) => CliError::Usage(m),
                other => CliError::Runtime(other.to_string()),
            })?
        }
        None => {
            let n = resolve(a.n, &file, "n", 1 << 20).map_err(u)?;
            let seed = resolve(a.seed, &file, "seed", 42).map_err(u)?;
            let spec = resolve_data_spec(
                elem,
                a.dist.as_deref(),
                a.lo.as_deref(),
                a.hi.as_deref(),
                a.value.as_deref(),
                &file,
            )
            .map_err(u)?;
            generate_data(n, elem, spec, seed).map_err(|e| match e {
                DataError::BadRange(m) => CliError::Usage(m),
                other => CliError::Runtime(other.to_string()),
            })?
        }
    };

    Ok(Resolved {
        op,
        elem,
        unroll,
        cfg,
        data,
        cost,
        emit,
        out: a.out.clone(),
    })
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

/// Emit the report and derive the process exit code from its contents.
fn finish(report: &Report, emit: ReportFormat, out: Option<&PathBuf>) -> Result<i32, CliError> {
    let text = render(report, emit);
    match out {
        Some(path) => fs::write(path, &text).map_err(|e| {
            CliError::Runtime(format!("cannot write report {}: {e}", path.display()))
        })?,
        None => print!("{text}"),
    }
    for err in &report.errors {
        eprintln!("error: {err}");
    }
    for row in report.rows.iter().filter(|r| !r.result_ok) {
        eprintln!(
            "verification failed: {} F={} n={} op={}",
            row.kernel, row.factor, row.n, row.op
        );
    }
    if !report.errors.is_empty() {
        Ok(3)
    } else if report.rows.iter().any(|r| !r.result_ok) {
        Ok(1)
    } else {
        Ok(0)
    }
}

fn run_cmd(args: &RunArgs) -> Result<i32, CliError> {
    let r = resolve_common(&args.common)?;
    let kernels = parse_kernel_list(args.kernel.as_deref().unwrap_or("all"), r.unroll)
        .map_err(CliError::Usage)?;
    if kernels.is_empty() {
        return usage("--kernel names no kernels");
    }
    let report = run_benchmark(&kernels, &r.data, r.op, &r.cfg, &r.cost);
    finish(&report, r.emit, r.out.as_ref())
}

fn sweep_cmd(args: &SweepArgs) -> Result<i32, CliError> {
    let r = resolve_common(&args.common)?;
    let factors = parse_factors(args.factors.as_deref().unwrap_or("1,2,3,4,5,6,7,8,16"))
        .map_err(CliError::Usage)?;
    let report = sweep_unroll(&factors, &r.data, r.op, &r.cfg, &r.cost)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    finish(&report, r.emit, r.out.as_ref())
}

fn hazards_cmd(args: &HazardsArgs) -> Result<i32, CliError> {
    let mut r = resolve_common(&args.common)?;
    r.cfg.hazard_detection = true;
    let kernel = parse_kernel(args.kernel.as_deref().unwrap_or("new-branchless"), r.unroll)
        .map_err(CliError::Usage)?;

    let plan =
        ReducePlan::new(kernel, r.op, r.elem, &r.cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    println!(
        "kernel {kernel} op {} dtype {} local-size {} groups {} wavefront {}",
        r.op.name(),
        r.elem,
        r.cfg.local_size,
        r.cfg.num_groups(),
        r.cfg.wavefront_width,
    );
    if r.data.is_empty() {
        println!("empty input: the group stage never runs; no hazards detected");
        return Ok(0);
    }
    let output = plan
        .run_stage1(&r.data)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let hazards = &output.metrics.hazards;
    const SHOWN: usize = 20;
    for h in hazards.iter().take(SHOWN) {
        println!(
            "hazard: local word {} written by wavefront {} while wavefront {} touches it \
             in the same barrier interval",
            h.word, h.writer, h.other
        );
    }
    if hazards.len() > SHOWN {
        println!("... and {} more", hazards.len() - SHOWN);
    }
    if hazards.is_empty() {
        println!("no hazards detected");
    } else {
        println!(
            "{} hazardous word/wavefront pairs detected: this kernel needs a stricter \
             schedule (lockstep) or barriers between tree levels",
            hazards.len()
        );
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------


/// Parse `argv` and run; returns the process exit code.
pub fn main_with_code() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Hazards(args) => hazards_cmd(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            3
        }
    }
}
