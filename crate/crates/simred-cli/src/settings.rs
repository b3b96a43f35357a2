//! Option resolution: built-in defaults, then a config file, then flags.
//!
//! The config file is deliberately dumb — `key=value` lines, `#` comments,
//! blank lines — and its keys are exactly the long flag names (`local-size`,
//! `cost-alu`, ...). A value given on the command line always wins over the
//! file; the file wins over the defaults. Unknown keys are rejected rather
//! than ignored so a typo cannot silently benchmark the wrong machine.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use simred_core::{CombineKind, ElemType, LaunchConfig, Scalar, Scheduler};
use simred_kernels::KernelKind;

use crate::cost::CostModel;
use crate::data::{DataSpec, FileFormat};
use crate::report::ReportFormat;

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

/// Keys a config file may set. Everything else is a typo.
const KNOWN_KEYS: &[&str] = &[
    "kernel",
    "factors",
    "n",
    "op",
    "dtype",
    "unroll",
    "local-size",
    "groups",
    "wavefront",
    "scheduler",
    "seed",
    "dist",
    "lo",
    "hi",
    "value",
    "emit",
    "cost-alu",
    "cost-global",
    "cost-local",
    "cost-barrier",
    "cost-shfl",
];

/// Parse a `key=value` config file into a map, validating key names.
pub fn load_config_file(path: &Path) -> Result<HashMap<String, String>, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(format!(
                "config line {}: expected key=value, got {line:?}",
                idx + 1
            ));
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(format!("config line {}: unknown key {key:?}", idx + 1));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Defaults < config file < command line, for one option.
pub fn resolve<T: std::str::FromStr>(
    flag: Option<T>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
) -> Result<T, String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(text) => text
            .parse::<T>()
            .map_err(|_| format!("config key {key}: cannot parse {text:?}")),
        None => Ok(default),
    }
}

/// Like `resolve` for string-vocabulary options, run through `parse`.
pub fn resolve_with<T>(
    flag: Option<&str>,
    file: &HashMap<String, String>,
    key: &str,
    default: T,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<T, String> {
    match flag.or_else(|| file.get(key).map(String::as_str)) {
        Some(text) => parse(text),
        None => Ok(default),
    }
}

// ---------------------------------------------------------------------------
// Vocabulary parsers
// ---------------------------------------------------------------------------

pub fn parse_op(text: &str) -> Result<CombineKind, String> {
    CombineKind::ALL
        .into_iter()
        .find(|k| k.name() == text)
        .ok_or_else(|| format!("unknown op {text:?}; expected add|mul|min|max|and|or|xor"))
}

pub fn parse_dtype(text: &str) -> Result<ElemType, String> {
    match text {
        "i64" => Ok(ElemType::Int),
        "f32" => Ok(ElemType::F32),
        "f64" => Ok(ElemType::F64),
        _ => Err(format!("unknown dtype {text:?}; expected i64|f32|f64")),
    }
}

pub fn parse_scheduler(text: &str) -> Result<Scheduler, String> {
    match text {
        "lockstep" => Ok(Scheduler::LockstepWorkgroup),
        "rr" => Ok(Scheduler::WavefrontRoundRobin),
        "serial" => Ok(Scheduler::WavefrontSerial),
        _ => Err(format!(
            "unknown scheduler {text:?}; expected lockstep|rr|serial"
        )),
    }
}

pub fn parse_emit(text: &str) -> Result<ReportFormat, String> {
    match text {
        "csv" => Ok(ReportFormat::Csv),
        "json" => Ok(ReportFormat::Json),
        _ => Err(format!("unknown report format {text:?}; expected csv|json")),
    }
}

pub fn parse_file_format(text: &str) -> Result<FileFormat, String> {
    match text {
        "text" => Ok(FileFormat::Text),
        "raw" => Ok(FileFormat::Raw),
        _ => Err(format!("unknown input format {text:?}; expected text|raw")),
    }
}

/// A single kernel name, with `unroll` applied to the multi-element kinds.
pub fn parse_kernel(text: &str, unroll: u32) -> Result<KernelKind, String> {
    let kind = match text {
        "harris-k1" => KernelKind::HarrisK1,
        "harris-k2" => KernelKind::HarrisK2,
        "harris-k3" => KernelKind::HarrisK3,
        "harris-k4" => KernelKind::HarrisK4,
        "harris-k5" => KernelKind::HarrisK5,
        "harris-k6" => KernelKind::HarrisK6,
        "harris-k7" => KernelKind::HarrisK7 { factor: unroll },
        "shuffle" => KernelKind::Shuffle,
        "catanzaro" => KernelKind::Catanzaro,
        "new-stage1" => KernelKind::NewStage1 { factor: unroll },
        "new-branchless" => KernelKind::NewStage1Branchless { factor: unroll },
        _ => {
            return Err(format!(
                "unknown kernel {text:?}; expected harris-k1..harris-k7, shuffle, \
                 catanzaro, new-stage1, new-branchless, or all"
            ))
        }
    };
    Ok(kind)
}

/// A comma-separated kernel list; `all` expands to the full catalog.
pub fn parse_kernel_list(text: &str, unroll: u32) -> Result<Vec<KernelKind>, String> {
    if text == "all" {
        return Ok(KernelKind::catalog(unroll));
    }
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|name| parse_kernel(name, unroll))
        .collect()
}

/// A comma-separated unroll-factor list, e.g. `1,2,4,8,16`.
pub fn parse_factors(text: &str) -> Result<Vec<u32>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<u32>()
                .map_err(|_| format!("bad unroll factor {s:?}"))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Data distribution
// ---------------------------------------------------------------------------

/// Resolve the generator spec for `elem` from `dist`/`lo`/`hi`/`value`
/// options. Bounds are parsed in the element's own domain, so integer
/// ranges keep full 64-bit precision.
pub fn resolve_data_spec(
    elem: ElemType,
    dist: Option<&str>,
    lo: Option<&str>,
    hi: Option<&str>,
    value: Option<&str>,
    file: &HashMap<String, String>,
) -> Result<DataSpec, String> {
    let dist = dist
        .map(str::to_string)
        .or_else(|| file.get("dist").cloned())
        .unwrap_or_else(|| "uniform".to_string());
    let lo = lo.map(str::to_string).or_else(|| file.get("lo").cloned());
    let hi = hi.map(str::to_string).or_else(|| file.get("hi").cloned());
    let value = value
        .map(str::to_string)
        .or_else(|| file.get("value").cloned());

    match dist.as_str() {
        "uniform" => match elem {
            ElemType::Int => {
                let lo = parse_in_domain::<i64>(lo.as_deref(), "lo", -100)?;
                let hi = parse_in_domain::<i64>(hi.as_deref(), "hi", 100)?;
                Ok(DataSpec::UniformInt { lo, hi })
            }
            ElemType::F32 | ElemType::F64 => {
                let lo = parse_in_domain::<f64>(lo.as_deref(), "lo", 0.0)?;
                let hi = parse_in_domain::<f64>(hi.as_deref(), "hi", 1.0)?;
                Ok(DataSpec::UniformFloat { lo, hi })
            }
        },
        "constant" => {
            let value = match elem {
                ElemType::Int => Scalar::Int(parse_in_domain::<i64>(value.as_deref(), "value", 1)?),
                ElemType::F32 => {
                    Scalar::F32(parse_in_domain::<f64>(value.as_deref(), "value", 1.0)? as f32)
                }
                ElemType::F64 => {
                    Scalar::F64(parse_in_domain::<f64>(value.as_deref(), "value", 1.0)?)
                }
            };
            Ok(DataSpec::Constant { value })
        }
        other => Err(format!(
            "unknown distribution {other:?}; expected uniform|constant"
        )),
    }
}

fn parse_in_domain<T: std::str::FromStr>(
    text: Option<&str>,
    what: &str,
    default: T,
) -> Result<T, String> {
    match text {
        Some(s) => s
            .parse::<T>()
            .map_err(|_| format!("cannot parse --{what} {s:?}")),
        None => Ok(default),
    }
}

// ---------------------------------------------------------------------------
// Geometry and cost
// ---------------------------------------------------------------------------

/// Build the launch geometry from resolved numbers, checking the machine
/// invariants up front so errors surface as usage errors, not mid-run.
pub fn make_launch_config(
    local_size: usize,
    groups: usize,
    wavefront: usize,
    scheduler: Scheduler,
) -> Result<LaunchConfig, String> {
    let cfg = LaunchConfig {
        global_size: groups
            .checked_mul(local_size)
            .ok_or("global size overflows")?,
        local_size,
        wavefront_width: wavefront,
        scheduler,
        ..LaunchConfig::default()
    };
    cfg.check()?;
    Ok(cfg)
}

/// Resolve the five cost-model prices.
pub fn resolve_cost(
    alu: Option<u64>,
    global: Option<u64>,
    local: Option<u64>,
    barrier: Option<u64>,
    shfl: Option<u64>,
    file: &HashMap<String, String>,
) -> Result<CostModel, String> {
    let d = CostModel::default();
    Ok(CostModel {
        alu: resolve(alu, file, "cost-alu", d.alu)?,
        global: resolve(global, file, "cost-global", d.global)?,
        local: resolve(local, file, "cost-local", d.local)?,
        barrier: resolve(barrier, file, "cost-barrier", d.barrier)?,
        shfl: resolve(shfl, file, "cost-shfl", d.shfl)?,
    })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    #[test]
    fn config_file_round_trip_with_comments() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# geometry\nlocal-size = 128\n\ngroups=4\ncost-alu=7").unwrap();
        let map = load_config_file(f.path()).unwrap();
        assert_eq!(map["local-size"], "128");
        assert_eq!(map["groups"], "4");
        assert_eq!(map["cost-alu"], "7");
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "local-szie=128").unwrap();
        let err = load_config_file(f.path()).unwrap_err();
        assert!(err.contains("unknown key"), "{err}");
    }

    #[test]
    fn flags_beat_file_beats_default() {
        let mut file = HashMap::new();
        file.insert("n".to_string(), "512".to_string());
        // flag present: wins
        assert_eq!(resolve(Some(7usize), &file, "n", 99).unwrap(), 7);
        // no flag: file wins
        assert_eq!(resolve::<usize>(None, &file, "n", 99).unwrap(), 512);
        // neither: default
        assert_eq!(resolve::<usize>(None, &file, "seed", 99).unwrap(), 99);
    }

    #[test]
    fn vocabulary_parsers_accept_the_documented_words_only() {
        assert_eq!(parse_op("xor").unwrap(), CombineKind::BitXor);
        assert!(parse_op("plus").is_err());
        assert_eq!(parse_dtype("f32").unwrap(), ElemType::F32);
        assert!(parse_dtype("int").is_err());
        assert_eq!(
            parse_scheduler("rr").unwrap(),
            Scheduler::WavefrontRoundRobin
        );
        assert!(parse_scheduler("gpu").is_err());
        assert_eq!(parse_emit("json").unwrap(), ReportFormat::Json);
        assert!(parse_emit("xml").is_err());
        assert_eq!(parse_file_format("raw").unwrap(), FileFormat::Raw);
        assert!(parse_file_format("bin").is_err());
    }

    #[test]
    fn kernel_lists_expand_and_carry_the_unroll_factor() {
        let kinds = parse_kernel_list("catanzaro, new-stage1", 8).unwrap();
        assert_eq!(
            kinds,
            vec![
                KernelKind::Catanzaro,
                KernelKind::NewStage1 { factor: 8 },
            ]
        );
        let all = parse_kernel_list("all", 2).unwrap();
        assert_eq!(all, KernelKind::catalog(2));
        assert!(parse_kernel_list("harris-k9", 1).is_err());
    }

    #[test]
    fn factor_lists_parse_in_order() {
        assert_eq!(parse_factors("1,2, 8,16").unwrap(), vec![1, 2, 8, 16]);
        assert!(parse_factors("1,two").is_err());
    }

    #[test]
    fn data_specs_default_per_type_and_parse_in_domain() {
        let file = HashMap::new();
        assert_eq!(
            resolve_data_spec(ElemType::Int, None, None, None, None, &file).unwrap(),
            DataSpec::UniformInt { lo: -100, hi: 100 }
        );
        assert_eq!(
            resolve_data_spec(ElemType::F64, None, None, None, None, &file).unwrap(),
            DataSpec::UniformFloat { lo: 0.0, hi: 1.0 }
        );
        // 64-bit integer bounds survive (an f64 path would round this).
        let big = i64::MAX.to_string();
        assert_eq!(
            resolve_data_spec(ElemType::Int, None, Some("0"), Some(&big), None, &file).unwrap(),
            DataSpec::UniformInt { lo: 0, hi: i64::MAX }
        );
        assert_eq!(
            resolve_data_spec(
                ElemType::F32,
                Some("constant"),
                None,
                None,
                Some("2.5"),
                &file
            )
            .unwrap(),
            DataSpec::Constant {
                value: Scalar::F32(2.5)
            }
        );
        assert!(
            resolve_data_spec(ElemType::Int, Some("gaussian"), None, None, None, &file).is_err()
        );
    }

    #[test]
    fn geometry_invariants_surface_as_usage_errors() {
        assert!(make_launch_config(256, 8, 64, Scheduler::LockstepWorkgroup).is_ok());
        // local size not a multiple of the wavefront width
        assert!(make_launch_config(96, 8, 64, Scheduler::LockstepWorkgroup).is_err());
    }
}
