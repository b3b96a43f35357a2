//! Deterministic dataset generation and file loading.
//!
//! Benchmarks must be reproducible from a seed alone, so generation uses a
//! counter-based stream cipher (ChaCha8) keyed with the user's seed and a
//! fixed, documented mapping from raw randomness to elements:
//!
//! * `uniform` int:   `gen_range(lo..=hi)` -- both bounds inclusive.
//! * `uniform` float: a standard draw in `[0,1)` scaled to `lo + u*(hi-lo)`,
//!   so `lo` is inclusive and `hi` exclusive.
//! * `constant`:      every element equals the given value.
//!
//! The same (seed, n, spec) always produces the same buffer, independent of
//! platform and of what was generated before.
//!
//! Files come in two shapes: `text` is one decimal number per line, and
//! `raw` is a little-endian dump with an 8-byte element-count header
//! followed by fixed-width elements (8-byte ints and doubles, 4-byte
//! singles).  A truncated raw file is an I/O error, not a short buffer.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simred_core::{Buffer, ElemType, Scalar};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    /// Generator bounds are unusable (inverted, or not finite).
    #[error("bad range: {0}")]
    BadRange(String),
    /// A text file line failed to parse as the requested element type.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// What the elements of a generated dataset look like.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataSpec {
    /// Integers drawn uniformly from `lo..=hi` (inclusive on both ends).
    UniformInt { lo: i64, hi: i64 },
    /// Floats drawn uniformly from `[lo, hi)`.
    UniformFloat { lo: f64, hi: f64 },
    /// Every element is `value`.
    Constant { value: Scalar },
}

/// Produce `n` elements of type `elem` from `spec`, keyed by `seed`.
pub fn generate_data(
    n: usize,
    elem: ElemType,
    spec: DataSpec,
    seed: u64,
) -> Result<Buffer, DataError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match (elem, spec) {
        (ElemType::Int, DataSpec::UniformInt { lo, hi }) => {
            if lo > hi {
                return Err(DataError::BadRange(format!(
                    "integer range {lo}..={hi} is empty"
                )));
            }
            Ok(Buffer::Int(
                (0..n).map(|_| rng.gen_range(lo..=hi)).collect(),
            ))
        }
        (ElemType::F32, DataSpec::UniformFloat { lo, hi }) => {
            check_float_range(lo, hi)?;
            let (lo, hi) = (lo as f32, hi as f32);
            Ok(Buffer::F32(
                (0..n).map(|_| lo + rng.gen::<f32>() * (hi - lo)).collect(),
            ))
        }
        (ElemType::F64, DataSpec::UniformFloat { lo, hi }) => {
            check_float_range(lo, hi)?;
            Ok(Buffer::F64(
                (0..n).map(|_| lo + rng.gen::<f64>() * (hi - lo)).collect(),
            ))
        }
        (_, DataSpec::Constant { value }) => {
            if value.elem_type() != elem {
                return Err(DataError::BadRange(format!(
                    "constant {value:?} does not have element type {elem}"
                )));
            }
            Ok(Buffer::filled(value, n))
        }
        (ElemType::Int, DataSpec::UniformFloat { .. }) => Err(DataError::BadRange(
            "uniform float distribution over an integer buffer".into(),
        )),
        (_, DataSpec::UniformInt { .. }) => Err(DataError::BadRange(
            "uniform integer distribution over a float buffer".into(),
        )),
    }
}

fn check_float_range(lo: f64, hi: f64) -> Result<(), DataError> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(DataError::BadRange(format!(
            "float bounds must be finite, got [{lo}, {hi})"
        )));
    }
    if !(lo < hi) {
        return Err(DataError::BadRange(format!(
            "float range [{lo}, {hi}) is empty"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

/// On-disk dataset encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    /// One decimal number per line; blank lines are skipped.
    Text,
    /// 8-byte little-endian element count, then fixed-width little-endian
    /// elements.
    Raw,
}

/// Read a dataset of `elem`-typed values from `path`.
pub fn load_data(path: &Path, format: FileFormat, elem: ElemType) -> Result<Buffer, DataError> {
    match format {
        FileFormat::Text => load_text(path, elem),
        FileFormat::Raw => load_raw(path, elem),
    }
}

fn load_text(path: &Path, elem: ElemType) -> Result<Buffer, DataError> {
    let reader = BufReader::new(File::open(path)?);
    let mut ints = Vec::new();
    let mut f32s = Vec::new();
    let mut f64s = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let parse = |msg: String| DataError::Parse { line: lineno, msg };
        match elem {
            ElemType::Int => ints.push(text.parse::<i64>().map_err(|e| parse(e.to_string()))?),
            ElemType::F32 => f32s.push(text.parse::<f32>().map_err(|e| parse(e.to_string()))?),
            ElemType::F64 => f64s.push(text.parse::<f64>().map_err(|e| parse(e.to_string()))?),
        }
    }
    Ok(match elem {
        ElemType::Int => Buffer::Int(ints),
        ElemType::F32 => Buffer::F32(f32s),
        ElemType::F64 => Buffer::F64(f64s),
    })
}

fn load_raw(path: &Path, elem: ElemType) -> Result<Buffer, DataError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut header = [0u8; 8];
    reader.read_exact(&mut header)?;
    let count = u64::from_le_bytes(header) as usize;
    match elem {
        ElemType::Int => {
            let mut out = Vec::with_capacity(count);
            let mut word = [0u8; 8];
            for _ in 0..count {
                reader.read_exact(&mut word)?;
                out.push(i64::from_le_bytes(word));
            }
            Ok(Buffer::Int(out))
        }
        ElemType::F32 => {
            let mut out = Vec::with_capacity(count);
            let mut word = [0u8; 4];
            for _ in 0..count {
                reader.read_exact(&mut word)?;
                out.push(f32::from_le_bytes(word));
            }
            Ok(Buffer::F32(out))
        }
        ElemType::F64 => {
            let mut out = Vec::with_capacity(count);
            let mut word = [0u8; 8];
            for _ in 0..count {
                reader.read_exact(&mut word)?;
                out.push(f64::from_le_bytes(word));
            }
            Ok(Buffer::F64(out))
        }
    }
}

// ---------------------------------------------------------------------------
