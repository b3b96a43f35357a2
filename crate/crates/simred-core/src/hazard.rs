//! Local-memory hazard detection.
//!
//! When hazard detection is enabled, the machine records every local-memory
//! access as `(barrier epoch, wavefront, word, read/write)`. Two accesses to
//! the same word conflict when they fall in the same epoch — no barrier
//! orders them — they come from different wavefronts, and at least one is a
//! write. Same-wavefront accesses never conflict here: the machine commits
//! each wavefront's statement as read-everything-then-write-everything, so
//! intra-wavefront ordering is already defined.
//!
//! Detection works purely on the log, so the reported set is identical under
//! every scheduler: it flags programs whose correctness *depends* on a
//! schedule, rather than whether a particular schedule happened to lose the
//! race.

use std::collections::{BTreeMap, BTreeSet};

use crate::metrics::HazardRecord;

/// One recorded local-memory access.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalAccessRecord {
    /// Barrier epoch within the work-group; group-wide rendezvous increment it.
    pub epoch: u32,
    /// Wavefront index within the work-group.
    pub wavefront: u32,
    /// Local-memory word address.
    pub word: u32,
    pub is_write: bool,
}

/// Per-group local-memory access logs for one launch.
#[derive(Debug, Clone, Default)]
pub struct AccessLog {
    pub per_group: Vec<Vec<LocalAccessRecord>>,
}

/// Find every unordered writer/other-wavefront pair, deduplicated and sorted.
pub fn detect_hazards(log: &AccessLog) -> Vec<HazardRecord> {
    let mut found = BTreeSet::new();
    for group in &log.per_group {
        // (epoch, word) → (writing wavefronts, reading wavefronts)
        let mut cells: BTreeMap<(u32, u32), (BTreeSet<u32>, BTreeSet<u32>)> = BTreeMap::new();
        for acc in group {
            let cell = cells.entry((acc.epoch, acc.word)).or_default();
            if acc.is_write {
                cell.0.insert(acc.wavefront);
            } else {
                cell.1.insert(acc.wavefront);
            }
        }
        for ((_, word), (writers, readers)) in &cells {
            for &w in writers {
                for &other in writers.iter().chain(readers.iter()) {
                    if other != w {
                        found.insert(HazardRecord { word: *word, writer: w, other });
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}
