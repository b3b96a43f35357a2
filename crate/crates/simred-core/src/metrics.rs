//! Execution metrics: what the machine counts while it runs.
//!
//! Counting rules (identical under every scheduler):
//!
//! * `wavefront_issues` — one per instruction executed by a wavefront with at
//!   least one active lane. `Let`/`Assign`, stores, `Barrier`, and each
//!   `If`/`While` guard evaluation count; reconvergence bookkeeping does not.
//! * `divergent_branches` — one per guard evaluation where the active lanes
//!   of a single wavefront disagree on the predicate.
//! * `barriers` — barrier executions per work-group, summed over work-groups
//!   (a rendezvous of all wavefronts counts once, not once per wavefront).
//! * `global_transactions` — distinct aligned segments touched per wavefront
//!   per instruction, reads and writes coalesced separately.
//! * `local_accesses` — local-memory access operations issued per wavefront
//!   (each load or store node in an instruction counts one).
//! * `bank_conflict_extra` — extra serialised cycles from bank conflicts:
//!   `degree - 1` per local access, summed over the access's lane phases.
//! * `shfl_ops` — cross-lane shuffle operations issued per wavefront.

use std::fmt;

/// An inter-wavefront local-memory conflict found by the hazard analysis:
/// within one inter-barrier epoch of a work-group, `writer` wrote the word
/// and a different wavefront `other` read or wrote it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HazardRecord {
    /// Word address in the work-group's local memory.
    pub word: u32,
    /// Wavefront (index within the work-group) that wrote the word.
    pub writer: u32,
    /// Different wavefront that read or wrote the same word in the same epoch.
    pub other: u32,
}

impl fmt::Display for HazardRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "local word {} written by wavefront {} and touched by wavefront {} in the same barrier epoch",
            self.word, self.writer, self.other
        )
    }
}

/// Counters accumulated over one launch (or merged over several).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metrics {
    pub wavefront_issues: u64,
    pub divergent_branches: u64,
    pub barriers: u64,
    pub global_transactions: u64,
    pub local_accesses: u64,
    pub bank_conflict_extra: u64,
    pub shfl_ops: u64,
    /// Sorted, deduplicated hazard records; empty unless the launch ran with
    /// `hazard_detection` enabled and found conflicts.
    pub hazards: Vec<HazardRecord>,
}

impl Metrics {
    /// Merge another launch's metrics into this one (counter sums; hazard
    /// records are united, deduplicated, and kept sorted).
    pub fn merge(&mut self, other: &Metrics) {
        self.wavefront_issues += other.wavefront_issues;
        self.divergent_branches += other.divergent_branches;
        self.barriers += other.barriers;
        self.global_transactions += other.global_transactions;
        self.local_accesses += other.local_accesses;
        self.bank_conflict_extra += other.bank_conflict_extra;
        self.shfl_ops += other.shfl_ops;
        self.hazards.extend(other.hazards.iter().copied());
        self.hazards.sort_unstable();
        self.hazards.dedup();
    }
}
