//! Linear cost model over the simulator's hardware counters.
//!
//! The simulator reports *what happened* (issues, transactions, barriers,
//! ...); this module charges each event a fixed cycle price and sums the
//! result.  The prices are knobs, not measurements: they are chosen so the
//! relative cost of instruction issue vs. memory traffic vs. synchronization
//! is plausible for a throughput-oriented SIMT part, and every one of them
//! can be overridden from the command line or a config file.  Absolute cycle
//! counts mean nothing; only ratios between runs of the same workload do.

use simred_core::Metrics;

// ---------------------------------------------------------------------------
// Cost model
// ---------------------------------------------------------------------------

/// Cycle price of each counted event class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostModel {
    /// Per wavefront instruction issue.
    pub alu: u64,
    /// Per global-memory transaction (one coalesced segment).
    pub global: u64,
    /// Per local-memory access, and per extra serialized bank-conflict pass.
    pub local: u64,
    /// Per work-group barrier rendezvous.
    pub barrier: u64,
    /// Per wavefront shuffle operation.
    pub shfl: u64,
}

impl Default for CostModel {
    /// Issue-heavy defaults: instruction issue is the expensive resource and
    /// coalesced global traffic is cheap (amortized over a deep pipeline).
    /// This is what makes unrolling pay off -- it removes issues, not bytes.
    fn default() -> Self {
        CostModel {
            alu: 4,
            global: 1,
            local: 4,
            barrier: 20,
            shfl: 1,
        }
    }
}

/// Total estimated cycles for one launch under the given price list.
pub fn estimate_cycles(m: &Metrics, cost: &CostModel) -> u64 {
    m.wavefront_issues * cost.alu
        + m.global_transactions * cost.global
        + m.local_accesses * cost.local
        + m.bank_conflict_extra * cost.local
        + m.barriers * cost.barrier
        + m.shfl_ops * cost.shfl
}

// ---------------------------------------------------------------------------
