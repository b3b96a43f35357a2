//! The reduction-strategy catalog.

use std::fmt;

/// One parallel-reduction strategy. All strategies compute the same
/// fold; they differ in addressing, control flow, and how much sequential
/// work each lane does before the cooperative phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Interleaved tree addressing guarded by a modulo test
    /// (`lane % 2s == 0`), the classic maximally divergent baseline.
    HarrisK1,
    /// Interleaved tree with strided index math (`index = 2 * s * lane`):
    /// less divergence, but the strided local accesses collide in banks.
    HarrisK2,
    /// Sequential addressing: contiguous lanes combine `scratch[lane]` with
    /// `scratch[lane + offset]` for halving offsets. Conflict-free.
    HarrisK3,
    /// K3 plus a first combine during the global load (two elements per
    /// loop iteration).
    HarrisK4,
    /// K4 plus an unguarded single-wavefront tail: once `offset` fits in a
    /// wavefront the tree continues without barriers.
    HarrisK5,
    /// K5 with the whole tree unrolled at build time; no loop counters.
    HarrisK6,
    /// K6 with `factor` global loads per loop iteration, strided
    /// `global_size` apart, bounds handled by masked terms.
    HarrisK7 { factor: u32 },
    /// Wavefront-shuffle reduction: private accumulators combined with
    /// `shfl_down`, no local memory and no barriers in either stage.
    Shuffle,
    /// Two-stage grid-stride reduction: sequential accumulation into a
    /// private register, then a barriered sequential-addressing tree.
    Catanzaro,
    /// Multi-element variant of [`KernelKind::Catanzaro`]: each lane loads
    /// `factor` elements per iteration (wavefront-coalesced, strided
    /// `global_size` apart) and combines them in one statement.
    NewStage1 { factor: u32 },
    /// [`KernelKind::NewStage1`] with the cooperative tree rewritten
    /// branch-free: every lane executes every level, masked terms make
    /// inactive contributions inert, and the only barrier is the one after
    /// the scratch fill. Designed for `local_size == wavefront_width`;
    /// wider groups race on scratch (the detector reports it).
    NewStage1Branchless { factor: u32 },
}

impl KernelKind {
    /// Stable machine-readable name (factor not included).
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::HarrisK1 => "harris-k1",
            KernelKind::HarrisK2 => "harris-k2",
            KernelKind::HarrisK3 => "harris-k3",
            KernelKind::HarrisK4 => "harris-k4",
            KernelKind::HarrisK5 => "harris-k5",
            KernelKind::HarrisK6 => "harris-k6",
            KernelKind::HarrisK7 { .. } => "harris-k7",
            KernelKind::Shuffle => "shuffle",
            KernelKind::Catanzaro => "catanzaro",
            KernelKind::NewStage1 { .. } => "new-stage1",
            KernelKind::NewStage1Branchless { .. } => "new-branchless",
        }
    }

    /// Elements combined per loop iteration per lane (1 unless the strategy
    /// is an unrolled multi-load).
    pub fn factor(self) -> u32 {
        match self {
            KernelKind::HarrisK4 | KernelKind::HarrisK5 | KernelKind::HarrisK6 => 2,
            KernelKind::HarrisK7 { factor }
            | KernelKind::NewStage1 { factor }
            | KernelKind::NewStage1Branchless { factor } => factor,
            _ => 1,
        }
    }

    /// Whether stage 1 stages partial values through local memory.
    pub fn uses_local_memory(self) -> bool {
        !matches!(self, KernelKind::Shuffle)
    }

    /// Every strategy at a representative factor, for sweeps and tests.
    pub fn catalog(factor: u32) -> Vec<KernelKind> {
        vec![
            KernelKind::HarrisK1,
            KernelKind::HarrisK2,
            KernelKind::HarrisK3,
            KernelKind::HarrisK4,
            KernelKind::HarrisK5,
            KernelKind::HarrisK6,
            KernelKind::HarrisK7 { factor },
            KernelKind::Shuffle,
            KernelKind::Catanzaro,
            KernelKind::NewStage1 { factor },
            KernelKind::NewStage1Branchless { factor },
        ]
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.factor() {
            1 => write!(f, "{}", self.name()),
            n => write!(f, "{}(x{})", self.name(), n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let kinds = KernelKind::catalog(4);
        let mut names: Vec<&str> = kinds.iter().map(|k| k.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), kinds.len());
    }

    #[test]
    fn factors() {
        assert_eq!(KernelKind::HarrisK1.factor(), 1);
        assert_eq!(KernelKind::HarrisK4.factor(), 2);
        assert_eq!(KernelKind::HarrisK7 { factor: 8 }.factor(), 8);
        assert_eq!(KernelKind::NewStage1Branchless { factor: 16 }.factor(), 16);
        assert_eq!(format!("{}", KernelKind::NewStage1 { factor: 4 }), "new-stage1(x4)");
        assert_eq!(format!("{}", KernelKind::Catanzaro), "catanzaro");
    }
}
