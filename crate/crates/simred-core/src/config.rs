//! Launch geometry and machine parameters.

use std::fmt;

/// Wavefront scheduling policy within a work-group.
///
/// All three policies produce identical buffer contents whenever the hazard
/// detector reports no inter-wavefront hazards; they differ in how wavefronts
/// interleave between barriers, which is exactly what the hazard analysis
/// makes observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheduler {
    /// The whole work-group advances one instruction at a time: every lane's
    /// reads of an instruction happen before any lane's writes commit. This
    /// is the idealised SIMD reading of a work-group.
    #[default]
    LockstepWorkgroup,
    /// Wavefronts take turns, one instruction each, round-robin.
    WavefrontRoundRobin,
    /// Each wavefront runs until it blocks at a barrier or finishes.
    WavefrontSerial,
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::LockstepWorkgroup => write!(f, "lockstep"),
            Scheduler::WavefrontRoundRobin => write!(f, "rr"),
            Scheduler::WavefrontSerial => write!(f, "serial"),
        }
    }
}

/// Geometry and memory-system parameters for one launch.
#[derive(Debug, Clone, PartialEq)]
pub struct LaunchConfig {
    /// Total number of work-items; must be a positive multiple of `local_size`.
    pub global_size: usize,
    /// Work-items per work-group; a power of two.
    pub local_size: usize,
    /// Lanes per wavefront; a power of two, at most `local_size`.
    pub wavefront_width: usize,
    /// Local-memory banks for conflict modelling.
    pub num_banks: usize,
    /// Global-memory transaction (segment) size in bytes.
    pub segment_bytes: usize,
    /// Bytes per buffer element for transaction modelling.
    pub elem_bytes: usize,
    /// Local-memory capacity per work-group, in words.
    pub local_mem_words: usize,
    pub scheduler: Scheduler,
    /// Record local-memory accesses and report inter-wavefront hazards.
    pub hazard_detection: bool,
}

impl Default for LaunchConfig {
    /// Eight work-groups of 256 work-items, 64-lane wavefronts, 32 banks,
    /// 128-byte segments of 4-byte elements, 4096 words of local memory.
    fn default() -> LaunchConfig {
        LaunchConfig {
            global_size: 2048,
            local_size: 256,
            wavefront_width: 64,
            num_banks: 32,
            segment_bytes: 128,
            elem_bytes: 4,
            local_mem_words: 4096,
            scheduler: Scheduler::LockstepWorkgroup,
            hazard_detection: false,
        }
    }
}

impl LaunchConfig {
    /// Number of work-groups in the launch.
    pub fn num_groups(&self) -> usize {
        self.global_size / self.local_size
    }

    /// Wavefronts per work-group.
    pub fn wavefronts_per_group(&self) -> usize {
        self.local_size / self.wavefront_width
    }

    /// Check the geometry invariants. Returns a description of the first
    /// violated invariant.
    pub fn check(&self) -> Result<(), String> {
        if self.local_size == 0 || !self.local_size.is_power_of_two() {
            return Err(format!(
                "local_size must be a power of two >= 1, got {}",
                self.local_size
            ));
        }
        if self.global_size == 0 || self.global_size % self.local_size != 0 {
            return Err(format!(
                "global_size must be a positive multiple of local_size, got {} / {}",
                self.global_size, self.local_size
            ));
        }
        if !self.wavefront_width.is_power_of_two() || self.wavefront_width > self.local_size {
            return Err(format!(
                "wavefront_width must be a power of two <= local_size, got {} / {}",
                self.wavefront_width, self.local_size
            ));
        }
        if self.num_banks == 0 {
            return Err("num_banks must be positive".to_string());
        }
        if self.segment_bytes == 0 || self.elem_bytes == 0 {
            return Err("segment_bytes and elem_bytes must be positive".to_string());
        }
        Ok(())
    }
}
