//! Memory-system cost primitives: global-memory coalescing and local-memory
//! bank conflicts.
//!
//! Both functions are pure; the executor feeds them the per-wavefront address
//! sets it observes, and tests can probe access patterns directly.

/// Number of global-memory transactions needed for one wavefront access.
///
/// Each element index is scaled to a byte address (`index * elem_bytes`) and
/// assigned to its aligned segment of `segment_bytes`; the result is the
/// number of distinct segments touched. Duplicate and permuted addresses do
/// not change the answer. An empty access costs zero transactions.
pub fn coalesce_transactions(addresses: &[u64], elem_bytes: usize, segment_bytes: usize) -> u64 {
    debug_assert!(elem_bytes > 0 && segment_bytes > 0);
    let mut segments: Vec<u64> = addresses
        .iter()
        .map(|&a| a.saturating_mul(elem_bytes as u64) / segment_bytes as u64)
        .collect();
    segments.sort_unstable();
    segments.dedup();
    segments.len() as u64
}

/// Bank-conflict degree of one local-memory access: the maximum, over banks,
/// of the number of *distinct* word addresses mapping to that bank
/// (`bank = word % num_banks`). Lanes reading the same word broadcast and do
/// not conflict. An empty access has degree 1 (no serialisation).
pub fn bank_conflict_degree(addresses: &[u64], num_banks: usize) -> u64 {
    debug_assert!(num_banks > 0);
    let mut words: Vec<u64> = addresses.to_vec();
    words.sort_unstable();
    words.dedup();
    let mut per_bank = vec![0u64; num_banks];
    for w in words {
        per_bank[(w % num_banks as u64) as usize] += 1;
    }
    per_bank.into_iter().max().unwrap_or(0).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn consecutive_elements_fill_minimal_segments() {
        // 64 lanes, consecutive 4-byte elements, 128-byte segments: the 256
        // bytes span exactly two segments.
        let addrs: Vec<u64> = (0..64).collect();
        assert_eq!(coalesce_transactions(&addrs, 4, 128), 2);
    }

    #[test]
    fn strided_access_touches_one_segment_per_lane() {
        // Stride 32 elements of 4 bytes = 128 bytes = one segment per lane.
        let addrs: Vec<u64> = (0..64).map(|i| i * 32).collect();
        assert_eq!(coalesce_transactions(&addrs, 4, 128), 64);
    }

    #[test]
    fn single_lane_costs_one_transaction() {
        assert_eq!(coalesce_transactions(&[17], 4, 128), 1);
        assert_eq!(coalesce_transactions(&[], 4, 128), 0);
    }

    #[test]
    fn unit_stride_has_no_bank_conflicts() {
        let addrs: Vec<u64> = (0..32).collect();
        assert_eq!(bank_conflict_degree(&addrs, 32), 1);
    }

    #[test]
    fn stride_two_doubles_the_degree() {
        let addrs: Vec<u64> = (0..32).map(|i| i * 2).collect();
        assert_eq!(bank_conflict_degree(&addrs, 32), 2);
    }

    #[test]
    fn broadcast_is_conflict_free() {
        let addrs = [7u64; 32];
        assert_eq!(bank_conflict_degree(&addrs, 32), 1);
    }

    proptest! {
        // Coalescing counts a set of segments: permutations and duplicates
        // of the address list cannot change the result.
        #[test]
        fn coalescing_is_order_and_duplicate_insensitive(
            mut addrs in proptest::collection::vec(0u64..100_000, 1..128),
            dup_index in 0usize..128,
        ) {
            let base = coalesce_transactions(&addrs, 4, 128);
            addrs.push(addrs[dup_index % addrs.len()]);
            addrs.reverse();
            prop_assert_eq!(coalesce_transactions(&addrs, 4, 128), base);
        }

        // Degree is bounded by the number of distinct addresses and by the
        // worst case of all addresses in one bank.
        #[test]
        fn degree_is_within_bounds(
            addrs in proptest::collection::vec(0u64..4096, 1..128),
            banks in 1usize..64,
        ) {
            let mut distinct = addrs.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let d = bank_conflict_degree(&addrs, banks);
            prop_assert!(d >= 1);
            prop_assert!(d <= distinct.len() as u64);
        }
    }
}
