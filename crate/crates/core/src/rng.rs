//! Deterministic random streams.
//!
//! Every trial owns an independent [`TrialRng`] seeded from a 64-bit value.
//! Trial seeds are derived from a master seed and the trial's coordinates by
//! chaining the SplitMix64 finalizer, so a plan reproduces bit-for-bit on any
//! platform regardless of how trials are scheduled.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator used for a single trajectory.
pub type TrialRng = Xoshiro256PlusPlus;

pub fn trial_rng(seed: u64) -> TrialRng {
    TrialRng::seed_from_u64(seed)
}

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the trial at `indices` (e.g. `[sweep, algorithm, trial]`):
/// `h_0 = mix(master)`, `h_{k+1} = mix(h_k ^ mix(index_k))`.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(mix64(master), |h, &i| mix64(h ^ mix64(i)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn mix64_reference_values() {
        // first outputs of the reference SplitMix64 stream seeded with 0
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix64(0x9E37_79B9_7F4A_7C15), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn derived_seeds_are_distinct_and_order_sensitive() {
        let mut seen = HashSet::new();
        for s in 0..8u64 {
            for a in 0..8u64 {
                for t in 0..64u64 {
                    assert!(seen.insert(derive_seed(42, &[s, a, t])));
                }
            }
        }
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[3, 4, 5]), derive_seed(9, &[3, 4, 5]));
    }
}
