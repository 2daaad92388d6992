//! Deterministic seed derivation.
//!
//! Every random stream in a run is derived from one root seed, a stream tag,
//! and an index, so that adding or reordering work in one stream never
//! perturbs another.

/// SplitMix64 step: advances the state and returns the next value.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream tags used across the toolkit.
pub mod stream {
    pub const ENGINE: u64 = 1;
    pub const CASE_GEN: u64 = 2;
    pub const EVALUATION: u64 = 3;
    pub const PROVIDER: u64 = 4;
    pub const BENCH: u64 = 5;
}

/// Mixes `(root, stream, index)` into an independent seed.
pub fn derive_seed(root: u64, stream: u64, index: u64) -> u64 {
    let mut state = root
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(&mut state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(derive_seed(42, 1, 0), derive_seed(42, 1, 0));
    }

    #[test]
    fn streams_and_indices_separate() {
        let a = derive_seed(42, stream::ENGINE, 0);
        let b = derive_seed(42, stream::CASE_GEN, 0);
        let c = derive_seed(42, stream::ENGINE, 1);
        let d = derive_seed(43, stream::ENGINE, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 0, per the published reference sequence.
        let mut state = 0u64;
        assert_eq!(splitmix64(&mut state), 0xE220_A839_7B1D_CDAF);
        assert_eq!(splitmix64(&mut state), 0x6E78_9E6A_A1B9_65F4);
    }
}
