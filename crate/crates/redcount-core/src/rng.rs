//! Deterministic, splittable randomness.
//!
//! Every randomized operation in this crate takes an explicit RNG; there is
//! no hidden global state. All CLI entry points derive their generators from
//! a single 64-bit root seed through [`split`], so a run is bit-identical
//! across platforms and repetitions (`ChaCha12` has a stable, portable
//! stream).

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha12Rng;

/// SplitMix64 step; used only to whiten (seed, stream) pairs.
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root generator for a seed.
pub fn from_seed(seed: u64) -> Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Counter-based stream split: child generator `stream` of `seed`.
///
/// Children with distinct `stream` values are independent for all practical
/// purposes, and the derivation is pure, so callers can re-create any child
/// without replaying the others.
pub fn split(seed: u64, stream: u64) -> Rng {
    let mixed = splitmix64(seed ^ splitmix64(stream.wrapping_add(0xa076_1d64_78bd_642f)));
    ChaCha12Rng::seed_from_u64(mixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn split_is_deterministic() {
        let a: u64 = split(7, 3).gen();
        let b: u64 = split(7, 3).gen();
        assert_eq!(a, b);
    }

    #[test]
    fn split_streams_differ() {
        let a: u64 = split(7, 3).gen();
        let b: u64 = split(7, 4).gen();
        let c: u64 = from_seed(7).gen();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
