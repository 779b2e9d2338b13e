//! Deterministic random bits for the simulations.
//!
//! The stream is fully specified so that a `(seed, N, p)` triple yields the
//! same trials on every platform:
//!
//! * generator: xoshiro256** (Blackman & Vigna) from `rand_xoshiro`, state
//!   seeded with four consecutive SplitMix64 outputs of the 64-bit seed
//!   (`SeedableRng::seed_from_u64`);
//! * trial: take `u = next_u64() >> 11`, a uniform 53-bit integer, and emit 1
//!   iff `u < ceil(p · 2^53)`, i.e. iff `u / 2^53 < p`. `p · 2^53` is exact in
//!   binary floating point, so the threshold is exact too.
//!
//! Per-trial seeds come from [`mix_seed`], which depends only on the
//! experiment seed and the (grid, trial) indices, never on scheduling.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::params::BernoulliParams;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function (Stafford variant 13 finalizer), applied
/// statelessly.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial` of grid point `grid` in an experiment seeded with `seed`:
///
/// ```text
/// mix64(mix64(mix64(seed) ^ (grid + 1)·γ) ^ (trial + 1)·γ)
/// ```
///
/// with `γ = 0x9E3779B97F4A7C15` and wrapping arithmetic.
pub fn mix_seed(seed: u64, grid: u64, trial: u64) -> u64 {
    let s = mix64(seed);
    let s = mix64(s ^ grid.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA));
    mix64(s ^ trial.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
}

/// Integer threshold `ceil(p · 2^53)` used to turn 53-bit uniforms into trials.
pub fn bernoulli_threshold(p: f64) -> u64 {
    (p * (1u64 << 53) as f64).ceil() as u64
}

/// An endless stream of IID Bernoulli(p) trials.
#[derive(Debug, Clone)]
pub struct BernoulliStream {
    rng: Xoshiro256StarStar,
    threshold: u64,
}

impl BernoulliStream {
    pub fn new(params: BernoulliParams, seed: u64) -> Self {
        Self {
            rng: Xoshiro256StarStar::seed_from_u64(seed),
            threshold: bernoulli_threshold(params.p()),
        }
    }

    #[inline]
    pub fn next_bit(&mut self) -> bool {
        (self.rng.next_u64() >> 11) < self.threshold
    }
}

impl Iterator for BernoulliStream {
    type Item = bool;

    #[inline]
    fn next(&mut self) -> Option<bool> {
        Some(self.next_bit())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xoshiro_reference_vector() {
        // reference outputs for state {1, 2, 3, 4}
        let mut seed = [0u8; 32];
        for (i, chunk) in seed.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&(i as u64 + 1).to_le_bytes());
        }
        let mut rng = Xoshiro256StarStar::from_seed(seed);
        let expected = [
            11520u64,
            0,
            1509978240,
            1215971899390074240,
            1216172134540287360,
            607988272756665600,
            16172922978634559625,
            8476171486693032832,
            10595114339597558777,
            2904607092377533576,
        ];
        for e in expected {
            assert_eq!(rng.next_u64(), e);
        }
    }

    #[test]
    fn mix64_is_the_splitmix64_output() {
        for seed in [0u64, 1, 42, u64::MAX, 0xDEAD_BEEF] {
            let mut sm = rand_xoshiro::SplitMix64::seed_from_u64(seed);
            let mut state = seed;
            for _ in 0..100 {
                state = state.wrapping_add(GOLDEN_GAMMA);
                assert_eq!(sm.next_u64(), mix64(state));
            }
        }
    }

    #[test]
    fn stream_reference_bits() {
        let fair = BernoulliParams::new(0.5).unwrap();
        let bits: String = BernoulliStream::new(fair, 0)
            .take(32)
            .map(|b| if b { '1' } else { '0' })
            .collect();
        let mut rng = Xoshiro256StarStar::seed_from_u64(0);
        let expected: String = (0..32)
            .map(|_| if rng.next_u64() >> 63 == 0 { '1' } else { '0' })
            .collect();
        assert_eq!(bits, expected);
    }

    #[test]
    fn threshold_is_exact() {
        assert_eq!(bernoulli_threshold(0.5), 1 << 52);
        assert_eq!(bernoulli_threshold(0.25), 1 << 51);
        let t = bernoulli_threshold(0.1);
        // t = ceil(0.1 * 2^53) and (t - 1) / 2^53 < 0.1 <= t / 2^53
        assert!(((t - 1) as f64) < 0.1 * (1u64 << 53) as f64);
        assert!((t as f64) >= 0.1 * (1u64 << 53) as f64);
    }

    #[test]
    fn seed_mixing_separates_indices() {
        let a = mix_seed(7, 0, 0);
        assert_ne!(a, mix_seed(7, 0, 1));
        assert_ne!(a, mix_seed(7, 1, 0));
        assert_ne!(mix_seed(7, 0, 1), mix_seed(7, 1, 0));
        assert_ne!(a, mix_seed(8, 0, 0));
        assert_eq!(a, mix_seed(7, 0, 0));
    }
}
