//! Portable seeded randomness for experiment jobs.
//!
//! Generator contract:
//! - key: `ChaCha8Rng::seed_from_u64(seed)` (the 64-bit seed is expanded to a
//!   256-bit key with PCG32, as specified by `rand_core`);
//! - stream: `set_stream(stream_id)`, one stream per job, so every job owns
//!   an independent, position-addressable keystream regardless of scheduling;
//! - uniform `f64` in `[0, 1)`: `(next_u64() >> 11) · 2⁻⁵³`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Stream id for a job addressed by up to four small indices.
pub fn stream_id(parts: [u16; 4]) -> u64 {
    parts
        .iter()
        .fold(0u64, |acc, &p| (acc << 16) | u64::from(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_test_vectors() {
        let mut r = StreamRng::new(0, 0);
        let got: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(got, FROZEN_SEED0_STREAM0);
        let mut r = StreamRng::new(42, 7);
        let got: Vec<u64> = (0..3).map(|_| r.next_u64()).collect();
        assert_eq!(got, FROZEN_SEED42_STREAM7);
    }

    // Reproduced by an independent ChaCha8 + PCG32-expansion reference.
    const FROZEN_SEED0_STREAM0: [u64; 3] =
        [13080132717333068652, 8594738769458413623, 12896916468484187878];
    const FROZEN_SEED42_STREAM7: [u64; 3] =
        [2370525664269707216, 6019739031913071421, 11352947354031309824];

    #[test]
    fn streams_are_independent_and_reproducible() {
        let a: Vec<f64> = {
            let mut r = StreamRng::new(9, 1);
            (0..8).map(|_| r.uniform()).collect()
        };
        let b: Vec<f64> = {
            let mut r = StreamRng::new(9, 1);
            (0..8).map(|_| r.uniform()).collect()
        };
        let c: Vec<f64> = {
            let mut r = StreamRng::new(9, 2);
            (0..8).map(|_| r.uniform()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|u| (0.0..1.0).contains(u)));
    }

    #[test]
    fn stream_ids_pack_indices() {
        assert_eq!(stream_id([0, 0, 0, 1]), 1);
        assert_eq!(stream_id([1, 0, 0, 0]), 1 << 48);
        assert_ne!(stream_id([0, 1, 0, 0]), stream_id([0, 0, 1, 0]));
    }
}
