//! Reproducible RNG stream family for Monte Carlo work.
//!
//! Every replicate gets its own ChaCha12 stream derived from the experiment
//! seed and a packed `(context, purpose, replicate)` key, so replicates are
//! order-insensitive and can fan out over a worker pool without sharing
//! state. ChaCha streams with a common key and distinct stream numbers are
//! independent by construction.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Stream-family algorithm identifier, recorded in experiment manifests.
pub const STREAM_ALGORITHM: &str = "chacha12/set_stream";

/// Identifies one logical random stream inside an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    /// Replicate index within the experiment.
    pub replicate: u32,
    /// Method or sub-experiment slot.
    pub context: u16,
    /// Role within a replicate (data generation, bootstrap, …).
    pub purpose: u16,
}

impl StreamKey {
    pub fn new(context: u16, purpose: u16, replicate: u32) -> Self {
        StreamKey {
            replicate,
            context,
            purpose,
        }
    }

    /// Injective packing into the 64-bit ChaCha stream number.
    pub fn pack(self) -> u64 {
        ((self.context as u64) << 48) | ((self.purpose as u64) << 32) | self.replicate as u64
    }
}

/// The RNG for one stream of the family keyed by `seed`.
pub fn stream_rng(seed: u64, key: StreamKey) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(key.pack());
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;
    use std::collections::HashSet;

    #[test]
    fn packing_is_injective_over_an_experiment_index_space() {
        let mut seen = HashSet::new();
        for context in 0..8u16 {
            for purpose in 0..4u16 {
                for replicate in 0..1000u32 {
                    assert!(seen.insert(StreamKey::new(context, purpose, replicate).pack()));
                }
            }
        }
    }

    #[test]
    fn streams_replay_and_differ() {
        let a1 = stream_rng(42, StreamKey::new(0, 0, 7)).next_u64();
        let a2 = stream_rng(42, StreamKey::new(0, 0, 7)).next_u64();
        assert_eq!(a1, a2);

        let b = stream_rng(42, StreamKey::new(0, 0, 8)).next_u64();
        let c = stream_rng(43, StreamKey::new(0, 0, 7)).next_u64();
        assert_ne!(a1, b);
        assert_ne!(a1, c);
    }

    #[test]
    fn distinct_streams_look_uncorrelated() {
        // crude smoke check: correlation of paired outputs across streams
        let n = 2000;
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for r in 0..n {
            let x = stream_rng(1, StreamKey::new(0, 0, r)).next_u64() as f64 / u64::MAX as f64;
            let y = stream_rng(1, StreamKey::new(0, 1, r)).next_u64() as f64 / u64::MAX as f64;
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx / nf * sy / nf;
        let vx = sxx / nf - (sx / nf) * (sx / nf);
        let vy = syy / nf - (sy / nf) * (sy / nf);
        let corr = cov / (vx * vy).sqrt();
        assert!(corr.abs() < 0.08, "cross-stream correlation {corr}");
    }
}
