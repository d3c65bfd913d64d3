//! Counter-addressed random streams.
//!
//! A root seed and a scenario key are expanded (SplitMix64) into a ChaCha8
//! key, one per [`Purpose`]; the replication index selects the ChaCha stream.
//! Every `(root, scenario, replication, purpose)` tuple therefore owns an
//! independent generator that can be rebuilt on any thread.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    TrueProbabilities = 0,
    Predictions = 1,
    Outcomes = 2,
    Auxiliary = 3,
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit FNV-1a hash, used to key scenarios by label.
pub fn stable_hash(text: &str) -> u64 {
    text.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub root_seed: u64,
    pub scenario: u64,
    pub replication: u64,
}

impl StreamKey {
    pub fn new(root_seed: u64, scenario: u64, replication: u64) -> Self {
        Self {
            root_seed,
            scenario,
            replication,
        }
    }

    pub fn stream(&self, purpose: Purpose) -> Stream {
        let mut state = self.root_seed ^ splitmix64(&mut self.scenario.clone());
        state ^= (purpose as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replication);
        rng
    }
}

/// The three streams one replication consumes.
pub struct ReplicationStreams {
    pub truth: Stream,
    pub predictions: Stream,
    pub outcomes: Stream,
}

impl ReplicationStreams {
    pub fn new(key: StreamKey) -> Self {
        Self {
            truth: key.stream(Purpose::TrueProbabilities),
            predictions: key.stream(Purpose::Predictions),
            outcomes: key.stream(Purpose::Outcomes),
        }
    }

    /// Convenience for one-off sampling from a single seed.
    pub fn from_seed(seed: u64) -> Self {
        Self::new(StreamKey::new(seed, 0, 0))
    }
}
