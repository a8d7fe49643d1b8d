//! Deterministic seed derivation.
//!
//! All randomness in a run flows from a single 64-bit seed through named
//! substreams ("distribution", "sampling", "teleport", ...), optionally
//! indexed by trial number. Two runs with the same seed consume independent
//! streams per purpose, so adding draws to one stage never perturbs another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// FNV-1a over the stream name, so distinct names land in distinct streams.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A ChaCha12 stream for `(seed, name, trial)`.
pub fn trial_stream(seed: u64, name: &str, trial: u64) -> ChaCha12Rng {
    let mut state = seed ^ fnv1a(name.as_bytes()) ^ trial.wrapping_mul(0xd1b5_4a32_d192_ed03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// A ChaCha12 stream for `(seed, name)`; trial 0 of [`trial_stream`].
pub fn substream(seed: u64, name: &str) -> ChaCha12Rng {
    trial_stream(seed, name, 0)
}
