//! Reproducible random streams.
//!
//! Generator: xoshiro256++ (Blackman & Vigna), state expanded from a `u64`
//! seed with SplitMix64 (`rand_xoshiro`'s `seed_from_u64`).
//!
//! Sub-streams: chunk `c` of a run with master seed `s` is seeded with
//! `mix64(s + (c + 1) · 0x9E3779B97F4A7C15)`, where `mix64` is the SplitMix64
//! output function
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! Bounded integers use Lemire's multiply-shift with rejection: one `u64` per
//! draw, plus a redraw with probability below `bound / 2^64`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sub-stream `stream` derived from `master`.
pub fn split_seed(master: u64, stream: u64) -> u64 {
    mix64(master.wrapping_add(stream.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn stream_rng(seed: u64) -> StreamRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn substream_rng(master: u64, stream: u64) -> StreamRng {
    stream_rng(split_seed(master, stream))
}

/// Uniform integer in `0..bound`.
pub fn uniform_below<R: RngCore>(rng: &mut R, bound: u64) -> u64 {
    assert!(bound > 0, "empty range");
    let mut m = (rng.next_u64() as u128) * (bound as u128);
    if (m as u64) < bound {
        let threshold = bound.wrapping_neg() % bound;
        while (m as u64) < threshold {
            m = (rng.next_u64() as u128) * (bound as u128);
        }
    }
    (m >> 64) as u64
}
