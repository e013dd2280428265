//! Counter-based randomness.
//!
//! Every random quantity in the crate is a pure function of a 64-bit key and
//! a counter, so results do not depend on iteration order or threading:
//!
//! ```text
//! output(key, k) = mix64(key + (k + 1) * 0x9E3779B97F4A7C15)   (wrapping)
//! uniform(key, k) = (output(key, k) >> 11) * 2^-53              in [0, 1)
//! ```
//!
//! `mix64` is the SplitMix64 finalizer, so `output(key, 0..)` is exactly the
//! SplitMix64 stream seeded with `key`.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn counter_u64(key: u64, counter: u64) -> u64 {
    mix64(key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Top 53 bits of the counter output mapped to `[0, 1)`.
#[inline]
pub fn counter_uniform(key: u64, counter: u64) -> f64 {
    (counter_u64(key, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of trial `t` under `master`: `mix64(master ^ t)`.
#[inline]
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    mix64(master ^ trial)
}

/// Sequential view of the counter stream, for places that just need a
/// reproducible sequence of draws.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    key: u64,
    counter: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = counter_u64(self.key, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        let v = counter_uniform(self.key, self.counter);
        self.counter += 1;
        v
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u64() % span) as usize
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.range_inclusive(0, i);
            items.swap(i, j);
        }
    }
}
