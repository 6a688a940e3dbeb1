//! Counter-based random streams.
//!
//! A stream is a 64-bit key plus a counter; output `i` is a bijective mix of
//! `key + (i + 1) * GOLDEN`. Trial `t` of a run seeded with `s` reads the
//! stream keyed by `derive_key(s, t)`, so every trial sees the same numbers
//! no matter which thread executes it or in what order.

use rand::RngCore;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of stream `index` under `seed`.
#[inline]
pub fn derive_key(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ 0x5851_F42D_4C95_7F2D).wrapping_add(mix64(index.wrapping_add(GOLDEN))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StreamRng {
    key: u64,
    counter: u64,
}

impl StreamRng {
    pub fn new(key: u64) -> Self {
        Self { key, counter: 0 }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new(derive_key(seed, u64::MAX))
    }

    /// Stream used by trial `trial` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Self::new(derive_key(seed, trial))
    }

    /// An independent child stream, e.g. for a sub-experiment.
    pub fn split(&self, tag: u64) -> Self {
        Self::new(derive_key(self.key, tag))
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)))
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_word() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on the open interval `(0, 1)`.
    #[inline]
    pub fn open01(&mut self) -> f64 {
        ((self.next_word() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `[0, n)`, unbiased (multiply-shift with rejection).
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut m = (self.next_word() as u128) * (n as u128);
        if (m as u64) < n {
            let threshold = n.wrapping_neg() % n;
            while (m as u64) < threshold {
                m = (self.next_word() as u128) * (n as u128);
            }
        }
        (m >> 64) as u64
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_word() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next_word()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_word().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
