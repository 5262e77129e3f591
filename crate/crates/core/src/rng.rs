//! Splittable, counter-keyed random streams.
//!
//! Every stream is a ChaCha8 generator seeded from a 64-bit key. Child streams
//! are derived from the parent's *key*, never from its state, so a child for
//! `(round, sample)` is the same no matter how much of the parent has been
//! consumed or which thread asks for it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a base key with an ordered list of sub-keys.
pub fn derive_key(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix64(base), |acc, &p| mix64(acc ^ mix64(p.wrapping_add(0x632b_e59b_d9b4_e019))))
}

/// FNV-1a over the UTF-8 bytes of a label.
pub fn label_key(label: &str) -> u64 {
    let mut fp = Fingerprint::new();
    fp.write_bytes(label.as_bytes());
    fp.finish()
}

/// Small order-sensitive FNV-1a hasher used for data and trace fingerprints.
#[derive(Clone, Debug)]
pub struct Fingerprint(u64);

impl Default for Fingerprint {
    fn default() -> Self {
        Self::new()
    }
}

impl Fingerprint {
    pub fn new() -> Self {
        Fingerprint(0xcbf2_9ce4_8422_2325)
    }

    pub fn write_bytes(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write_bytes(&v.to_le_bytes());
    }

    pub fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug)]
pub struct RngStream {
    key: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(key: u64) -> Self {
        RngStream {
            key,
            inner: ChaCha8Rng::seed_from_u64(mix64(key)),
        }
    }

    /// The key this stream was created from; recorded in traces.
    pub fn key(&self) -> u64 {
        self.key
    }

    /// Independent child stream for sub-key `index`.
    pub fn child(&self, index: u64) -> RngStream {
        RngStream::new(derive_key(self.key, &[index]))
    }

    pub fn labelled_child(&self, label: &str) -> RngStream {
        RngStream::new(derive_key(self.key, &[label_key(label)]))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
