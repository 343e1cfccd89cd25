//! Counter-based random streams.
//!
//! A stream is a ChaCha8 keystream keyed by the 64-bit seed with the
//! 64-bit stream id as nonce; the word position is the counter. Streams are
//! cheap to create, so parallel code gives each replicate its own stream
//! and results do not depend on how work is scheduled.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a hash of a label.
fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    /// Stream for replicate `index` of the task named `label`.
    pub fn for_task(seed: u64, label: &str, index: u64) -> Self {
        Self::new(seed, mix64(label_hash(label) ^ mix64(index)))
    }

    /// An independent child stream, derived from this stream's identity
    /// (not its position).
    pub fn child(&self, index: u64) -> Self {
        Self::new(self.seed, mix64(self.stream_id ^ mix64(index.wrapping_add(0x5bd1_e995))))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    /// Jumps to an absolute word position.
    pub fn set_counter(&mut self, pos: u128) {
        self.inner.set_word_pos(pos);
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn identical_identity_gives_identical_sequence() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        assert_eq!(a.counter(), 200);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 4);
        let mut c = RngStream::for_task(7, "x", 0);
        let mut d = RngStream::for_task(7, "x", 1);
        let va: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(va, vb);
        assert_ne!(c.next_u64(), d.next_u64());
    }

    #[test]
    fn counter_can_be_rewound() {
        let mut a = RngStream::new(1, 1);
        let _ = a.next_u64();
        let pos = a.counter();
        let x: f64 = a.random();
        a.set_counter(pos);
        let y: f64 = a.random();
        assert_eq!(x, y);
    }

    #[test]
    fn uniform_mean_is_sane() {
        let mut a = RngStream::new(11, 0);
        let n = 100_000;
        let m: f64 = (0..n).map(|_| a.random::<f64>()).sum::<f64>() / n as f64;
        assert!((m - 0.5).abs() < 3.0 * (1.0 / 12.0 / n as f64).sqrt());
    }
}
