//! Seed derivation and the two instance generators' random streams.
//!
//! Everything here is portable and stable across platforms and Rust
//! releases: campaign outputs must be byte-identical for a given master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream used by every search and walk.
pub type SearchRng = ChaCha8Rng;

pub fn search_rng(seed: u64) -> SearchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string; stable fingerprint for labels.
pub fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Derives a child seed from a parent seed and a sequence of integer keys.
pub fn derive_seed(parent: u64, keys: &[u64]) -> u64 {
    keys.iter()
        .fold(mix64(parent), |acc, &k| mix64(acc ^ mix64(k)))
}

/// Per-walk seed: `master ^ hash(instance_id, walk_id)`.
pub fn walk_seed(master: u64, instance_id: &str, walk_id: u64) -> u64 {
    master ^ mix64(label_hash(instance_id) ^ mix64(walk_id))
}

/// Counter-based uniform integer on `[0, bound)` keyed by `(seed, index)`.
///
/// Uses the multiply-shift range reduction; the bias is below 2^-57 for the
/// bounds used here.
#[inline]
pub fn keyed_uniform(seed: u64, index: u64, bound: u32) -> u32 {
    let word = mix64(mix64(seed) ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    ((u128::from(word) * u128::from(bound)) >> 64) as u32
}

/// Taillard's portable Lehmer generator (a = 16807, m = 2^31 - 1) with
/// Schrage's decomposition, as published with the flowshop benchmarks.
#[derive(Debug, Clone)]
pub struct TaillardLcg {
    seed: i64,
}

impl TaillardLcg {
    const M: i64 = 2_147_483_647;
    const A: i64 = 16_807;
    const B: i64 = 127_773;
    const C: i64 = 2_836;

    /// The state must lie in `[1, 2^31 - 2]`; other values are folded into it.
    pub fn new(seed: u64) -> Self {
        let mut s = (seed % (Self::M as u64)) as i64;
        if s == 0 {
            s = 1;
        }
        Self { seed: s }
    }

    pub fn state(&self) -> i64 {
        self.seed
    }

    fn next_unit(&mut self) -> f64 {
        let k = self.seed / Self::B;
        self.seed = Self::A * (self.seed % Self::B) - k * Self::C;
        if self.seed < 0 {
            self.seed += Self::M;
        }
        self.seed as f64 / Self::M as f64
    }

    /// Uniform integer in `[low, high]`.
    pub fn unif(&mut self, low: i64, high: i64) -> i64 {
        let u = self.next_unit();
        low + (u * (high - low + 1) as f64).floor() as i64
    }
}
