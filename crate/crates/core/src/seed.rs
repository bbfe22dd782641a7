//! Deterministic seed derivation.
//!
//! All randomness flows from one master seed. Sub-streams are derived by
//! mixing the parent seed with a label (stage, period) or an index (pair,
//! trial), so results do not depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream(u64);

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream(master)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Child stream keyed by a label such as `"pairs"` or a period name.
    pub fn named(self, label: &str) -> Self {
        let mut h = FNV_OFFSET;
        for b in label.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(FNV_PRIME);
        }
        SeedStream(splitmix64(self.0 ^ splitmix64(h)))
    }

    /// Child stream keyed by an integer index.
    pub fn indexed(self, index: u64) -> Self {
        SeedStream(splitmix64(self.0.wrapping_add(splitmix64(index ^ 0x5851_f42d_4c95_7f2d))))
    }

    /// Child stream for an unordered symbol pair; `(i, j)` and `(j, i)` agree.
    pub fn pair(self, i: usize, j: usize) -> Self {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        self.indexed(a as u64).indexed(b as u64)
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
