//! Deterministic derivation of generator seeds from structured keys.
//!
//! Every random stream in the crate is addressed by a base seed plus a list
//! of tags (generation, offspring index, episode, ...). Streams never depend on
//! which worker evaluates them, so results are independent of thread count.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

pub(crate) mod tag {
    pub const PERTURBATION: u64 = 0x5045_5254;
    pub const EPISODES: u64 = 0x4550_4953;
    pub const INIT: u64 = 0x494e_4954;
    pub const TOPOLOGY: u64 = 0x544f_504f;
    pub const MAZE: u64 = 0x4d41_5a45;
    pub const NOISE: u64 = 0x4e4f_4953;
    pub const HELD_OUT: u64 = 0x484f_4c44;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes `tags` into `base`, producing a well-scrambled 64-bit seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(base), |acc, &t| splitmix64(acc ^ splitmix64(t.wrapping_add(0x632b_e59b_d9b4_e019))))
}

pub fn stream(base: u64, tags: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(base, tags))
}
