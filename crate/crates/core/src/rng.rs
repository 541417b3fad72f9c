//! Seeded randomness.
//!
//! Every random draw in the pipeline comes from a [`Rng`] seeded by
//! [`derive_seed`] from a master seed plus a path of indices, so results do
//! not depend on evaluation order or worker count.

use rand::SeedableRng;

/// The generator used everywhere in the pipeline.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Stream tags keep independent uses of the same index apart.
pub mod stream {
    pub const WAVEFORM: u64 = 1;
    pub const SCENE: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const INIT: u64 = 4;
    pub const BATCH: u64 = 5;
    pub const SWEEP: u64 = 6;
    pub const TSNE: u64 = 7;
    pub const SUBSAMPLE: u64 = 8;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of indices into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn rng_from(master: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(master, path))
}
