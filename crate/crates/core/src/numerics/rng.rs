use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Vector;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, whose 64-bit stream selector gives independent
/// sequences for distinct ids under the same seed. Trials of an experiment
/// each get their own id, so they can run in any order or in parallel.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform draw from `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Stable stream id for a labelled coordinate such as `("overall", [point, trial])`.
///
/// FNV-1a over the label and indices followed by a SplitMix64 finalizer; the
/// value does not depend on platform or compiler version.
pub fn stream_id(label: &str, indices: &[u64]) -> u64 {
    const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = FNV_OFFSET;
    let bytes = label
        .bytes()
        .chain(std::iter::once(0xff))
        .chain(indices.iter().flat_map(|i| i.to_le_bytes()));
    for b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    splitmix64(h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw from the unit sphere in `R^dim` (normalized Gaussian).
pub fn sample_unit_sphere(dim: usize, rng: &mut RngStream) -> Vector {
    assert!(dim >= 1, "sphere dimension must be positive");
    loop {
        let g = Vector::from_fn(dim, |_, _| rng.normal());
        let norm = g.norm();
        if norm > 0.0 {
            return g / norm;
        }
    }
}

/// Uniform draw from the closed unit ball in `R^dim`: a uniform direction
/// scaled by `U^(1/dim)`.
pub fn sample_unit_ball(dim: usize, rng: &mut RngStream) -> Vector {
    let direction = sample_unit_sphere(dim, rng);
    let radius = rng.uniform().powf(1.0 / dim as f64);
    direction * radius
}
