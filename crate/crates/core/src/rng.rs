//! Counter-based random streams.
//!
//! Every Brownian path is a pure function of `(master seed, path index)`:
//! the master seed keys a ChaCha8 block cipher, the path index selects the
//! cipher stream, and step `k` of the path consumes the stream from the
//! start. No state is shared between paths, so paths can be generated in
//! any order and on any number of workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub index: u64,
}

impl Seed {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }

    /// Seed of the `index`-th path under the same master seed.
    pub fn path(self, index: u64) -> Self {
        Self { index, ..self }
    }

    /// Independent master seed for an auxiliary purpose (random integrands,
    /// random test points). Derivation is a SplitMix64 finalizer over the
    /// master seed mixed with a tag.
    pub fn derive(self, tag: u64) -> Self {
        Self {
            master: splitmix64(self.master ^ splitmix64(tag.wrapping_add(0x9E37_79B9_7F4A_7C15))),
            index: 0,
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.index);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fills `out` with i.i.d. standard normal draws from the stream of `seed`.
pub fn fill_standard_normal(seed: Seed, out: &mut [f64]) {
    let mut rng = seed.rng();
    for z in out.iter_mut() {
        *z = StandardNormal.sample(&mut rng);
    }
}
