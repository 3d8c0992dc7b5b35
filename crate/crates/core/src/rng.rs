//! Seekable uniform stream so chunked parallel sampling reproduces the
//! serial sequence exactly.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

pub(crate) struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    /// Positions the stream at the start of sample `first`, where every
    /// sample consumes exactly `draws` 64-bit words.
    pub(crate) fn at_sample(seed: u64, draws: usize, first: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // word position counts 32-bit words
        rng.set_word_pos(first as u128 * draws as u128 * 2);
        Self { rng }
    }

    /// Uniform on the open interval (0, 1).
    pub(crate) fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }
}
