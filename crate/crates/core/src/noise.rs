use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// Reproducible random stream keyed by `(seed, stream_id)`.
///
/// Streams with the same seed and different ids are independent ChaCha20
/// streams, so ensemble members can run in any order or in parallel.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Wiener increment with mean 0 and variance `tau`.
    pub fn wiener_increment(&mut self, tau: f64) -> f64 {
        let z: f64 = self.rng.sample(StandardNormal);
        z * tau.sqrt()
    }

    /// Uniform sample in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}
