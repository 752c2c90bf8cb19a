//! Seeded random sources and the variate interface used by the dynamics.
//!
//! Every trajectory owns a [`RandomSource`] keyed by `(master_seed,
//! stream_id)`. The key selects a ChaCha8 key and stream, so streams with
//! different ids never overlap and results do not depend on which thread
//! simulates which trajectory.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::noise::{open_unit, NoiseModel};

#[derive(Debug, Clone)]
pub struct RandomSource {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self { master_seed, stream_id, rng }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open unit interval, one 64-bit word per call.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Source of the two kinds of variates a step consumes: influence coins
/// (uniform on `(0, 1)`) and noise increments.
pub trait Variates {
    fn coin(&mut self) -> f64;
    fn noise(&mut self, model: &NoiseModel) -> f64;
}

impl Variates for RandomSource {
    #[inline]
    fn coin(&mut self) -> f64 {
        self.uniform()
    }

    #[inline]
    fn noise(&mut self, model: &NoiseModel) -> f64 {
        model.sample(self)
    }
}

impl<V: Variates + ?Sized> Variates for &mut V {
    fn coin(&mut self) -> f64 {
        (**self).coin()
    }

    fn noise(&mut self, model: &NoiseModel) -> f64 {
        (**self).noise(model)
    }
}

/// Passes coins through and negates every noise draw. Symmetric noise makes
/// the mirrored process equal in law to the original.
#[derive(Debug)]
pub struct Mirrored<V>(pub V);

impl<V: Variates> Variates for Mirrored<V> {
    fn coin(&mut self) -> f64 {
        self.0.coin()
    }

    fn noise(&mut self, model: &NoiseModel) -> f64 {
        -self.0.noise(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn same_key_same_sequence() {
        let mut a = RandomSource::new(42, 3);
        let mut b = RandomSource::new(42, 3);
        let xs: Vec<u64> = (0..64).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..64).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut a = RandomSource::new(42, 3);
        let mut b = RandomSource::new(42, 4);
        let mut c = RandomSource::new(43, 3);
        let xa: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..16).map(|_| c.next_u64()).collect();
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn streams_look_uncorrelated() {
        let n = 200_000;
        let mut a = RandomSource::new(1, 0);
        let mut b = RandomSource::new(1, 1);
        let mut cov = 0.0;
        for _ in 0..n {
            cov += (a.uniform() - 0.5) * (b.uniform() - 0.5);
        }
        // sd of the sample covariance is 1/12/sqrt(n)
        let z = cov / n as f64 / (1.0 / 12.0 / (n as f64).sqrt());
        assert!(z.abs() < 5.0, "z = {z}");
    }

    #[test]
    fn mirrored_negates_noise_only() {
        let model = NoiseModel::uniform(5.0).unwrap();
        let mut plain = RandomSource::new(9, 9);
        let mut mirrored = Mirrored(RandomSource::new(9, 9));
        for _ in 0..100 {
            assert_eq!(plain.coin(), mirrored.coin());
            assert_eq!(plain.noise(&model), -mirrored.noise(&model));
        }
    }
}
