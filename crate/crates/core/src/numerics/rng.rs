//! Reproducible random streams.
//!
//! Each stream is a ChaCha8 keystream keyed by the seed and addressed by a
//! 64-bit stream id, so trajectory `k` of an ensemble can be regenerated on
//! its own without replaying trajectories `0..k`.

use num_traits::Float;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position in the keystream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn gauss(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Standard normal sample.
pub fn gauss(rng: &mut RngStream) -> f64 {
    rng.gauss()
}

/// Complex Wiener increment with `E[dxi] = 0`, `E[dxi^2] = 0` and
/// `E[|dxi|^2] = dt`.
pub fn complex_wiener_increment(rng: &mut RngStream, dt: f64) -> Result<C64> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(alloc::format!("Wiener increment needs dt > 0, got {dt}")));
    }
    let s = (0.5 * dt).sqrt();
    let re = rng.gauss();
    let im = rng.gauss();
    Ok(C64::new(re * s, im * s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rerun_is_bit_identical() {
        let a: alloc::vec::Vec<u64> = {
            let mut r = RngStream::new(1, 0);
            (0..100).map(|_| r.gauss().to_bits()).collect()
        };
        let mut r = RngStream::new(1, 0);
        let b: alloc::vec::Vec<u64> = (0..100).map(|_| r.gauss().to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(1, 0);
        let mut b = RngStream::new(1, 1);
        let same = (0..1000).filter(|_| a.gauss() == b.gauss()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn gaussian_moments() {
        let mut r = RngStream::new(42, 0);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let g = r.gauss();
            s1 += g;
            s2 += g * g;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0).abs() < 0.005, "var {var}");
    }

    #[test]
    fn wiener_increment_moments() {
        let mut r = RngStream::new(8, 3);
        let dt = 0.01;
        let n = 1_000_000;
        let mut abs2 = 0.0;
        let mut sq = C64::new(0.0, 0.0);
        for _ in 0..n {
            let z = complex_wiener_increment(&mut r, dt).unwrap();
            abs2 += z.norm_sqr();
            sq += z * z;
        }
        let abs2 = abs2 / n as f64;
        let sq = sq / n as f64;
        assert!((abs2 / dt - 1.0).abs() < 0.01, "E|dxi|^2 = {abs2}");
        assert!(sq.norm() < 3e-5, "|E dxi^2| = {}", sq.norm());
    }

    #[test]
    fn wiener_increment_rejects_nonpositive_dt() {
        let mut r = RngStream::new(0, 0);
        assert!(matches!(complex_wiener_increment(&mut r, 0.0), Err(Error::InvalidArgument(_))));
        assert!(complex_wiener_increment(&mut r, -1.0).is_err());
        assert!(complex_wiener_increment(&mut r, f64::NAN).is_err());
    }
}
