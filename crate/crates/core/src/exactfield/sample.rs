use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GaussianRational, Symbol};

/// Deterministic generator of small exact numbers.
///
/// Numerators and denominators are drawn with absolute value at most
/// `bound`; zero is never returned by the `nonzero_*` methods.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    rng: ChaCha8Rng,
    bound: i64,
}

pub const DEFAULT_BOUND: i64 = 100;

impl ExactSampler {
    pub fn new(seed: u64) -> Self {
        ExactSampler::with_bound(seed, DEFAULT_BOUND)
    }

    pub fn with_bound(seed: u64, bound: i64) -> Self {
        assert!(bound >= 1);
        ExactSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound,
        }
    }

    /// A sampler for the `index`-th independent stream of `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        let mut s = ExactSampler::new(seed);
        s.rng.set_stream(index);
        s
    }

    pub fn nonzero_rational(&mut self) -> GaussianRational {
        let n = loop {
            let n = self.rng.gen_range(-self.bound..=self.bound);
            if n != 0 {
                break n;
            }
        };
        let d = self.rng.gen_range(1..=self.bound);
        BigRational::new(BigInt::from(n), BigInt::from(d)).into()
    }

    pub fn rational(&mut self) -> GaussianRational {
        let n = self.rng.gen_range(-self.bound..=self.bound);
        let d = self.rng.gen_range(1..=self.bound);
        BigRational::new(BigInt::from(n), BigInt::from(d)).into()
    }

    /// A Gaussian rational with nonzero imaginary part.
    pub fn nonzero_gaussian(&mut self) -> GaussianRational {
        let re = self.rational();
        let im = self.nonzero_rational();
        GaussianRational::new(re.re().clone(), im.re().clone())
    }

    pub fn point(&mut self, symbols: &[Symbol]) -> HashMap<Symbol, GaussianRational> {
        symbols.iter().map(|&s| (s, self.nonzero_rational())).collect()
    }

    pub fn gaussian_point(&mut self, symbols: &[Symbol]) -> HashMap<Symbol, GaussianRational> {
        symbols.iter().map(|&s| (s, self.nonzero_gaussian())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a: Vec<_> = (0..5).map(|_| ExactSampler::stream(7, 3).nonzero_rational()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let mut s = ExactSampler::new(1);
        for _ in 0..200 {
            assert!(!s.nonzero_rational().is_zero());
        }
    }
}
