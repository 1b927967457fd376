use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::scalar::Real;

/// A Poisson spectrum: cumulative sums of unit-mean exponential spacings drawn
/// from a seeded ChaCha8 stream, so a seed always yields the same levels.
pub fn synthetic_poisson_levels<T: Real>(n: usize, seed: u64) -> Vec<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e = 0.0f64;
    (0..n)
        .map(|_| {
            let s: f64 = Exp1.sample(&mut rng);
            e += s;
            T::lit(e)
        })
        .collect()
}
