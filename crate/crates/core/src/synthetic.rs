//! Seeded synthetic point sets for tests, examples and the CLI.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::Dataset;

/// `n` points uniform in the unit cube, rounded to `f32` so they survive an
/// fvecs round trip unchanged.
pub fn uniform(n: usize, dim: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * dim).map(|_| f64::from(rng.gen::<f32>())).collect();
    Dataset::new(dim, data).expect("n and dim must be positive")
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Points from a Gaussian mixture on a random `latent`-dimensional subspace
/// of `R^dim`, plus a little full-dimensional noise: high ambient dimension
/// with low intrinsic dimension, as in descriptor data. Cluster centers
/// overlap enough that every region of the space is populated. The first `n`
/// points are the base set, the next `n_queries` are queries from the same
/// distribution. Values are rounded to `f32`.
pub fn low_rank_mixture(
    n: usize,
    n_queries: usize,
    dim: usize,
    latent: usize,
    clusters: usize,
    seed: u64,
) -> (Dataset, Dataset) {
    const CENTER_SPREAD: f64 = 0.5;
    const AMBIENT_NOISE: f64 = 0.3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis: Vec<f64> = (0..dim * latent).map(|_| gaussian(&mut rng)).collect();
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| {
            (0..latent)
                .map(|_| CENTER_SPREAD * gaussian(&mut rng))
                .collect()
        })
        .collect();
    let mut draw = |count: usize| {
        let mut data = Vec::with_capacity(count * dim);
        let mut z = vec![0.0; latent];
        for _ in 0..count {
            let c = rng.gen_range(0..clusters);
            for (zi, &m) in z.iter_mut().zip(&centers[c]) {
                *zi = m + gaussian(&mut rng);
            }
            for r in 0..dim {
                let row = &basis[r * latent..(r + 1) * latent];
                let v: f64 = row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>()
                    + AMBIENT_NOISE * gaussian(&mut rng);
                data.push(f64::from(v as f32));
            }
        }
        Dataset::new(dim, data).expect("n and dim must be positive")
    };
    let base = draw(n);
    let queries = draw(n_queries);
    (base, queries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        assert_eq!(uniform(20, 3, 1), uniform(20, 3, 1));
        assert_ne!(uniform(20, 3, 1), uniform(20, 3, 2));
        let (a, qa) = low_rank_mixture(50, 5, 16, 4, 3, 9);
        let (b, qb) = low_rank_mixture(50, 5, 16, 4, 3, 9);
        assert_eq!((a.len(), a.dim(), qa.len()), (50, 16, 5));
        assert_eq!(a, b);
        assert_eq!(qa, qb);
    }

    #[test]
    fn values_survive_f32() {
        let (a, _) = low_rank_mixture(10, 1, 8, 2, 2, 0);
        assert!(a.as_slice().iter().all(|&v| f64::from(v as f32) == v));
    }
}
