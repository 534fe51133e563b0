//! Seeded sampling helpers. All generators use ChaCha8 so results are stable
//! across platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_point<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_raw((0..dim.max(1)).map(|_| rng.gen_range(lo..=hi)).collect())
}

pub fn uniform_points(seed: u64, count: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vector> {
    let mut rng = rng(seed);
    (0..count).map(|_| uniform_point(&mut rng, dim, lo, hi)).collect()
}

pub fn uniform_pairs(seed: u64, count: usize, dim: usize, lo: f64, hi: f64) -> Vec<(Vector, Vector)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| (uniform_point(&mut rng, dim, lo, hi), uniform_point(&mut rng, dim, lo, hi)))
        .collect()
}

/// Weights drawn uniformly from the probability simplex.
pub fn simplex_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    }
}

pub fn convex_combination(points: &[Vector], weights: &[f64]) -> Vector {
    let mut acc = vec![0.0; points[0].dim()];
    for (p, w) in points.iter().zip(weights) {
        for (a, v) in acc.iter_mut().zip(p.as_slice()) {
            *a += w * v;
        }
    }
    Vector::from_raw(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        assert_eq!(uniform_points(7, 5, 3, -1.0, 1.0), uniform_points(7, 5, 3, -1.0, 1.0));
        let mut r = rng(1);
        let w = simplex_weights(&mut r, 6);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&v| v >= 0.0));
    }
}
