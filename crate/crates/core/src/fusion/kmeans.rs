use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::LatentVector;

pub const MAX_ITERATIONS: usize = 100;
pub const SHIFT_TOLERANCE: f64 = 1e-6;

/// Lloyd's k-means with k-means++ seeding. Deterministic for a given seed.
/// Returns `min(k, points.len())` centroids.
pub fn kmeans(points: &[LatentVector], k: usize, seed: u64) -> Vec<LatentVector> {
    let k = k.min(points.len());
    if k == 0 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(points, k, &mut rng);
    let dim = points[0].dim();

    for _ in 0..MAX_ITERATIONS {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for p in points {
            let c = nearest(p, &centroids);
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p.coords()) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let next = LatentVector::new(sums[c].iter().map(|s| s / counts[c] as f64).collect());
            shift = shift.max(squared_distance(&next, &centroids[c]).sqrt());
            centroids[c] = next;
        }
        if shift < SHIFT_TOLERANCE {
            break;
        }
    }
    centroids
}

fn plus_plus_init(points: &[LatentVector], k: usize, rng: &mut ChaCha8Rng) -> Vec<LatentVector> {
    let mut chosen = vec![rng.random_range(0..points.len())];
    while chosen.len() < k {
        let weights: Vec<f64> = points
            .iter()
            .map(|p| chosen.iter().map(|&c| squared_distance(p, &points[c])).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = weights.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = weights.len() - 1;
            for (i, w) in weights.iter().enumerate() {
                if *w > 0.0 && target < *w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            pick
        } else {
            // All points coincide with a centroid; take the first unused one.
            (0..points.len()).find(|i| !chosen.contains(i)).expect("k <= points")
        };
        chosen.push(next);
    }
    chosen.into_iter().map(|i| points[i].clone()).collect()
}

fn nearest(p: &LatentVector, centroids: &[LatentVector]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(p, c);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn squared_distance(a: &LatentVector, b: &LatentVector) -> f64 {
    a.coords().iter().zip(b.coords()).map(|(x, y)| (x - y) * (x - y)).sum()
}
