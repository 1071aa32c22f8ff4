//! Reference implementations the engine is checked against.

use std::collections::HashSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use showfinder::linalg::{LatentVector, SparseMatrix};

pub fn ref_cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na <= 1e-12 || nb <= 1e-12 {
        0.0
    } else {
        (dot / (na * nb)).clamp(-1.0, 1.0)
    }
}

/// Candidate names in best-first order for one preference.
pub fn ref_ranking(pref: &[f64], cands: &[(String, Vec<f64>)]) -> Vec<String> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    // Selection sort: repeatedly take the best remaining.
    let mut out = Vec::new();
    while !order.is_empty() {
        let mut best = 0;
        for pos in 1..order.len() {
            let (c, b) = (&cands[order[pos]], &cands[order[best]]);
            let (sc, sb) = (ref_cosine(pref, &c.1), ref_cosine(pref, &b.1));
            if sc > sb || (sc == sb && c.0 < b.0) {
                best = pos;
            }
        }
        out.push(cands[order.remove(best)].0.clone());
    }
    out
}

pub fn ref_average_cosine(prefs: &[Vec<f64>], cands: &[(String, Vec<f64>)]) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = cands
        .iter()
        .map(|(id, v)| {
            let total: f64 = prefs.iter().map(|p| ref_cosine(p, v)).sum();
            (id.clone(), total / prefs.len() as f64)
        })
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

pub fn ref_average_rank(prefs: &[Vec<f64>], cands: &[(String, Vec<f64>)]) -> Vec<(String, f64)> {
    let rankings: Vec<Vec<String>> = prefs.iter().map(|p| ref_ranking(p, cands)).collect();
    let mut out: Vec<(String, f64)> = cands
        .iter()
        .map(|(id, _)| {
            let total: usize = rankings.iter().map(|r| r.iter().position(|x| x == id).unwrap() + 1).sum();
            (id.clone(), total as f64 / prefs.len() as f64)
        })
        .collect();
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

pub fn ref_interleave(lists: &[Vec<String>]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let longest = lists.iter().map(Vec::len).max().unwrap_or(0);
    let total = {
        let mut all: Vec<&String> = lists.iter().flatten().collect();
        all.sort();
        all.dedup();
        all.len()
    };
    let mut taken = vec![0usize; lists.len()];
    for _round in 0..longest * lists.len().max(1) {
        for (l, list) in lists.iter().enumerate() {
            if let Some(next) = list.iter().skip(taken[l]).find(|x| !out.contains(x)) {
                taken[l] = list.iter().position(|x| x == next).unwrap() + 1;
                out.push(next.clone());
            }
        }
        if out.len() == total {
            break;
        }
    }
    out
}

/// Fraction of (relevant, non-relevant) pairs in order, by explicit
/// enumeration of all pairs. `None` when no such pair exists.
pub fn auc_pairs(labels: &[bool]) -> Option<f64> {
    let (mut ordered, mut pairs) = (0u32, 0u32);
    for (i, &pi) in labels.iter().enumerate() {
        for (j, &pj) in labels.iter().enumerate() {
            if pi && !pj {
                pairs += 1;
                if i < j {
                    ordered += 1;
                }
            }
        }
    }
    (pairs > 0).then(|| f64::from(ordered) / f64::from(pairs))
}

/// Labels of `ranking` under `relevant`, in ranking order.
pub fn labels<T: Eq + std::hash::Hash>(ranking: &[T], relevant: &HashSet<T>) -> Vec<bool> {
    ranking.iter().map(|x| relevant.contains(x)).collect()
}

/// Coordinates from a small grid so that exact cosine ties are common.
fn grid_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| [-1.0, 0.0, 0.5, 1.0][rng.random_range(0..4)]).collect()
}

fn continuous_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Preference vectors and named candidates for one fusion check.
pub struct Case {
    pub prefs: Vec<Vec<f64>>,
    pub cands: Vec<(String, Vec<f64>)>,
}

impl Case {
    pub fn latent(&self) -> (Vec<LatentVector>, Vec<(String, LatentVector)>) {
        (
            self.prefs.iter().map(|p| LatentVector::new(p.clone())).collect(),
            self.cands.iter().map(|(n, v)| (n.clone(), LatentVector::new(v.clone()))).collect(),
        )
    }
}

/// 300 draws for every (candidates ≤ 6, preferences ≤ 3) size, half on a
/// coarse grid that produces exact ties.
pub fn fusion_cases() -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(6_3);
    let mut out = Vec::new();
    for n_cands in 1..=6 {
        for n_prefs in 1..=3 {
            for trial in 0..300 {
                let dim = 2 + trial % 3;
                let draw = |rng: &mut ChaCha8Rng| {
                    if trial % 2 == 0 {
                        grid_vector(rng, dim)
                    } else {
                        continuous_vector(rng, dim)
                    }
                };
                let prefs = (0..n_prefs).map(|_| draw(&mut rng)).collect();
                // Shuffled names so id order differs from input order.
                let mut names: Vec<String> =
                    ["f", "b", "e", "a", "d", "c"][..n_cands].iter().map(|s| s.to_string()).collect();
                for i in (1..names.len()).rev() {
                    names.swap(i, rng.random_range(0..=i));
                }
                let cands = names.into_iter().map(|n| (n, draw(&mut rng))).collect();
                out.push(Case { prefs, cands });
            }
        }
    }
    out
}

/// Singular values of `x` from the eigenvalues of the Gram matrix, sorted
/// nonincreasing.
pub fn oracle_singular_values(x: &DMatrix<f64>) -> Vec<f64> {
    let gram = if x.nrows() <= x.ncols() { x * x.transpose() } else { x.transpose() * x };
    let mut values: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn random_sparse(rows: usize, cols: usize, density: f64, rng: &mut impl Rng) -> SparseMatrix {
    let mut entries = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if rng.random::<f64>() < density {
                entries.push((i, j, rng.random_range(0.05..1.0)));
            }
        }
    }
    SparseMatrix::from_triplets(rows, cols, entries).unwrap()
}

/// Random rank-`r` matrix: the product of two uniform factors.
pub fn exact_rank(rows: usize, cols: usize, r: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(rows, r, |_, _| rng.random_range(-1.0..1.0));
    let b = DMatrix::from_fn(r, cols, |_, _| rng.random_range(-1.0..1.0));
    a * b
}
