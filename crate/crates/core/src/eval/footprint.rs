//! Reduced-footprint experiment: how well do latent and raw vectors recover
//! artist similarity when only a few features of each test artist survive?

use std::collections::HashSet;

use rand::{seq::index::sample, seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::auc::{auc, rank_by_score};
use crate::error::{Error, Result};
use crate::ingest::CorpusBundle;
use crate::linalg::{cosine, fold_in, truncated_svd_with, LatentVector, SparseMatrix, SparseVector, SvdOptions};
use crate::stats::mean;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintExperimentConfig {
    pub train_size: usize,
    pub test_size: usize,
    /// Features kept per test artist. `usize::MAX` keeps everything.
    pub footprint_sizes: Vec<usize>,
    pub ranks: Vec<usize>,
    pub include_raw_baseline: bool,
    pub svd: SvdOptions,
    pub seed: u64,
}

impl FootprintExperimentConfig {
    /// A 10% test split of `n_artists`, footprints 1..256 in powers of two
    /// and ranks 32, 64, 128, 256.
    pub fn for_corpus(n_artists: usize, seed: u64) -> Self {
        let test_size = n_artists / 10;
        Self {
            train_size: n_artists - test_size,
            test_size,
            footprint_sizes: (0..=8).map(|p| 1usize << p).collect(),
            ranks: vec![32, 64, 128, 256],
            include_raw_baseline: true,
            svd: SvdOptions::fixed(),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rank", rename_all = "snake_case")]
pub enum Method {
    Raw,
    Lsa(usize),
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Raw => f.write_str("raw"),
            Method::Lsa(k) => write!(f, "lsa-{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintRow {
    pub method: Method,
    pub footprint: usize,
    pub mean_auc: f64,
    pub evaluated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootprintReport {
    pub config: FootprintExperimentConfig,
    pub rows: Vec<FootprintRow>,
    /// Test artists without any similarity link to another test artist.
    pub skipped: usize,
}

impl FootprintReport {
    pub fn mean_auc(&self, method: Method, footprint: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.method == method && r.footprint == footprint).map(|r| r.mean_auc)
    }

    /// (footprint, mean AUC) for one method, in config order.
    pub fn curve(&self, method: Method) -> Vec<(usize, f64)> {
        self.rows.iter().filter(|r| r.method == method).map(|r| (r.footprint, r.mean_auc)).collect()
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut out: Vec<Method> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }
}

/// Keeps a uniform random subset of `budget` nonzeros (all of them when the
/// vector has no more than `budget`).
pub fn reduce_footprint(x: &SparseVector, budget: usize, rng: &mut ChaCha8Rng) -> SparseVector {
    if x.nnz() <= budget {
        return x.clone();
    }
    x.retain_positions(&sample(rng, x.nnz(), budget).into_vec())
}

/// Per-(footprint, artist) stream so results do not depend on scheduling.
fn reduction_rng(seed: u64, footprint_index: usize, artist: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((footprint_index as u64) << 32) | artist as u64);
    rng
}

struct Split {
    train: SparseMatrix,
    test: Vec<SparseVector>,
    relevant: Vec<HashSet<usize>>,
}

fn split(bundle: &CorpusBundle, config: &FootprintExperimentConfig) -> Result<Split> {
    let raw = bundle.raw_matrix()?;
    let n = raw.features.n_artists();
    if config.train_size + config.test_size != n {
        return Err(Error::InvalidConfig(format!(
            "train {} + test {} != {n} artists",
            config.train_size, config.test_size
        )));
    }
    if config.test_size < 2 || config.train_size == 0 {
        return Err(Error::InvalidConfig("need at least two test artists and one training artist".into()));
    }
    if config.footprint_sizes.contains(&0) {
        return Err(Error::InvalidConfig("footprint sizes must be positive".into()));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(config.seed));
    let mut test_rows = order[..config.test_size].to_vec();
    let mut train_rows = order[config.test_size..].to_vec();
    test_rows.sort_unstable();
    train_rows.sort_unstable();

    let cols: Vec<usize> = train_rows.iter().copied().chain(n..raw.features.n_features()).collect();
    let train = raw.matrix.select(&train_rows, &cols);
    let test_block = raw.matrix.select(&test_rows, &cols);
    let test = (0..test_rows.len()).map(|i| test_block.row_vector(i)).collect();

    let among_test = raw.matrix.select(&test_rows, &test_rows);
    let relevant =
        (0..test_rows.len()).map(|i| among_test.row(i).0.iter().copied().filter(|&j| j != i).collect()).collect();
    Ok(Split { train, test, relevant })
}

/// Mean AUC over test artists, each ranking every other test artist by
/// cosine. Returns the mean and how many artists had a defined AUC.
fn mean_auc<V: Sync>(vectors: &[V], relevant: &[HashSet<usize>], sim: impl Fn(&V, &V) -> f64 + Sync) -> (f64, usize) {
    let aucs: Vec<Option<f64>> = (0..vectors.len())
        .into_par_iter()
        .map(|i| {
            let scored: Vec<(usize, f64)> =
                (0..vectors.len()).filter(|&j| j != i).map(|j| (j, sim(&vectors[i], &vectors[j]))).collect();
            auc(&rank_by_score(&scored), &relevant[i]).ok()
        })
        .collect();
    let defined: Vec<f64> = aucs.into_iter().flatten().collect();
    (mean(&defined), defined.len())
}

fn raw_cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na <= crate::linalg::ZERO_NORM || nb <= crate::linalg::ZERO_NORM {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(-1.0, 1.0) + 0.0
}

/// Runs the experiment: one row per (method, footprint), methods in the
/// order raw (if enabled) then ranks as configured.
pub fn footprint_experiment(bundle: &CorpusBundle, config: &FootprintExperimentConfig) -> Result<FootprintReport> {
    let data = split(bundle, config)?;
    let skipped = data.relevant.iter().filter(|r| r.is_empty() || r.len() + 1 == data.test.len()).count();

    let svds = config
        .ranks
        .iter()
        .map(|&k| truncated_svd_with(&data.train, k, config.seed, &config.svd).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;

    let reduced: Vec<Vec<SparseVector>> = config
        .footprint_sizes
        .iter()
        .enumerate()
        .map(|(fi, &budget)| {
            data.test
                .par_iter()
                .enumerate()
                .map(|(a, x)| reduce_footprint(x, budget, &mut reduction_rng(config.seed, fi, a)))
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    if config.include_raw_baseline {
        for (fi, &footprint) in config.footprint_sizes.iter().enumerate() {
            let (mean_auc, evaluated) = mean_auc(&reduced[fi], &data.relevant, raw_cosine);
            rows.push(FootprintRow { method: Method::Raw, footprint, mean_auc, evaluated });
        }
    }
    for (svd, &k) in svds.iter().zip(&config.ranks) {
        for (fi, &footprint) in config.footprint_sizes.iter().enumerate() {
            let folded = reduced[fi]
                .par_iter()
                .map(|x| fold_in(x, svd).map_err(Error::from))
                .collect::<Result<Vec<LatentVector>>>()?;
            let (mean_auc, evaluated) = mean_auc(&folded, &data.relevant, cosine);
            rows.push(FootprintRow { method: Method::Lsa(k), footprint, mean_auc, evaluated });
        }
    }
    Ok(FootprintReport { config: config.clone(), rows, skipped })
}
