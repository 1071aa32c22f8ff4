//! Popularity and footprint statistics of a corpus.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ids::ArtistId;
use crate::ingest::CorpusBundle;
use crate::stats::pearson;

pub const COVERAGE_SHARE: f64 = 0.8;
pub const SMALL_FOOTPRINT: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongTailReport {
    pub n_artists: usize,
    pub n_event_artists: usize,
    /// Smallest fraction of artists, most popular first, whose listener
    /// counts sum to at least 80% of all listens.
    pub coverage_fraction: f64,
    /// Event artists per popularity decile, most popular decile first.
    pub event_artist_deciles: [usize; 10],
    pub bottom_three_decile_share: f64,
    /// Pearson correlation of footprint size with popularity rank (1 = most popular).
    pub footprint_rank_correlation: f64,
    /// (footprint size, fraction of artists with at most that many features).
    pub footprint_cdf_all: Vec<(usize, f64)>,
    pub footprint_cdf_event: Vec<(usize, f64)>,
    pub small_footprint_share_all: f64,
    pub small_footprint_share_event: f64,
}

/// Popularity ranks from 1, by listener count descending then id.
pub fn popularity_ranks(bundle: &CorpusBundle) -> Vec<(ArtistId, usize)> {
    let mut order: Vec<_> = bundle.artists.iter().collect();
    order.sort_by(|a, b| b.listener_count.cmp(&a.listener_count).then_with(|| a.id.cmp(&b.id)));
    order.into_iter().enumerate().map(|(i, a)| (a.id.clone(), i + 1)).collect()
}

/// Fraction of artists, taken most popular first, needed to reach `share`
/// of all listens.
pub fn coverage_fraction(listener_counts: &[u64], share: f64) -> f64 {
    if listener_counts.is_empty() {
        return 0.0;
    }
    let mut sorted = listener_counts.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let total: f64 = sorted.iter().map(|&c| c as f64).sum();
    let mut acc = 0.0;
    for (i, &c) in sorted.iter().enumerate() {
        acc += c as f64;
        if acc >= share * total {
            return (i + 1) as f64 / sorted.len() as f64;
        }
    }
    1.0
}

fn cdf(mut sizes: Vec<usize>) -> Vec<(usize, f64)> {
    sizes.sort_unstable();
    let n = sizes.len() as f64;
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, &s) in sizes.iter().enumerate() {
        let frac = (i + 1) as f64 / n;
        match out.last_mut() {
            Some(last) if last.0 == s => last.1 = frac,
            _ => out.push((s, frac)),
        }
    }
    out
}

fn share_at_most(sizes: &[usize], limit: usize) -> f64 {
    if sizes.is_empty() {
        return 0.0;
    }
    sizes.iter().filter(|&&s| s <= limit).count() as f64 / sizes.len() as f64
}

/// Footprint sizes are row nonzero counts of the raw data matrix.
pub fn long_tail_stats(bundle: &CorpusBundle) -> Result<LongTailReport> {
    let raw = bundle.raw_matrix()?;
    let n = bundle.artists.len();
    let ranks = popularity_ranks(bundle);

    let mut deciles = [0usize; 10];
    let mut rank_xs = Vec::with_capacity(n);
    let mut foot_ys = Vec::with_capacity(n);
    let mut event_sizes = Vec::new();
    let mut all_sizes = Vec::with_capacity(n);
    for (id, rank) in &ranks {
        let size = raw.footprint(id).unwrap_or(0);
        rank_xs.push(*rank as f64);
        foot_ys.push(size as f64);
        all_sizes.push(size);
        if bundle.artist(id).is_some_and(|a| a.is_event_artist) {
            deciles[((rank - 1) * 10 / n).min(9)] += 1;
            event_sizes.push(size);
        }
    }
    let n_event = event_sizes.len();
    let listeners: Vec<u64> = bundle.artists.iter().map(|a| a.listener_count).collect();

    Ok(LongTailReport {
        n_artists: n,
        n_event_artists: n_event,
        coverage_fraction: coverage_fraction(&listeners, COVERAGE_SHARE),
        event_artist_deciles: deciles,
        bottom_three_decile_share: if n_event == 0 {
            0.0
        } else {
            deciles[7..].iter().sum::<usize>() as f64 / n_event as f64
        },
        footprint_rank_correlation: pearson(&foot_ys, &rank_xs),
        small_footprint_share_all: share_at_most(&all_sizes, SMALL_FOOTPRINT),
        small_footprint_share_event: share_at_most(&event_sizes, SMALL_FOOTPRINT),
        footprint_cdf_all: cdf(all_sizes),
        footprint_cdf_event: cdf(event_sizes),
    })
}
