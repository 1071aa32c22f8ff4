//! Early and late fusion of several user preference vectors into a single
//! ranking of candidate (event) artists.
//!
//! Early fusion reshapes the preference set (keep all, average to one, or
//! cluster to `round(ln n)` centroids). Late fusion turns the remaining
//! vectors into one ranking (mean cosine, mean rank, or round-robin
//! interleaving of the per-preference rankings).

mod kmeans;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use kmeans::kmeans;

use crate::artist_space::EmbeddingIndex;
use crate::error::{Error, Result};
use crate::ids::{ArtistId, FeatureId, TagId};
use crate::linalg::{cosine, LatentVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EarlyFusion {
    None,
    Average,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LateFusion {
    AverageCosine,
    AverageRank,
    Interleave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FusionConfig {
    pub early: EarlyFusion,
    pub late: LateFusion,
}

impl FusionConfig {
    pub const fn new(early: EarlyFusion, late: LateFusion) -> Self {
        Self { early, late }
    }

    /// The seven early/late combinations evaluated in the fusion sweep.
    pub fn sweep() -> [FusionConfig; 7] {
        use EarlyFusion as E;
        use LateFusion as L;
        [
            Self::new(E::None, L::AverageCosine),
            Self::new(E::None, L::AverageRank),
            Self::new(E::None, L::Interleave),
            Self::new(E::Average, L::AverageCosine),
            Self::new(E::Cluster, L::AverageCosine),
            Self::new(E::Cluster, L::AverageRank),
            Self::new(E::Cluster, L::Interleave),
        ]
    }
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self::new(EarlyFusion::None, LateFusion::AverageCosine)
    }
}

impl fmt::Display for FusionConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let early = match self.early {
            EarlyFusion::None => "none",
            EarlyFusion::Average => "average",
            EarlyFusion::Cluster => "cluster",
        };
        let late = match self.late {
            LateFusion::AverageCosine => "average_cosine",
            LateFusion::AverageRank => "average_rank",
            LateFusion::Interleave => "interleave",
        };
        write!(f, "{early}/{late}")
    }
}

impl FromStr for FusionConfig {
    type Err = Error;

    /// Parses `early/late`, e.g. `none/average_cosine`.
    fn from_str(s: &str) -> Result<Self> {
        let (early, late) =
            s.split_once('/').ok_or_else(|| Error::InvalidConfig(format!("fusion config `{s}` is not early/late")))?;
        let early = match early {
            "none" => EarlyFusion::None,
            "average" => EarlyFusion::Average,
            "cluster" => EarlyFusion::Cluster,
            other => return Err(Error::InvalidConfig(format!("unknown early fusion `{other}`"))),
        };
        let late = match late {
            "average_cosine" | "cosine" => LateFusion::AverageCosine,
            "average_rank" => LateFusion::AverageRank,
            "interleave" => LateFusion::Interleave,
            other => return Err(Error::InvalidConfig(format!("unknown late fusion `{other}`"))),
        };
        Ok(Self { early, late })
    }
}

/// Onboarding selections, in the order the user made them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserPreferences {
    #[serde(default)]
    pub genre_tag_ids: Vec<TagId>,
    #[serde(default)]
    pub popular_artist_ids: Vec<ArtistId>,
}

impl UserPreferences {
    pub fn new(genre_tag_ids: Vec<TagId>, popular_artist_ids: Vec<ArtistId>) -> Self {
        Self { genre_tag_ids, popular_artist_ids }
    }

    pub fn is_empty(&self) -> bool {
        self.genre_tag_ids.is_empty() && self.popular_artist_ids.is_empty()
    }

    pub fn len(&self) -> usize {
        self.genre_tag_ids.len() + self.popular_artist_ids.len()
    }

    /// Genres first, then artists, each in selection order.
    pub fn features(&self) -> Vec<FeatureId> {
        self.genre_tag_ids
            .iter()
            .cloned()
            .map(FeatureId::Tag)
            .chain(self.popular_artist_ids.iter().cloned().map(FeatureId::Artist))
            .collect()
    }

    /// Latent vectors for every preference, in [`features`](Self::features) order.
    pub fn resolve(&self, index: &EmbeddingIndex) -> Result<Vec<LatentVector>> {
        self.features()
            .iter()
            .map(|f| index.embedding(f).cloned().ok_or_else(|| Error::unknown("feature", f)))
            .collect()
    }
}

/// Number of k-means clusters for `n` preference vectors: `round(ln n)`,
/// at least 1.
pub fn cluster_count(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    ((n as f64).ln().round() as usize).max(1)
}

/// Reshapes the preference vectors before ranking.
pub fn early_fuse(vectors: &[LatentVector], mode: EarlyFusion, seed: u64) -> Vec<LatentVector> {
    match mode {
        EarlyFusion::None => vectors.to_vec(),
        EarlyFusion::Average => {
            if vectors.is_empty() {
                return Vec::new();
            }
            let dim = vectors[0].dim();
            let mut mean = vec![0.0; dim];
            for v in vectors {
                for (m, c) in mean.iter_mut().zip(v.coords()) {
                    *m += c;
                }
            }
            let n = vectors.len() as f64;
            vec![LatentVector::new(mean.into_iter().map(|m| m / n).collect())]
        }
        EarlyFusion::Cluster => kmeans(vectors, cluster_count(vectors.len()), seed),
    }
}

/// One cosine ranking per preference: score descending, id ascending.
fn per_preference_rankings<T: Ord + Clone>(prefs: &[LatentVector], candidates: &[(T, LatentVector)]) -> Vec<Vec<T>> {
    prefs
        .iter()
        .map(|p| {
            let mut scored: Vec<(&T, f64)> = candidates.iter().map(|(id, v)| (id, cosine(p, v))).collect();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            scored.into_iter().map(|(id, _)| id.clone()).collect()
        })
        .collect()
}

/// Mean cosine to the preference vectors; returns `(candidate, mean)`
/// sorted by mean descending, then id.
pub fn late_fuse_average_cosine<T: Ord + Clone>(
    prefs: &[LatentVector],
    candidates: &[(T, LatentVector)],
) -> Vec<(T, f64)> {
    let n = prefs.len().max(1) as f64;
    let mut out: Vec<(T, f64)> =
        candidates.iter().map(|(id, v)| (id.clone(), prefs.iter().map(|p| cosine(p, v)).sum::<f64>() / n)).collect();
    out.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Mean 1-based position over the per-preference rankings; returns
/// `(candidate, mean_rank)` sorted by mean rank ascending, then id.
pub fn late_fuse_average_rank<T: Ord + Clone + std::hash::Hash>(
    prefs: &[LatentVector],
    candidates: &[(T, LatentVector)],
) -> Vec<(T, f64)> {
    let rankings = per_preference_rankings(prefs, candidates);
    let mut totals: HashMap<T, f64> = HashMap::new();
    for ranking in &rankings {
        for (pos, id) in ranking.iter().enumerate() {
            *totals.entry(id.clone()).or_insert(0.0) += (pos + 1) as f64;
        }
    }
    let n = rankings.len().max(1) as f64;
    let mut out: Vec<(T, f64)> =
        candidates.iter().map(|(id, _)| (id.clone(), totals.get(id).copied().unwrap_or(0.0) / n)).collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

/// Round-robin over the per-preference rankings in preference order,
/// each turn taking that list's best candidate not yet emitted.
pub fn late_fuse_interleave<T: Ord + Clone + std::hash::Hash>(
    prefs: &[LatentVector],
    candidates: &[(T, LatentVector)],
) -> Vec<T> {
    interleave_lists(&per_preference_rankings(prefs, candidates))
}

/// Interleaves already-ranked lists. Every item appearing in any list is
/// emitted exactly once.
pub fn interleave_lists<T: Clone + Eq + std::hash::Hash>(lists: &[Vec<T>]) -> Vec<T> {
    let total: HashSet<&T> = lists.iter().flatten().collect();
    let mut emitted: HashSet<T> = HashSet::new();
    let mut out = Vec::with_capacity(total.len());
    let mut cursors = vec![0usize; lists.len()];
    while out.len() < total.len() {
        for (list, cursor) in lists.iter().zip(cursors.iter_mut()) {
            while *cursor < list.len() && emitted.contains(&list[*cursor]) {
                *cursor += 1;
            }
            if let Some(item) = list.get(*cursor) {
                emitted.insert(item.clone());
                out.push(item.clone());
                *cursor += 1;
            }
        }
    }
    out
}

/// Fuses `prefs` under `config` and ranks `candidates`. Scores are the mean
/// cosine for [`LateFusion::AverageCosine`] and `(N − r + 1) / N` for the
/// rank-based modes, where `r` is the mean rank or the interleaved position.
pub fn rank_candidates<T: Ord + Clone + std::hash::Hash>(
    prefs: &[LatentVector],
    config: &FusionConfig,
    candidates: &[(T, LatentVector)],
    seed: u64,
) -> Result<Vec<(T, f64)>> {
    if prefs.is_empty() {
        return Err(Error::EmptyPreferences);
    }
    let fused = early_fuse(prefs, config.early, seed);
    let n = candidates.len() as f64;
    Ok(match config.late {
        LateFusion::AverageCosine => late_fuse_average_cosine(&fused, candidates),
        LateFusion::AverageRank => {
            late_fuse_average_rank(&fused, candidates).into_iter().map(|(id, r)| (id, (n - r + 1.0) / n)).collect()
        }
        LateFusion::Interleave => late_fuse_interleave(&fused, candidates)
            .into_iter()
            .enumerate()
            .map(|(pos, id)| (id, (n - pos as f64) / n))
            .collect(),
    })
}

/// Ranks event artists for a user. Every preference and every event artist
/// must be embedded in `index`.
pub fn rank_event_artists(
    prefs: &UserPreferences,
    config: &FusionConfig,
    index: &EmbeddingIndex,
    event_artist_ids: &[ArtistId],
    seed: u64,
) -> Result<Vec<(ArtistId, f64)>> {
    if prefs.is_empty() {
        return Err(Error::EmptyPreferences);
    }
    let pref_vectors = prefs.resolve(index)?;
    let candidates = event_artist_ids
        .iter()
        .map(|a| index.artist_embedding(a).map(|v| (a.clone(), v.clone())).ok_or_else(|| Error::unknown("artist", a)))
        .collect::<Result<Vec<_>>>()?;
    rank_candidates(&pref_vectors, config, &candidates, seed)
}
