//! Simulated onboarding users and the fusion-strategy sweep.

use std::collections::{BTreeSet, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::auc::{auc, rank_by_score};
use crate::artist_space::EmbeddingIndex;
use crate::error::{Error, Result};
use crate::event_graph::MusicEventGraph;
use crate::fusion::{rank_candidates, FusionConfig, UserPreferences};
use crate::ids::ArtistId;
use crate::linalg::{cosine, LatentVector};
use crate::stats::{mean, std_dev};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserGroundTruth {
    pub preferences: UserPreferences,
    pub relevant_event_artist_ids: BTreeSet<ArtistId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferenceSource {
    Artists,
    Genres,
    Both,
}

impl PreferenceSource {
    pub const ALL: [PreferenceSource; 3] =
        [PreferenceSource::Artists, PreferenceSource::Genres, PreferenceSource::Both];

    pub fn select(self, prefs: &UserPreferences) -> UserPreferences {
        match self {
            PreferenceSource::Artists => UserPreferences::new(Vec::new(), prefs.popular_artist_ids.clone()),
            PreferenceSource::Genres => UserPreferences::new(prefs.genre_tag_ids.clone(), Vec::new()),
            PreferenceSource::Both => prefs.clone(),
        }
    }
}

impl std::fmt::Display for PreferenceSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PreferenceSource::Artists => "artists",
            PreferenceSource::Genres => "genres",
            PreferenceSource::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n_users: usize,
    pub min_relevant: usize,
    pub max_relevant: usize,
    /// Standard deviation of the noise added to taste–artist cosines before
    /// picking relevant event artists.
    pub relevance_noise: f64,
    pub max_genres: usize,
    pub max_artists_per_genre: usize,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            n_users: 200,
            min_relevant: 5,
            max_relevant: 10,
            relevance_noise: 0.2,
            max_genres: 3,
            max_artists_per_genre: 3,
            seed: 0,
        }
    }
}

fn user_rng(seed: u64, user: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(user as u64);
    rng
}

fn by_similarity<'a, T: Ord + 'a>(
    center: &LatentVector,
    items: impl Iterator<Item = (&'a T, &'a LatentVector)>,
) -> Vec<&'a T> {
    let mut scored: Vec<(&T, f64)> = items.map(|(id, v)| (id, cosine(center, v))).collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    scored.into_iter().map(|(id, _)| id).collect()
}

/// Users with a planted taste: a centre at a random artist's embedding, the
/// nearest event artists (under noise) as ground truth, and onboarding
/// choices taken from the genres and popular artists nearest the centre.
pub fn simulate_users(
    graph: &MusicEventGraph,
    index: &EmbeddingIndex,
    config: &SimulationConfig,
) -> Result<Vec<UserGroundTruth>> {
    if config.min_relevant == 0 || config.min_relevant > config.max_relevant {
        return Err(Error::InvalidConfig("relevant-set bounds must satisfy 1 <= min <= max".into()));
    }
    if config.max_genres == 0 || config.max_artists_per_genre == 0 {
        return Err(Error::InvalidConfig("onboarding bounds must be positive".into()));
    }
    let event_artists: Vec<(&ArtistId, &LatentVector)> =
        graph.levels.event_artists.iter().filter_map(|n| n.vector.as_ref().map(|v| (&n.id, v))).collect();
    if event_artists.len() <= config.max_relevant {
        return Err(Error::InvalidConfig("fewer embedded event artists than the relevant-set size".into()));
    }
    if graph.edges.tag_popular.is_empty() {
        return Err(Error::InvalidConfig("graph has no genre with popular artists".into()));
    }
    let anchors = index.features().artists();

    (0..config.n_users)
        .into_par_iter()
        .map(|u| {
            let mut rng = user_rng(config.seed, u);
            loop {
                let anchor = anchors.choose(&mut rng).expect("index has artists");
                let center = index.artist_embedding(anchor).expect("anchor is embedded").clone();

                let mut noisy: Vec<(&ArtistId, f64)> = event_artists
                    .iter()
                    .map(|(id, v)| {
                        (*id, cosine(&center, v) + config.relevance_noise * rng.sample::<f64, _>(StandardNormal))
                    })
                    .collect();
                noisy.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
                let n_relevant = rng.random_range(config.min_relevant..=config.max_relevant);
                let relevant = noisy.iter().take(n_relevant).map(|(id, _)| (*id).clone()).collect();

                let genres = by_similarity(&center, graph.levels.genre_tags.iter().map(|g| (&g.id, &g.vector)));
                let n_genres = rng.random_range(1..=config.max_genres).min(genres.len());
                let mut genre_ids = Vec::new();
                let mut artist_ids: Vec<ArtistId> = Vec::new();
                for &g in genres.iter().take(n_genres) {
                    genre_ids.push(g.clone());
                    let offered = graph.popular_for_genre(g);
                    let ranked = by_similarity(&center, offered.iter().map(|(p, _)| (&p.id, &p.vector)));
                    let n_artists = rng.random_range(1..=config.max_artists_per_genre);
                    let fresh: Vec<ArtistId> =
                        ranked.into_iter().filter(|a| !artist_ids.contains(a)).take(n_artists).cloned().collect();
                    artist_ids.extend(fresh);
                }
                if artist_ids.is_empty() {
                    continue;
                }
                return Ok(UserGroundTruth {
                    preferences: UserPreferences::new(genre_ids, artist_ids),
                    relevant_event_artist_ids: relevant,
                });
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMethod {
    Random,
    Popularity,
    Fusion { config: FusionConfig, source: PreferenceSource },
}

impl std::fmt::Display for SweepMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepMethod::Random => f.write_str("random"),
            SweepMethod::Popularity => f.write_str("popularity"),
            SweepMethod::Fusion { config, source } => write!(f, "{config} ({source})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub method: SweepMethod,
    pub mean_auc: f64,
    pub std_auc: f64,
    pub users: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn row(&self, method: &SweepMethod) -> Option<&SweepRow> {
        self.rows.iter().find(|r| &r.method == method)
    }

    pub fn fusion(&self, config: FusionConfig, source: PreferenceSource) -> Option<&SweepRow> {
        self.row(&SweepMethod::Fusion { config, source })
    }
}

fn summarize(method: SweepMethod, aucs: Vec<Option<f64>>) -> SweepRow {
    let defined: Vec<f64> = aucs.into_iter().flatten().collect();
    SweepRow { mean_auc: mean(&defined), std_auc: std_dev(&defined), users: defined.len(), method }
}

/// Mean and standard deviation of per-user AUC over the graph's embedded
/// event artists, for the random and popularity baselines and for every
/// (config, source) pair. Users whose selected preferences are empty for a
/// source are left out of that row.
pub fn fusion_sweep(
    graph: &MusicEventGraph,
    index: &EmbeddingIndex,
    users: &[UserGroundTruth],
    configs: &[FusionConfig],
    sources: &[PreferenceSource],
    seed: u64,
) -> Result<SweepReport> {
    if users.is_empty() {
        return Err(Error::InvalidConfig("no users to evaluate".into()));
    }
    let candidates: Vec<(ArtistId, LatentVector)> = graph
        .levels
        .event_artists
        .iter()
        .filter_map(|n| n.vector.as_ref().map(|v| (n.id.clone(), v.clone())))
        .collect();
    let listeners: Vec<(ArtistId, f64)> = graph
        .levels
        .event_artists
        .iter()
        .filter(|n| n.vector.is_some())
        .map(|n| (n.id.clone(), n.listener_count as f64))
        .collect();
    let relevant: Vec<HashSet<ArtistId>> =
        users.iter().map(|u| u.relevant_event_artist_ids.iter().cloned().collect()).collect();

    let mut rows = Vec::new();
    let random: Vec<Option<f64>> = (0..users.len())
        .into_par_iter()
        .map(|u| {
            let mut ids: Vec<ArtistId> = candidates.iter().map(|(id, _)| id.clone()).collect();
            ids.shuffle(&mut user_rng(seed, u));
            auc(&ids, &relevant[u]).ok()
        })
        .collect();
    rows.push(summarize(SweepMethod::Random, random));
    let by_listeners = rank_by_score(&listeners);
    rows.push(summarize(SweepMethod::Popularity, relevant.iter().map(|r| auc(&by_listeners, r).ok()).collect()));

    for &source in sources {
        for &config in configs {
            let aucs = users
                .par_iter()
                .zip(&relevant)
                .map(|(user, rel)| {
                    let prefs = source.select(&user.preferences);
                    if prefs.is_empty() {
                        return Ok(None);
                    }
                    let vectors = prefs.resolve(index)?;
                    let scored = rank_candidates(&vectors, &config, &candidates, seed)?;
                    Ok(auc(&rank_by_score(&scored), rel).ok())
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(summarize(SweepMethod::Fusion { config, source }, aucs));
        }
    }
    Ok(SweepReport { rows })
}
