//! Artist/tag latent space.
//!
//! The raw data matrix has one row per artist and one column per feature,
//! where the features are all artists (similarity) followed by all tags
//! (affinity). Its truncated SVD places every artist and tag in the same
//! k-dimensional space as the columns of `diag(σ) Vᵀ`; similarity between
//! any two features is the cosine of their columns.
//!
//! A new artist is folded in as `x V diag(σ)⁻¹` and then rescaled by `σ²`,
//! so that folded-in artists and column embeddings share one coordinate
//! system (`x V diag(σ)`).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{ArtistId, FeatureId, FeatureKind, TagId};
use crate::linalg::{
    cosine, feature_embeddings, fold_in, truncated_svd_with, LatentVector, SparseMatrix, SparseVector, SvdOptions,
    TruncatedSvd,
};

/// Rank used when none is configured.
pub const DEFAULT_RANK: usize = 64;
/// Largest configurable rank.
pub const MAX_RANK: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artist {
    pub id: ArtistId,
    pub name: String,
    pub listener_count: u64,
    #[serde(default)]
    pub biography: String,
    #[serde(default)]
    pub is_event_artist: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tag {
    pub id: TagId,
    pub label: String,
    pub artist_count: u64,
    #[serde(default)]
    pub is_genre: bool,
}

/// One nonzero `x_{i,j}`: how strongly an artist relates to a feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityRecord {
    pub artist_id: ArtistId,
    pub feature: FeatureId,
    pub weight: f64,
}

impl AffinityRecord {
    pub fn new(artist_id: impl Into<ArtistId>, feature: impl Into<FeatureId>, weight: f64) -> Self {
        Self { artist_id: artist_id.into(), feature: feature.into(), weight }
    }
}

/// Column layout of the raw data matrix: artists first, then tags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    artists: Vec<ArtistId>,
    tags: Vec<TagId>,
    #[serde(skip)]
    artist_pos: HashMap<ArtistId, usize>,
    #[serde(skip)]
    tag_pos: HashMap<TagId, usize>,
}

impl FeatureSpace {
    pub fn new(artists: Vec<ArtistId>, tags: Vec<TagId>) -> Self {
        let mut space = Self { artists, tags, artist_pos: HashMap::new(), tag_pos: HashMap::new() };
        space.reindex();
        space
    }

    fn reindex(&mut self) {
        self.artist_pos = self.artists.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        self.tag_pos = self.tags.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn n_artists(&self) -> usize {
        self.artists.len()
    }

    pub fn n_tags(&self) -> usize {
        self.tags.len()
    }

    pub fn n_features(&self) -> usize {
        self.artists.len() + self.tags.len()
    }

    pub fn artists(&self) -> &[ArtistId] {
        &self.artists
    }

    pub fn tags(&self) -> &[TagId] {
        &self.tags
    }

    /// Row index of an artist (equal to its column index).
    pub fn artist_index(&self, id: &ArtistId) -> Option<usize> {
        self.artist_pos.get(id).copied()
    }

    pub fn column(&self, feature: &FeatureId) -> Option<usize> {
        match feature {
            FeatureId::Artist(a) => self.artist_pos.get(a).copied(),
            FeatureId::Tag(t) => self.tag_pos.get(t).map(|i| i + self.artists.len()),
        }
    }

    pub fn feature(&self, column: usize) -> FeatureId {
        if column < self.artists.len() {
            FeatureId::Artist(self.artists[column].clone())
        } else {
            FeatureId::Tag(self.tags[column - self.artists.len()].clone())
        }
    }

    /// Builds a raw feature vector from `(feature, weight)` pairs. Features
    /// outside this space are skipped; weights must lie in [0, 1].
    pub fn vector<'a, I>(&self, entries: I) -> Result<SparseVector>
    where
        I: IntoIterator<Item = (&'a FeatureId, f64)>,
    {
        let mut merged: HashMap<usize, f64> = HashMap::new();
        for (feature, weight) in entries {
            if !(0.0..=1.0).contains(&weight) {
                return Err(Error::InvalidWeight { artist: "<new>".into(), feature: feature.to_string(), weight });
            }
            if let Some(col) = self.column(feature) {
                let slot = merged.entry(col).or_insert(0.0);
                *slot = slot.max(weight);
            }
        }
        Ok(SparseVector::new(self.n_features(), merged)?)
    }
}

/// The raw data matrix together with its row/column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataMatrix {
    pub matrix: SparseMatrix,
    pub features: FeatureSpace,
}

impl RawDataMatrix {
    /// Number of nonzeros in an artist's row (its digital footprint).
    pub fn footprint(&self, artist: &ArtistId) -> Option<usize> {
        self.features.artist_index(artist).map(|i| self.matrix.row_nnz(i))
    }

    /// Cosine between two raw columns, bypassing the latent space.
    pub fn raw_cosine(&self, a: &FeatureId, b: &FeatureId) -> Result<f64> {
        let columns = self.raw_columns();
        let ca = self.features.column(a).ok_or_else(|| Error::unknown("feature", a))?;
        let cb = self.features.column(b).ok_or_else(|| Error::unknown("feature", b))?;
        Ok(sparse_cosine(&columns[ca], &columns[cb]))
    }

    /// Top-`n` features by raw column cosine, excluding the query; ties by
    /// ascending feature id.
    pub fn raw_similar(
        &self,
        query: &FeatureId,
        n: usize,
        filter: Option<FeatureKind>,
    ) -> Result<Vec<(FeatureId, f64)>> {
        let q = self.features.column(query).ok_or_else(|| Error::unknown("feature", query))?;
        let columns = self.raw_columns();
        let scored = (0..self.features.n_features())
            .filter(|&c| c != q)
            .map(|c| (self.features.feature(c), sparse_cosine(&columns[q], &columns[c])));
        Ok(top_n(scored, n, filter))
    }

    fn raw_columns(&self) -> Vec<SparseVector> {
        let n_cols = self.matrix.n_cols();
        let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_cols];
        for (i, j, v) in self.matrix.triplets() {
            entries[j].push((i, v));
        }
        entries.into_iter().map(|e| SparseVector::new(self.matrix.n_rows(), e).expect("valid column")).collect()
    }
}

pub(crate) fn sparse_cosine(a: &SparseVector, b: &SparseVector) -> f64 {
    let (na, nb) = (a.norm(), b.norm());
    if na <= crate::linalg::ZERO_NORM || nb <= crate::linalg::ZERO_NORM {
        return 0.0;
    }
    (a.dot(b) / (na * nb)).clamp(-1.0, 1.0) + 0.0
}

/// Stacks the artist-similarity block next to the artist-tag block.
///
/// Every artist gets `x_{i,i} = 1`. Zero weights are not stored, so a
/// missing record and an explicit zero are indistinguishable. When the same
/// (artist, feature) pair appears more than once the largest weight wins.
pub fn build_raw_matrix(artists: &[Artist], tags: &[Tag], affinities: &[AffinityRecord]) -> Result<RawDataMatrix> {
    let features =
        FeatureSpace::new(artists.iter().map(|a| a.id.clone()).collect(), tags.iter().map(|t| t.id.clone()).collect());
    if features.artist_pos.len() != artists.len() {
        return Err(Error::InvalidConfig("duplicate artist id".into()));
    }
    if features.tag_pos.len() != tags.len() {
        return Err(Error::InvalidConfig("duplicate tag id".into()));
    }

    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();
    for i in 0..artists.len() {
        cells.insert((i, i), 1.0);
    }
    for record in affinities {
        if !(0.0..=1.0).contains(&record.weight) || !record.weight.is_finite() {
            return Err(Error::InvalidWeight {
                artist: record.artist_id.to_string(),
                feature: record.feature.to_string(),
                weight: record.weight,
            });
        }
        let row =
            features.artist_index(&record.artist_id).ok_or_else(|| Error::unknown("artist", &record.artist_id))?;
        let col = features.column(&record.feature).ok_or_else(|| match &record.feature {
            FeatureId::Artist(a) => Error::unknown("artist", a),
            FeatureId::Tag(t) => Error::unknown("tag", t),
        })?;
        if row == col {
            continue;
        }
        let slot = cells.entry((row, col)).or_insert(0.0);
        *slot = slot.max(record.weight);
    }

    let matrix = SparseMatrix::from_triplets(
        artists.len(),
        features.n_features(),
        cells.into_iter().map(|((r, c), v)| (r, c, v)),
    )?;
    Ok(RawDataMatrix { matrix, features })
}

/// Fitted latent space: the factorization plus one embedding per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingIndex {
    svd: TruncatedSvd,
    features: FeatureSpace,
    embeddings: Vec<LatentVector>,
}

impl EmbeddingIndex {
    /// Fits with default SVD options.
    pub fn fit(raw: &RawDataMatrix, k: usize, seed: u64) -> Result<Self> {
        Self::fit_with(raw, k, seed, &SvdOptions::default())
    }

    pub fn fit_with(raw: &RawDataMatrix, k: usize, seed: u64, options: &SvdOptions) -> Result<Self> {
        if k > MAX_RANK {
            return Err(crate::linalg::LinalgError::InvalidRank { k, max: MAX_RANK }.into());
        }
        let svd = truncated_svd_with(&raw.matrix, k, seed, options)?;
        Ok(Self::from_svd(svd, raw.features.clone()))
    }

    /// Wraps an existing factorization whose columns follow `features`.
    pub fn from_svd(svd: TruncatedSvd, features: FeatureSpace) -> Self {
        let emb = feature_embeddings(&svd);
        let embeddings = (0..emb.ncols()).map(|j| LatentVector::new(emb.column(j).iter().copied().collect())).collect();
        Self { svd, features, embeddings }
    }

    pub fn rank(&self) -> usize {
        self.svd.rank()
    }

    pub fn svd(&self) -> &TruncatedSvd {
        &self.svd
    }

    pub fn features(&self) -> &FeatureSpace {
        &self.features
    }

    pub fn n_embeddings(&self) -> usize {
        self.embeddings.len()
    }

    pub fn embedding(&self, feature: &FeatureId) -> Option<&LatentVector> {
        self.features.column(feature).map(|c| &self.embeddings[c])
    }

    pub fn artist_embedding(&self, artist: &ArtistId) -> Option<&LatentVector> {
        self.embedding(&FeatureId::Artist(artist.clone()))
    }

    pub fn tag_embedding(&self, tag: &TagId) -> Option<&LatentVector> {
        self.embedding(&FeatureId::Tag(tag.clone()))
    }

    /// Places an unseen artist, described by a raw feature vector over this
    /// index's features, next to the column embeddings: `x V diag(σ)`.
    pub fn embed_new_artist(&self, affinities: &SparseVector) -> Result<LatentVector> {
        let folded = fold_in(affinities, &self.svd)?;
        let coords = folded.coords().iter().zip(self.svd.sigma().iter()).map(|(c, s)| c * s * s).collect();
        Ok(LatentVector::new(coords))
    }

    /// Cosine similarity between two known features.
    pub fn similarity(&self, a: &FeatureId, b: &FeatureId) -> Result<f64> {
        let pa = self.embedding(a).ok_or_else(|| Error::unknown("feature", a))?;
        let pb = self.embedding(b).ok_or_else(|| Error::unknown("feature", b))?;
        Ok(cosine(pa, pb))
    }

    /// Top-`n` features by cosine to `query`, excluding the query itself.
    /// Ties break by ascending feature id.
    pub fn similar(&self, query: &FeatureId, n: usize, filter: Option<FeatureKind>) -> Result<Vec<(FeatureId, f64)>> {
        let q = self.features.column(query).ok_or_else(|| Error::unknown("feature", query))?;
        let target = &self.embeddings[q];
        let scored = self
            .embeddings
            .iter()
            .enumerate()
            .filter(|(c, _)| *c != q)
            .map(|(c, e)| (self.features.feature(c), cosine(target, e)));
        Ok(top_n(scored, n, filter))
    }

    /// Top-`n` features by cosine to an arbitrary latent vector.
    pub fn nearest(&self, target: &LatentVector, n: usize, filter: Option<FeatureKind>) -> Vec<(FeatureId, f64)> {
        let scored = self.embeddings.iter().enumerate().map(|(c, e)| (self.features.feature(c), cosine(target, e)));
        top_n(scored, n, filter)
    }

    /// Rebuilds lookup tables after deserialization.
    pub fn reindex(&mut self) {
        self.features.reindex();
    }
}

fn top_n<I>(scored: I, n: usize, filter: Option<FeatureKind>) -> Vec<(FeatureId, f64)>
where
    I: Iterator<Item = (FeatureId, f64)>,
{
    if n == 0 {
        return Vec::new();
    }
    let mut all: Vec<(FeatureId, f64)> = scored.filter(|(f, _)| filter.is_none_or(|k| f.kind() == k)).collect();
    all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(n);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn artist(id: &str) -> Artist {
        Artist {
            id: id.into(),
            name: id.to_uppercase(),
            listener_count: 0,
            biography: String::new(),
            is_event_artist: false,
        }
    }

    fn tag(id: &str) -> Tag {
        Tag { id: id.into(), label: id.into(), artist_count: 0, is_genre: false }
    }

    #[test]
    fn two_artists_no_affinities_is_identity() {
        let raw = build_raw_matrix(&[artist("a1"), artist("a2")], &[], &[]).unwrap();
        assert_eq!(raw.matrix.to_dense(), nalgebra::DMatrix::identity(2, 2));
    }

    #[test]
    fn counts_nonzeros() {
        let artists = [artist("a1"), artist("a2"), artist("a3")];
        let records = [AffinityRecord::new("a1", TagId::from("t1"), 0.5)];
        let raw = build_raw_matrix(&artists, &[tag("t1")], &records).unwrap();
        assert_eq!((raw.matrix.n_rows(), raw.matrix.n_cols()), (3, 4));
        assert_eq!(raw.matrix.nnz(), 4);
        assert_eq!(raw.matrix.get(0, 3), 0.5);
        assert_eq!(raw.footprint(&"a1".into()), Some(2));
    }

    #[test]
    fn rejects_unknown_and_out_of_range() {
        let artists = [artist("a1")];
        let unknown = [AffinityRecord::new("a1", ArtistId::from("zz"), 0.5)];
        assert!(matches!(build_raw_matrix(&artists, &[], &unknown), Err(Error::UnknownEntity { .. })));
        let heavy = [AffinityRecord::new("a1", TagId::from("t1"), 1.2)];
        assert!(matches!(build_raw_matrix(&artists, &[tag("t1")], &heavy), Err(Error::InvalidWeight { .. })));
        let negative = [AffinityRecord::new("a1", TagId::from("t1"), -0.1)];
        assert!(matches!(build_raw_matrix(&artists, &[tag("t1")], &negative), Err(Error::InvalidWeight { .. })));
    }

    #[test]
    fn identity_space_is_orthogonal() {
        let artists: Vec<Artist> = (0..5).map(|i| artist(&format!("a{i}"))).collect();
        let raw = build_raw_matrix(&artists, &[], &[]).unwrap();
        let index = EmbeddingIndex::fit(&raw, 5, 0).unwrap();
        assert_eq!(index.n_embeddings(), 5);
        for a in &artists {
            for b in &artists {
                if a.id != b.id {
                    let s = index.similarity(&a.id.clone().into(), &b.id.clone().into()).unwrap();
                    assert!(s.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn identical_columns_have_unit_cosine() {
        // a1 and a2 are listed by the same rows with the same weights.
        let artists = [artist("a1"), artist("a2"), artist("a3")];
        let records = [
            AffinityRecord::new("a1", ArtistId::from("a2"), 1.0),
            AffinityRecord::new("a2", ArtistId::from("a1"), 1.0),
            AffinityRecord::new("a3", ArtistId::from("a1"), 0.4),
            AffinityRecord::new("a3", ArtistId::from("a2"), 0.4),
        ];
        let raw = build_raw_matrix(&artists, &[], &records).unwrap();
        let index = EmbeddingIndex::fit(&raw, 3, 9).unwrap();
        let s = index.similarity(&ArtistId::from("a1").into(), &ArtistId::from("a2").into()).unwrap();
        assert!((s - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn similar_respects_n_and_filter() {
        let artists = [artist("a1"), artist("a2")];
        let records = [AffinityRecord::new("a1", TagId::from("t1"), 1.0)];
        let raw = build_raw_matrix(&artists, &[tag("t1")], &records).unwrap();
        let index = EmbeddingIndex::fit(&raw, 2, 0).unwrap();
        let t1 = FeatureId::Tag("t1".into());
        assert!(index.similar(&t1, 0, None).unwrap().is_empty());
        let artists_only = index.similar(&t1, 10, Some(FeatureKind::Artist)).unwrap();
        assert_eq!(artists_only.len(), 2);
        assert!(artists_only.iter().all(|(f, _)| f.kind() == FeatureKind::Artist));
        assert!(matches!(index.similar(&FeatureId::Tag("nope".into()), 1, None), Err(Error::UnknownEntity { .. })));
    }

    #[test]
    fn rank_above_limit_is_rejected() {
        let raw = build_raw_matrix(&[artist("a1")], &[], &[]).unwrap();
        assert!(EmbeddingIndex::fit(&raw, MAX_RANK + 1, 0).is_err());
    }
}
