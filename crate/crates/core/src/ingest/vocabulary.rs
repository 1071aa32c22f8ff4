use std::collections::{HashMap, HashSet};

use crate::artist_space::{AffinityRecord, Artist, Tag};
use crate::ids::{ArtistId, FeatureId, TagId};

pub const DEFAULT_MIN_SUPPORT: usize = 20;

/// Distinct artists with a positive affinity to each tag.
pub(crate) fn tag_support(affinities: &[AffinityRecord]) -> HashMap<TagId, usize> {
    let mut seen: HashSet<(&ArtistId, &TagId)> = HashSet::new();
    let mut counts = HashMap::new();
    for r in affinities {
        if let FeatureId::Tag(t) = &r.feature {
            if r.weight > 0.0 && seen.insert((&r.artist_id, t)) {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Tags carried by at least `min_support` distinct artists, in input order,
/// with `artist_count` set from `affinities`.
pub fn build_tag_vocabulary(raw_tags: &[Tag], affinities: &[AffinityRecord], min_support: usize) -> Vec<Tag> {
    let counts = tag_support(affinities);
    raw_tags
        .iter()
        .filter_map(|t| {
            let n = counts.get(&t.id).copied().unwrap_or(0);
            (n >= min_support).then(|| Tag { artist_count: n as u64, ..t.clone() })
        })
        .collect()
}

/// Lowercased alphanumeric runs. Everything else separates tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|s| !s.is_empty()).map(str::to_lowercase).collect()
}

/// Labels each artist with every vocabulary tag whose label occurs in its
/// biography as a contiguous run of whole tokens. Matches get weight 1.0.
pub fn mine_biography_tags(artists: &[Artist], vocabulary: &[Tag]) -> Vec<AffinityRecord> {
    let labels: Vec<(&TagId, Vec<String>)> =
        vocabulary.iter().map(|t| (&t.id, tokenize(&t.label))).filter(|(_, tokens)| !tokens.is_empty()).collect();
    let mut out = Vec::new();
    for artist in artists {
        let words = tokenize(&artist.biography);
        if words.is_empty() {
            continue;
        }
        for (tag, tokens) in &labels {
            if words.windows(tokens.len()).any(|w| w == tokens.as_slice()) {
                out.push(AffinityRecord::new(artist.id.clone(), FeatureId::Tag((*tag).clone()), 1.0));
            }
        }
    }
    out
}
