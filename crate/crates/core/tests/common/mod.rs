#![allow(dead_code)]

pub mod graph;
pub mod oracle;

use std::path::PathBuf;

use showfinder::artist_space::{AffinityRecord, Artist, EmbeddingIndex, Tag};
use showfinder::event_graph::{build_graph, GraphConfig, MusicEventGraph};
use showfinder::ingest::{load_corpus_dir, CorpusBundle, GeneratorConfig};
use showfinder::ArtistId;

pub fn onboarding_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/onboarding")
}

pub fn onboarding() -> (CorpusBundle, EmbeddingIndex, MusicEventGraph) {
    let bundle = load_corpus_dir(&onboarding_dir()).unwrap();
    let raw = bundle.raw_matrix().unwrap();
    let k = raw.features.n_artists();
    let index = EmbeddingIndex::fit(&raw, k, 0).unwrap();
    let graph = build_graph(&bundle, &index, &GraphConfig::default()).unwrap();
    (bundle, index, graph)
}

pub fn artist(id: &str, listeners: u64) -> Artist {
    Artist {
        id: id.into(),
        name: id.to_uppercase(),
        listener_count: listeners,
        biography: String::new(),
        is_event_artist: false,
    }
}

pub fn tag(id: &str, label: &str) -> Tag {
    Tag { id: id.into(), label: label.into(), artist_count: 0, is_genre: false }
}

pub fn tag_aff(artist: &str, tag: &str, w: f64) -> AffinityRecord {
    AffinityRecord::new(artist, showfinder::TagId::from(tag), w)
}

pub fn sim_aff(a: &str, b: &str, w: f64) -> AffinityRecord {
    AffinityRecord::new(a, ArtistId::from(b), w)
}

/// A 300-artist generator setting that runs in well under a second.
pub fn small_generator(seed: u64) -> GeneratorConfig {
    GeneratorConfig {
        n_artists: 300,
        n_event_artists: 30,
        n_tags: 40,
        n_events: 25,
        n_genres: 4,
        scenes_per_genre: 3,
        ..GeneratorConfig::with_seed(seed)
    }
}
