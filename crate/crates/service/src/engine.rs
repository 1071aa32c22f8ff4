//! The recommendation engine the service answers from: a Music Event Graph
//! built from a corpus, or read back from a serialized graph.

use std::fs;
use std::path::PathBuf;

use showfinder::artist_space::{EmbeddingIndex, DEFAULT_RANK};
use showfinder::event_graph::{build_graph, Edges, GraphConfig, Levels, MusicEventGraph, GRAPH_FORMAT, GRAPH_VERSION};
use showfinder::ingest::{generate_synthetic_corpus, load_corpus_dir, CorpusBundle, GeneratorConfig};
use showfinder::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Dir(PathBuf),
    /// The default synthetic corpus for a seed.
    Synthetic(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub corpus: CorpusSource,
    /// Serialized graph to serve instead of building one from the corpus.
    pub graph_file: Option<PathBuf>,
    pub rank: usize,
    pub seed: u64,
    pub graph: GraphConfig,
}

impl EngineConfig {
    pub fn for_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            corpus: CorpusSource::Dir(dir.into()),
            graph_file: None,
            rank: DEFAULT_RANK,
            seed: 0,
            graph: GraphConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Engine {
    pub graph: MusicEventGraph,
}

fn empty_graph() -> MusicEventGraph {
    MusicEventGraph {
        format: GRAPH_FORMAT.into(),
        version: GRAPH_VERSION,
        levels: Levels { genre_tags: vec![], popular_artists: vec![], event_artists: vec![], events: vec![] },
        edges: Edges { tag_popular: vec![], popular_event_artist: vec![], event_artist_event: vec![] },
    }
}

/// Fits the artist space at `rank` (capped by the matrix shape) and builds
/// the graph. A corpus without artists gives an empty graph.
pub fn graph_for_corpus(
    bundle: &CorpusBundle,
    rank: usize,
    seed: u64,
    config: &GraphConfig,
) -> Result<MusicEventGraph> {
    if bundle.artists.is_empty() {
        return Ok(empty_graph());
    }
    let raw = bundle.raw_matrix()?;
    let k = rank.min(raw.features.n_artists()).min(raw.features.n_features());
    let index = EmbeddingIndex::fit(&raw, k, seed)?;
    build_graph(bundle, &index, config)
}

impl Engine {
    pub fn new(graph: MusicEventGraph) -> Self {
        Self { graph }
    }

    pub fn load(config: &EngineConfig) -> Result<Self> {
        if let Some(path) = &config.graph_file {
            let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            return Ok(Self::new(MusicEventGraph::from_json(&text)?));
        }
        let bundle = match &config.corpus {
            CorpusSource::Dir(dir) => load_corpus_dir(dir)?,
            CorpusSource::Synthetic(seed) => generate_synthetic_corpus(&GeneratorConfig::with_seed(*seed))?,
        };
        Ok(Self::new(graph_for_corpus(&bundle, config.rank, config.seed, &config.graph)?))
    }
}
