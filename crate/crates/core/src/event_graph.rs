//! The Music Event Graph: a weighted 4-partite graph
//! `genre tags → popular artists → event artists → events`.
//!
//! Tag→popular and popular→event-artist edges carry latent cosines;
//! event-artist→event edges carry weight 1. Recommendation walks the graph
//! left to right from the user's selections, scores event artists, sums
//! those scores per event, and keeps every walk that contributed as a
//! transparency path.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::artist_space::{AffinityRecord, Artist, EmbeddingIndex, Tag};
use crate::error::{Error, Result};
use crate::fusion::{rank_candidates, FusionConfig, UserPreferences};
use crate::ids::{ArtistId, EventId, FeatureId, TagId};
use crate::ingest::{default_banlist, CorpusBundle};
use crate::linalg::{cosine, LatentVector};

pub const GRAPH_FORMAT: &str = "music-event-graph";
pub const GRAPH_VERSION: u32 = 1;
/// Popular→event-artist cosines at or below this are treated as no link.
pub const MIN_EDGE_WEIGHT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventSource {
    TicketService,
    Newspaper,
    Both,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub id: EventId,
    pub title: String,
    pub venue: String,
    pub start_time: DateTime<Utc>,
    pub source: EventSource,
    pub artist_ids: Vec<ArtistId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    /// Size of the genre level.
    pub genre_count: usize,
    /// Popular artists offered per genre.
    pub popular_per_genre: usize,
    /// Minimum tag–artist cosine (exclusive) for a popular artist.
    pub popular_threshold: f64,
    /// Popular artists linked to each event artist.
    pub fanout: usize,
    /// Tag labels never offered as genres (case-insensitive).
    pub banlist: Vec<String>,
    /// Events starting before this instant are left out.
    pub cutoff: Option<DateTime<Utc>>,
}

impl Default for GraphConfig {
    fn default() -> Self {
        Self {
            genre_count: 20,
            popular_per_genre: 16,
            popular_threshold: 0.3,
            fanout: 5,
            banlist: default_banlist(),
            cutoff: None,
        }
    }
}

/// Which artists carry each tag.
#[derive(Debug, Clone, Default)]
pub struct TagStats {
    artists_by_tag: HashMap<TagId, BTreeSet<ArtistId>>,
}

impl TagStats {
    pub fn from_affinities(affinities: &[AffinityRecord]) -> Self {
        let mut artists_by_tag: HashMap<TagId, BTreeSet<ArtistId>> = HashMap::new();
        for r in affinities {
            if let FeatureId::Tag(t) = &r.feature {
                if r.weight > 0.0 {
                    artists_by_tag.entry(t.clone()).or_default().insert(r.artist_id.clone());
                }
            }
        }
        Self { artists_by_tag }
    }

    pub fn artists(&self, tag: &TagId) -> Option<&BTreeSet<ArtistId>> {
        self.artists_by_tag.get(tag)
    }

    /// How many of `artists` carry `tag`.
    pub fn count_among(&self, tag: &TagId, artists: &HashSet<&ArtistId>) -> usize {
        self.artists_by_tag.get(tag).map_or(0, |set| set.iter().filter(|a| artists.contains(a)).count())
    }
}

/// The `count` tags most often attached to the event artists, skipping
/// banned labels and tags no event artist carries. Ties break by tag id.
/// Returned tags are marked as genres.
pub fn select_genre_tags(
    event_artists: &[ArtistId],
    tags: &[Tag],
    stats: &TagStats,
    count: usize,
    banlist: &[String],
) -> Vec<(Tag, usize)> {
    let banned: HashSet<String> = banlist.iter().map(|b| b.trim().to_lowercase()).collect();
    let members: HashSet<&ArtistId> = event_artists.iter().collect();
    let mut scored: Vec<(Tag, usize)> = tags
        .iter()
        .filter(|t| !banned.contains(&t.label.trim().to_lowercase()))
        .map(|t| (t.clone(), stats.count_among(&t.id, &members)))
        .filter(|(_, n)| *n > 0)
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.id.cmp(&b.0.id)));
    scored.truncate(count);
    for (t, _) in &mut scored {
        t.is_genre = true;
    }
    scored
}

/// Among `candidates` whose cosine with the genre tag exceeds `threshold`,
/// the `count` with the most listeners (then higher cosine, then id).
pub fn select_popular_artists<'a>(
    genre_tag: &TagId,
    index: &EmbeddingIndex,
    candidates: impl IntoIterator<Item = &'a Artist>,
    count: usize,
    threshold: f64,
) -> Result<Vec<(Artist, f64)>> {
    let tag_vec = index.tag_embedding(genre_tag).ok_or_else(|| Error::unknown("tag", genre_tag))?;
    let mut eligible: Vec<(Artist, f64)> = candidates
        .into_iter()
        .filter_map(|a| index.artist_embedding(&a.id).map(|v| (a, cosine(tag_vec, v))))
        .filter(|(_, c)| *c > threshold)
        .map(|(a, c)| (a.clone(), c))
        .collect();
    eligible.sort_by(|a, b| {
        b.0.listener_count.cmp(&a.0.listener_count).then_with(|| b.1.total_cmp(&a.1)).then_with(|| a.0.id.cmp(&b.0.id))
    });
    eligible.truncate(count);
    Ok(eligible)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenreNode {
    pub id: TagId,
    pub label: String,
    /// Event artists carrying the tag.
    pub event_artist_count: usize,
    pub vector: LatentVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularNode {
    pub id: ArtistId,
    pub name: String,
    pub listener_count: u64,
    pub vector: LatentVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventArtistNode {
    pub id: ArtistId,
    pub name: String,
    pub listener_count: u64,
    /// Absent when the artist could not be placed in the latent space.
    pub vector: Option<LatentVector>,
    /// True when the vector came from fold-in rather than the fitted index.
    #[serde(default)]
    pub folded_in: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventNode {
    #[serde(flatten)]
    pub event: Event,
    /// No performing artist could be embedded.
    pub isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge<A, B> {
    pub from: A,
    pub to: B,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Levels {
    pub genre_tags: Vec<GenreNode>,
    pub popular_artists: Vec<PopularNode>,
    pub event_artists: Vec<EventArtistNode>,
    pub events: Vec<EventNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edges {
    pub tag_popular: Vec<Edge<TagId, ArtistId>>,
    pub popular_event_artist: Vec<Edge<ArtistId, ArtistId>>,
    pub event_artist_event: Vec<Edge<ArtistId, EventId>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MusicEventGraph {
    pub format: String,
    pub version: u32,
    pub levels: Levels,
    pub edges: Edges,
}

/// Node level in the graph, left to right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    GenreTag,
    PopularArtist,
    EventArtist,
    Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub level: Level,
    pub id: String,
    pub label: String,
}

/// A walk from a user selection to a recommended event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransparencyPath {
    pub nodes: Vec<PathNode>,
    pub weights: Vec<f64>,
    pub product_weight: f64,
}

impl TransparencyPath {
    /// Human-readable chain, e.g. `rock → The Band → Local Act → Friday Show`.
    pub fn render(&self) -> String {
        self.nodes.iter().map(|n| n.label.as_str()).collect::<Vec<_>>().join(" → ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtistContribution {
    pub artist_id: ArtistId,
    pub name: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEvent {
    pub event_id: EventId,
    pub title: String,
    pub venue: String,
    pub start_time: DateTime<Utc>,
    pub score: f64,
    pub artists: Vec<ArtistContribution>,
    pub paths: Vec<TransparencyPath>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEventList {
    pub events: Vec<RankedEvent>,
}

/// How event artists are scored during recommendation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ranker {
    /// Sum of edge-weight products over all walks from the selections.
    Paths,
    /// Fusion score over latent vectors, counted only for event artists
    /// reachable from the selections.
    Fusion { config: FusionConfig, seed: u64 },
}

impl Default for Ranker {
    fn default() -> Self {
        Ranker::Fusion { config: FusionConfig::default(), seed: 0 }
    }
}

/// Places every event artist in the latent space: the fitted column
/// embedding when present, otherwise a fold-in of its affinity records.
fn embed_event_artist(
    artist: &ArtistId,
    index: &EmbeddingIndex,
    affinities: &HashMap<&ArtistId, Vec<&AffinityRecord>>,
) -> Option<(LatentVector, bool)> {
    if let Some(v) = index.artist_embedding(artist) {
        return Some((v.clone(), false));
    }
    let records = affinities.get(artist)?;
    let x = index.features().vector(records.iter().map(|r| (&r.feature, r.weight))).ok()?;
    if x.nnz() == 0 {
        return None;
    }
    let v = index.embed_new_artist(&x).ok()?;
    (v.norm() > crate::linalg::ZERO_NORM).then_some((v, true))
}

/// Builds the graph from a corpus and a fitted index.
pub fn build_graph(bundle: &CorpusBundle, index: &EmbeddingIndex, config: &GraphConfig) -> Result<MusicEventGraph> {
    let artists_by_id: HashMap<&ArtistId, &Artist> = bundle.artists.iter().map(|a| (&a.id, a)).collect();
    let events: Vec<&Event> =
        bundle.events.iter().filter(|e| config.cutoff.is_none_or(|c| e.start_time >= c)).collect();

    let event_artist_ids: Vec<ArtistId> =
        events.iter().flat_map(|e| e.artist_ids.iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
    let event_artist_set: HashSet<&ArtistId> = event_artist_ids.iter().collect();

    let mut records_by_artist: HashMap<&ArtistId, Vec<&AffinityRecord>> = HashMap::new();
    for r in &bundle.affinities {
        records_by_artist.entry(&r.artist_id).or_default().push(r);
    }

    let mut event_artists = Vec::with_capacity(event_artist_ids.len());
    for id in &event_artist_ids {
        let artist = artists_by_id.get(id).ok_or_else(|| Error::unknown("artist", id))?;
        let placed = embed_event_artist(id, index, &records_by_artist);
        event_artists.push(EventArtistNode {
            id: id.clone(),
            name: artist.name.clone(),
            listener_count: artist.listener_count,
            folded_in: placed.as_ref().is_some_and(|(_, f)| *f),
            vector: placed.map(|(v, _)| v),
        });
    }

    // Genre level.
    let stats = TagStats::from_affinities(&bundle.affinities);
    let embedded_tags: Vec<Tag> =
        bundle.tags.iter().filter(|t| index.tag_embedding(&t.id).is_some()).cloned().collect();
    let genres = select_genre_tags(&event_artist_ids, &embedded_tags, &stats, config.genre_count, &config.banlist);

    // Popular level: strongly associated, well-known, and not performing locally.
    let candidates: Vec<&Artist> = bundle.artists.iter().filter(|a| !event_artist_set.contains(&a.id)).collect();
    let mut popular: BTreeMap<ArtistId, PopularNode> = BTreeMap::new();
    let mut tag_popular = Vec::new();
    let mut genre_tags = Vec::with_capacity(genres.len());
    for (tag, n_event_artists) in &genres {
        let picked = select_popular_artists(
            &tag.id,
            index,
            candidates.iter().copied(),
            config.popular_per_genre,
            config.popular_threshold,
        )?;
        for (artist, weight) in picked {
            if weight <= 0.0 {
                continue;
            }
            tag_popular.push(Edge { from: tag.id.clone(), to: artist.id.clone(), weight });
            popular.entry(artist.id.clone()).or_insert_with(|| PopularNode {
                id: artist.id.clone(),
                name: artist.name.clone(),
                listener_count: artist.listener_count,
                vector: index.artist_embedding(&artist.id).cloned().expect("selected artists are embedded"),
            });
        }
        genre_tags.push(GenreNode {
            id: tag.id.clone(),
            label: tag.label.clone(),
            event_artist_count: *n_event_artists,
            vector: index.tag_embedding(&tag.id).cloned().expect("filtered to embedded tags"),
        });
    }
    let popular_artists: Vec<PopularNode> = popular.into_values().collect();

    // Middle edges: each event artist to its most similar popular artists.
    let mut popular_event_artist = Vec::new();
    for ea in &event_artists {
        let Some(v) = &ea.vector else { continue };
        let mut scored: Vec<(&PopularNode, f64)> =
            popular_artists.iter().map(|p| (p, cosine(&p.vector, v))).filter(|(_, c)| *c > MIN_EDGE_WEIGHT).collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.id.cmp(&b.0.id)));
        scored.truncate(config.fanout);
        for (p, weight) in scored {
            popular_event_artist.push(Edge { from: p.id.clone(), to: ea.id.clone(), weight });
        }
    }
    popular_event_artist.sort_by(|a, b| a.from.cmp(&b.from).then_with(|| a.to.cmp(&b.to)));

    let embedded: HashSet<&ArtistId> = event_artists.iter().filter(|n| n.vector.is_some()).map(|n| &n.id).collect();
    let mut event_artist_event = Vec::new();
    let mut event_nodes = Vec::with_capacity(events.len());
    for e in &events {
        let mut seen = HashSet::new();
        for a in &e.artist_ids {
            if seen.insert(a) {
                event_artist_event.push(Edge { from: a.clone(), to: e.id.clone(), weight: 1.0 });
            }
        }
        event_nodes
            .push(EventNode { event: (*e).clone(), isolated: !e.artist_ids.iter().any(|a| embedded.contains(a)) });
    }

    let graph = MusicEventGraph {
        format: GRAPH_FORMAT.into(),
        version: GRAPH_VERSION,
        levels: Levels { genre_tags, popular_artists, event_artists, events: event_nodes },
        edges: Edges { tag_popular, popular_event_artist, event_artist_event },
    };
    debug_assert!(graph.validate().is_ok());
    Ok(graph)
}

/// Adjacency lookups for one traversal.
struct Adjacency<'g> {
    genre: HashMap<&'g TagId, &'g GenreNode>,
    popular: HashMap<&'g ArtistId, &'g PopularNode>,
    event_artist: HashMap<&'g ArtistId, &'g EventArtistNode>,
    event: HashMap<&'g EventId, &'g EventNode>,
    tag_out: HashMap<&'g TagId, Vec<&'g Edge<TagId, ArtistId>>>,
    tag_in: HashMap<&'g ArtistId, Vec<&'g Edge<TagId, ArtistId>>>,
    popular_out: HashMap<&'g ArtistId, Vec<&'g Edge<ArtistId, ArtistId>>>,
    artist_events: HashMap<&'g ArtistId, Vec<&'g Edge<ArtistId, EventId>>>,
}

impl<'g> Adjacency<'g> {
    fn new(g: &'g MusicEventGraph) -> Self {
        let mut adj = Adjacency {
            genre: g.levels.genre_tags.iter().map(|n| (&n.id, n)).collect(),
            popular: g.levels.popular_artists.iter().map(|n| (&n.id, n)).collect(),
            event_artist: g.levels.event_artists.iter().map(|n| (&n.id, n)).collect(),
            event: g.levels.events.iter().map(|n| (&n.event.id, n)).collect(),
            tag_out: HashMap::new(),
            tag_in: HashMap::new(),
            popular_out: HashMap::new(),
            artist_events: HashMap::new(),
        };
        for e in &g.edges.tag_popular {
            adj.tag_out.entry(&e.from).or_default().push(e);
            adj.tag_in.entry(&e.to).or_default().push(e);
        }
        for e in &g.edges.popular_event_artist {
            adj.popular_out.entry(&e.from).or_default().push(e);
        }
        for e in &g.edges.event_artist_event {
            adj.artist_events.entry(&e.from).or_default().push(e);
        }
        adj
    }
}

impl MusicEventGraph {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let graph: MusicEventGraph = serde_json::from_str(text)?;
        if graph.format != GRAPH_FORMAT || graph.version != GRAPH_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported graph document {} v{} (expected {GRAPH_FORMAT} v{GRAPH_VERSION})",
                graph.format, graph.version
            )));
        }
        graph.validate()?;
        Ok(graph)
    }

    pub fn genre(&self, id: &TagId) -> Option<&GenreNode> {
        self.levels.genre_tags.iter().find(|g| &g.id == id)
    }

    pub fn event(&self, id: &EventId) -> Option<&EventNode> {
        self.levels.events.iter().find(|e| &e.event.id == id)
    }

    pub fn event_artist(&self, id: &ArtistId) -> Option<&EventArtistNode> {
        self.levels.event_artists.iter().find(|e| &e.id == id)
    }

    pub fn popular_artist(&self, id: &ArtistId) -> Option<&PopularNode> {
        self.levels.popular_artists.iter().find(|p| &p.id == id)
    }

    /// Popular artists linked from a genre, strongest listener count first
    /// (the order they were selected in).
    pub fn popular_for_genre(&self, id: &TagId) -> Vec<(&PopularNode, f64)> {
        self.edges
            .tag_popular
            .iter()
            .filter(|e| &e.from == id)
            .filter_map(|e| self.popular_artist(&e.to).map(|p| (p, e.weight)))
            .collect()
    }

    /// Checks level discipline and edge weights.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("graph invariant violated: {m}")));
        let genres: HashSet<&TagId> = self.levels.genre_tags.iter().map(|n| &n.id).collect();
        let popular: HashSet<&ArtistId> = self.levels.popular_artists.iter().map(|n| &n.id).collect();
        let event_artists: HashSet<&ArtistId> = self.levels.event_artists.iter().map(|n| &n.id).collect();
        let events: HashSet<&EventId> = self.levels.events.iter().map(|n| &n.event.id).collect();
        if let Some(a) = popular.intersection(&event_artists).next() {
            return bad(format!("artist {a} on two levels"));
        }
        for e in &self.edges.tag_popular {
            if !genres.contains(&e.from) || !popular.contains(&e.to) {
                return bad(format!("tag edge {} -> {}", e.from, e.to));
            }
            if !(-1.0..=1.0).contains(&e.weight) {
                return bad(format!("tag edge weight {}", e.weight));
            }
        }
        for e in &self.edges.popular_event_artist {
            if !popular.contains(&e.from) || !event_artists.contains(&e.to) {
                return bad(format!("artist edge {} -> {}", e.from, e.to));
            }
            if !(-1.0..=1.0).contains(&e.weight) {
                return bad(format!("artist edge weight {}", e.weight));
            }
        }
        let mut linked: HashSet<(&ArtistId, &EventId)> = HashSet::new();
        for e in &self.edges.event_artist_event {
            if !event_artists.contains(&e.from) || !events.contains(&e.to) {
                return bad(format!("event edge {} -> {}", e.from, e.to));
            }
            if e.weight != 1.0 {
                return bad(format!("event edge weight {}", e.weight));
            }
            linked.insert((&e.from, &e.to));
        }
        for node in &self.levels.events {
            if node.event.artist_ids.is_empty() {
                return bad(format!("event {} has no artists", node.event.id));
            }
            for a in &node.event.artist_ids {
                if !linked.contains(&(a, &node.event.id)) {
                    return bad(format!("performer {a} not linked to {}", node.event.id));
                }
            }
        }
        Ok(())
    }

    /// Every walk from the selections to each reachable event artist.
    fn walks(&self, adj: &Adjacency<'_>, prefs: &UserPreferences) -> Result<BTreeMap<ArtistId, Vec<Walk>>> {
        let mut out: BTreeMap<ArtistId, Vec<Walk>> = BTreeMap::new();
        let selected_tags: Vec<&TagId> = prefs.genre_tag_ids.iter().collect();
        for t in &selected_tags {
            if !adj.genre.contains_key(t) {
                return Err(Error::unknown("genre tag", t));
            }
        }
        for p in &prefs.popular_artist_ids {
            if !adj.popular.contains_key(p) {
                return Err(Error::unknown("popular artist", p));
            }
        }
        // Selected popular artists, labelled with each selected genre that offered them.
        for p in &prefs.popular_artist_ids {
            let prefixes: Vec<&Edge<TagId, ArtistId>> = adj
                .tag_in
                .get(p)
                .map(|v| v.iter().copied().filter(|e| selected_tags.contains(&&e.from)).collect())
                .unwrap_or_default();
            for edge in adj.popular_out.get(p).into_iter().flatten() {
                out.entry(edge.to.clone()).or_default().push(Walk {
                    tag: None,
                    popular: p.clone(),
                    popular_weight: edge.weight,
                    tag_weight: None,
                });
                for prefix in &prefixes {
                    out.entry(edge.to.clone()).or_default().push(Walk {
                        tag: Some(prefix.from.clone()),
                        popular: p.clone(),
                        popular_weight: edge.weight,
                        tag_weight: Some(prefix.weight),
                    });
                }
            }
        }
        // Selected genres reach event artists through every popular artist they offer.
        let picked: HashSet<&ArtistId> = prefs.popular_artist_ids.iter().collect();
        for t in &selected_tags {
            for tag_edge in adj.tag_out.get(t).into_iter().flatten() {
                if picked.contains(&tag_edge.to) {
                    continue;
                }
                for edge in adj.popular_out.get(&tag_edge.to).into_iter().flatten() {
                    out.entry(edge.to.clone()).or_default().push(Walk {
                        tag: Some((*t).clone()),
                        popular: tag_edge.to.clone(),
                        popular_weight: edge.weight,
                        tag_weight: Some(tag_edge.weight),
                    });
                }
            }
        }
        Ok(out)
    }

    fn path(&self, adj: &Adjacency<'_>, walk: &Walk, artist: &ArtistId, event: &EventId) -> TransparencyPath {
        let mut nodes = Vec::with_capacity(4);
        let mut weights = Vec::with_capacity(3);
        if let (Some(t), Some(w)) = (&walk.tag, walk.tag_weight) {
            nodes.push(PathNode { level: Level::GenreTag, id: t.to_string(), label: adj.genre[t].label.clone() });
            weights.push(w);
        }
        nodes.push(PathNode {
            level: Level::PopularArtist,
            id: walk.popular.to_string(),
            label: adj.popular[&walk.popular].name.clone(),
        });
        weights.push(walk.popular_weight);
        nodes.push(PathNode {
            level: Level::EventArtist,
            id: artist.to_string(),
            label: adj.event_artist[artist].name.clone(),
        });
        weights.push(1.0);
        nodes.push(PathNode {
            level: Level::Event,
            id: event.to_string(),
            label: adj.event[event].event.title.clone(),
        });
        let product_weight = weights.iter().product();
        TransparencyPath { nodes, weights, product_weight }
    }
}

/// A walk up to (not including) the event artist.
#[derive(Debug, Clone)]
struct Walk {
    tag: Option<TagId>,
    tag_weight: Option<f64>,
    popular: ArtistId,
    popular_weight: f64,
}

impl Walk {
    fn weight(&self) -> f64 {
        self.tag_weight.unwrap_or(1.0) * self.popular_weight
    }
}

/// Scores and ranks every event for a user. Events no selection reaches
/// score zero, carry no paths and sit at the tail; ties break by start
/// time, then id.
pub fn recommend(graph: &MusicEventGraph, prefs: &UserPreferences, ranker: &Ranker) -> Result<RankedEventList> {
    if prefs.is_empty() {
        return Err(Error::EmptyPreferences);
    }
    let adj = Adjacency::new(graph);
    let walks = graph.walks(&adj, prefs)?;

    let artist_scores: HashMap<ArtistId, f64> = match ranker {
        Ranker::Paths => walks.iter().map(|(a, ws)| (a.clone(), ws.iter().map(Walk::weight).sum())).collect(),
        Ranker::Fusion { config, seed } => {
            let pref_vectors: Vec<LatentVector> = prefs
                .genre_tag_ids
                .iter()
                .map(|t| adj.genre[t].vector.clone())
                .chain(prefs.popular_artist_ids.iter().map(|p| adj.popular[p].vector.clone()))
                .collect();
            let candidates: Vec<(ArtistId, LatentVector)> = graph
                .levels
                .event_artists
                .iter()
                .filter_map(|n| n.vector.as_ref().map(|v| (n.id.clone(), v.clone())))
                .collect();
            if candidates.is_empty() {
                HashMap::new()
            } else {
                rank_candidates(&pref_vectors, config, &candidates, *seed)?
                    .into_iter()
                    .filter(|(a, _)| walks.contains_key(a))
                    .collect()
            }
        }
    };

    let mut ranked: Vec<RankedEvent> = graph
        .levels
        .events
        .iter()
        .map(|node| {
            let e = &node.event;
            let mut score = 0.0;
            let mut artists = Vec::new();
            let mut paths = Vec::new();
            let mut seen = HashSet::new();
            for a in &e.artist_ids {
                if !seen.insert(a) {
                    continue;
                }
                let Some(s) = artist_scores.get(a) else { continue };
                score += s;
                artists.push(ArtistContribution {
                    artist_id: a.clone(),
                    name: adj.event_artist[a].name.clone(),
                    score: *s,
                });
                for w in walks.get(a).into_iter().flatten() {
                    paths.push(graph.path(&adj, w, a, &e.id));
                }
            }
            RankedEvent {
                event_id: e.id.clone(),
                title: e.title.clone(),
                venue: e.venue.clone(),
                start_time: e.start_time,
                score,
                artists,
                paths,
            }
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.start_time.cmp(&b.start_time))
            .then_with(|| a.event_id.cmp(&b.event_id))
    });
    Ok(RankedEventList { events: ranked })
}
