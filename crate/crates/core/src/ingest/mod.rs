//! Corpus files, tag vocabulary shaping and the synthetic corpus generator.
//!
//! A corpus directory holds one NDJSON file per entity type. The first line
//! of every file is a header `{"format": "...", "version": 1}`; each further
//! line is one record. Events may be split over several `events*.ndjson`
//! files, one per source.

mod generator;
mod vocabulary;

pub use generator::{generate_synthetic_corpus, GeneratorConfig};
pub use vocabulary::{build_tag_vocabulary, mine_biography_tags, tokenize, DEFAULT_MIN_SUPPORT};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::artist_space::{build_raw_matrix, AffinityRecord, Artist, RawDataMatrix, Tag};
use crate::error::{Error, Result};
use crate::event_graph::{Event, EventSource};
use crate::ids::{ArtistId, EventId, FeatureId, TagId};

pub const CORPUS_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "corpus.json";
pub const ARTISTS_FILE: &str = "artists.ndjson";
pub const TAGS_FILE: &str = "tags.ndjson";
pub const AFFINITIES_FILE: &str = "affinities.ndjson";
pub const EVENTS_FILE: &str = "events.ndjson";

const DEFAULT_BANLIST: &str = include_str!("../../config/banlist.txt");

/// Parses a banlist file: one label per line, `#` starts a comment.
pub fn parse_banlist(text: &str) -> Vec<String> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase()).filter(|l| !l.is_empty()).collect()
}

/// The banlist shipped in `config/banlist.txt`.
pub fn default_banlist() -> Vec<String> {
    parse_banlist(DEFAULT_BANLIST)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Imported,
    Synthetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
}

/// Everything the engine is built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusBundle {
    pub artists: Vec<Artist>,
    pub tags: Vec<Tag>,
    pub affinities: Vec<AffinityRecord>,
    pub events: Vec<Event>,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

impl CorpusBundle {
    /// Validates and finalizes an imported corpus.
    pub fn new(
        artists: Vec<Artist>,
        tags: Vec<Tag>,
        affinities: Vec<AffinityRecord>,
        events: Vec<Event>,
    ) -> Result<Self> {
        let mut bundle = Self { artists, tags, affinities, events, provenance: Provenance::Imported, seed: None };
        bundle.finalize()?;
        Ok(bundle)
    }

    /// Checks referential integrity, id uniqueness and weight bounds.
    pub fn validate(&self) -> Result<()> {
        let mut artist_ids = HashSet::new();
        for a in &self.artists {
            if !artist_ids.insert(&a.id) {
                return Err(Error::InvalidConfig(format!("duplicate artist id `{}`", a.id)));
            }
        }
        let mut tag_ids = HashSet::new();
        for t in &self.tags {
            if !tag_ids.insert(&t.id) {
                return Err(Error::InvalidConfig(format!("duplicate tag id `{}`", t.id)));
            }
        }
        for r in &self.affinities {
            if !r.weight.is_finite() || !(0.0..=1.0).contains(&r.weight) {
                return Err(Error::InvalidWeight {
                    artist: r.artist_id.to_string(),
                    feature: r.feature.to_string(),
                    weight: r.weight,
                });
            }
            if !artist_ids.contains(&r.artist_id) {
                return Err(Error::unknown("artist", &r.artist_id));
            }
            match &r.feature {
                FeatureId::Artist(a) if !artist_ids.contains(a) => return Err(Error::unknown("artist", a)),
                FeatureId::Tag(t) if !tag_ids.contains(t) => return Err(Error::unknown("tag", t)),
                _ => {}
            }
        }
        let mut event_ids = HashSet::new();
        for e in &self.events {
            if !event_ids.insert(&e.id) {
                return Err(Error::InvalidConfig(format!("duplicate event id `{}`", e.id)));
            }
            if let Some(a) = e.artist_ids.iter().find(|a| !artist_ids.contains(a)) {
                return Err(Error::unknown("artist", a));
            }
        }
        Ok(())
    }

    /// Validates, then derives the fields that follow from the records:
    /// self-affinities of 1.0, event-artist flags and tag artist counts.
    /// Idempotent.
    pub fn finalize(&mut self) -> Result<()> {
        self.validate()?;
        let mut has_self: HashSet<ArtistId> = HashSet::new();
        for r in &mut self.affinities {
            if r.feature.as_artist() == Some(&r.artist_id) {
                r.weight = 1.0;
                has_self.insert(r.artist_id.clone());
            }
        }
        for a in &self.artists {
            if !has_self.contains(&a.id) {
                self.affinities.push(AffinityRecord::new(a.id.clone(), FeatureId::Artist(a.id.clone()), 1.0));
            }
        }

        let performing: HashSet<&ArtistId> = self.events.iter().flat_map(|e| &e.artist_ids).collect();
        for a in &mut self.artists {
            a.is_event_artist = performing.contains(&a.id);
        }

        let counts = vocabulary::tag_support(&self.affinities);
        for t in &mut self.tags {
            t.artist_count = counts.get(&t.id).copied().unwrap_or(0) as u64;
        }
        Ok(())
    }

    /// Drops tags outside `vocabulary` together with their affinities.
    pub fn retain_tags(&mut self, vocabulary: &[Tag]) {
        let keep: HashSet<&TagId> = vocabulary.iter().map(|t| &t.id).collect();
        self.tags.retain(|t| keep.contains(&t.id));
        self.affinities.retain(|r| r.feature.as_tag().is_none_or(|t| keep.contains(t)));
    }

    pub fn artist(&self, id: &ArtistId) -> Option<&Artist> {
        self.artists.iter().find(|a| &a.id == id)
    }

    pub fn tag(&self, id: &TagId) -> Option<&Tag> {
        self.tags.iter().find(|t| &t.id == id)
    }

    pub fn event(&self, id: &EventId) -> Option<&Event> {
        self.events.iter().find(|e| &e.id == id)
    }

    /// Artists with at least one event, in id order.
    pub fn event_artist_ids(&self) -> Vec<ArtistId> {
        let mut ids: Vec<ArtistId> = self.artists.iter().filter(|a| a.is_event_artist).map(|a| a.id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn raw_matrix(&self) -> Result<RawDataMatrix> {
        build_raw_matrix(&self.artists, &self.tags, &self.affinities)
    }

    /// Writes the corpus into `dir`, creating it if needed.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
        let manifest =
            Manifest { format: "corpus".into(), version: CORPUS_VERSION, provenance: self.provenance, seed: self.seed };
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .map_err(|source| Error::Io { path, source })?;
        write_ndjson(&dir.join(ARTISTS_FILE), "artists", &self.artists)?;
        write_ndjson(&dir.join(TAGS_FILE), "tags", &self.tags)?;
        write_ndjson(&dir.join(AFFINITIES_FILE), "affinities", &self.affinities)?;
        write_ndjson(&dir.join(EVENTS_FILE), "events", &self.events)?;
        Ok(())
    }

    /// The NDJSON text of each file, keyed by file name. Two bundles with
    /// equal snapshots are byte-identical on disk.
    pub fn snapshot(&self) -> Result<BTreeMap<&'static str, String>> {
        let mut out = BTreeMap::new();
        out.insert(ARTISTS_FILE, ndjson_string("artists", &self.artists)?);
        out.insert(TAGS_FILE, ndjson_string("tags", &self.tags)?);
        out.insert(AFFINITIES_FILE, ndjson_string("affinities", &self.affinities)?);
        out.insert(EVENTS_FILE, ndjson_string("events", &self.events)?);
        Ok(out)
    }
}

/// Input files for [`load_corpus`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CorpusPaths {
    pub manifest: Option<PathBuf>,
    pub artists: PathBuf,
    pub tags: PathBuf,
    pub affinities: PathBuf,
    /// One file per event source; may be empty.
    pub events: Vec<PathBuf>,
}

impl CorpusPaths {
    /// The standard layout inside `dir`; every `events*.ndjson` file is an
    /// event source, in file-name order.
    pub fn in_dir(dir: &Path) -> Result<Self> {
        let entries = fs::read_dir(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
        let mut events = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.starts_with("events") && name.ends_with(".ndjson") {
                events.push(entry.path());
            }
        }
        events.sort();
        let manifest = dir.join(MANIFEST_FILE);
        Ok(Self {
            manifest: manifest.exists().then_some(manifest),
            artists: dir.join(ARTISTS_FILE),
            tags: dir.join(TAGS_FILE),
            affinities: dir.join(AFFINITIES_FILE),
            events,
        })
    }
}

/// Loads and validates a corpus. Events sharing (title, venue, start time)
/// are merged; when they come from different files the merged event has
/// source `both`.
pub fn load_corpus(paths: &CorpusPaths) -> Result<CorpusBundle> {
    let (provenance, seed) = match &paths.manifest {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            let m: Manifest = serde_json::from_str(&text).map_err(|e| Error::MalformedInput {
                path: path.clone(),
                line: e.line(),
                message: e.to_string(),
            })?;
            if m.version != CORPUS_VERSION {
                return Err(Error::MalformedInput {
                    path: path.clone(),
                    line: 1,
                    message: format!("unsupported version {}", m.version),
                });
            }
            (m.provenance, m.seed)
        }
        None => (Provenance::Imported, None),
    };

    let artists: Vec<Artist> = read_ndjson(&paths.artists, "artists")?;
    let tags: Vec<Tag> = read_ndjson(&paths.tags, "tags")?;
    let affinities: Vec<AffinityRecord> = read_ndjson(&paths.affinities, "affinities")?;
    let mut sources = Vec::with_capacity(paths.events.len());
    for path in &paths.events {
        sources.push(read_ndjson::<Event>(path, "events")?);
    }
    let events = merge_event_sources(sources);

    let mut bundle = CorpusBundle { artists, tags, affinities, events, provenance, seed };
    bundle.finalize()?;
    Ok(bundle)
}

/// Loads the standard layout inside `dir`.
pub fn load_corpus_dir(dir: &Path) -> Result<CorpusBundle> {
    load_corpus(&CorpusPaths::in_dir(dir)?)
}

/// Merges event lists, one per source, keyed by (title, venue, start time).
/// The first occurrence keeps its id and position; artists are unioned in
/// order of appearance.
pub fn merge_event_sources(sources: Vec<Vec<Event>>) -> Vec<Event> {
    let mut merged: Vec<Event> = Vec::new();
    let mut by_key: HashMap<(String, String, DateTime<Utc>), (usize, usize)> = HashMap::new();
    for (source_index, events) in sources.into_iter().enumerate() {
        for e in events {
            let key = (e.title.clone(), e.venue.clone(), e.start_time);
            match by_key.get(&key) {
                Some(&(pos, first_source)) => {
                    let target = &mut merged[pos];
                    if first_source != source_index || target.source != e.source {
                        target.source = EventSource::Both;
                    }
                    for a in e.artist_ids {
                        if !target.artist_ids.contains(&a) {
                            target.artist_ids.push(a);
                        }
                    }
                }
                None => {
                    by_key.insert(key, (merged.len(), source_index));
                    merged.push(e);
                }
            }
        }
    }
    merged
}

fn ndjson_string<T: Serialize>(format: &str, records: &[T]) -> Result<String> {
    let mut out = serde_json::to_string(&Header { format: format.into(), version: CORPUS_VERSION })?;
    out.push('\n');
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

fn write_ndjson<T: Serialize>(path: &Path, format: &str, records: &[T]) -> Result<()> {
    let io = |source| Error::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(fs::File::create(path).map_err(io)?);
    serde_json::to_writer(&mut w, &Header { format: format.into(), version: CORPUS_VERSION })?;
    w.write_all(b"\n").map_err(io)?;
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n").map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Reads one NDJSON file. An empty file holds zero records; otherwise the
/// first non-blank line must be a header naming `format`.
fn read_ndjson<T: DeserializeOwned>(path: &Path, format: &str) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    let malformed = |line: usize, message: String| Error::MalformedInput { path: path.to_path_buf(), line, message };
    let mut records = Vec::new();
    let mut header_seen = false;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            let h: Header = serde_json::from_str(&line).map_err(|e| malformed(line_no, format!("bad header: {e}")))?;
            if h.format != format {
                return Err(malformed(line_no, format!("expected format `{format}`, found `{}`", h.format)));
            }
            if h.version != CORPUS_VERSION {
                return Err(malformed(line_no, format!("unsupported version {}", h.version)));
            }
            header_seen = true;
            continue;
        }
        records.push(serde_json::from_str(&line).map_err(|e| malformed(line_no, e.to_string()))?);
    }
    Ok(records)
}
