//! Seeded synthetic corpora with a long-tail popularity curve.
//!
//! Every artist gets a position in a latent taste space made of a genre
//! offset, a scene offset and an individual offset. Artist-similarity links
//! go to nearby artists and tag affinities to nearby tags, both sampled with
//! Gumbel noise. Footprint sizes are lognormal and mixed with popularity
//! rank until their correlation hits the configured target.

use std::collections::HashSet;

use chrono::{Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel, StandardNormal};
use serde::{Deserialize, Serialize};

use super::vocabulary::{build_tag_vocabulary, DEFAULT_MIN_SUPPORT};
use super::{default_banlist, CorpusBundle, Provenance};
use crate::artist_space::{AffinityRecord, Artist, Tag};
use crate::error::{Error, Result};
use crate::event_graph::{Event, EventSource};
use crate::ids::{ArtistId, FeatureId, TagId};
use crate::stats::pearson;

const GENRE_WEIGHT: f64 = 1.0;
const SCENE_WEIGHT: f64 = 0.7;
const INDIVIDUAL_WEIGHT: f64 = 1.0;
const ARTIST_TEMPERATURE: f64 = 0.1;
const TAG_TEMPERATURE: f64 = 0.3;
const NOISE_TAG_SCORE: f64 = -3.0;
const ARTIST_SHARE: f64 = 0.68;
const FOOTPRINT_SPREAD: f64 = 0.9;
const LISTENER_SCALE: f64 = 5e6;
const LISTENER_NOISE: f64 = 0.3;
const SUPPORT_ACT_PROBABILITY: f64 = 0.3;
const CORRELATION_SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_artists: usize,
    pub n_event_artists: usize,
    /// Tags before the support filter: genre, scene, descriptor and
    /// non-genre labels together.
    pub n_tags: usize,
    pub n_events: usize,
    pub power_law_exponent: f64,
    pub footprint_popularity_correlation_target: f64,
    pub n_genres: usize,
    pub scenes_per_genre: usize,
    pub latent_dim: usize,
    pub median_footprint: f64,
    pub max_footprint: usize,
    /// Fraction of event artists drawn from the three least popular deciles.
    pub event_artist_tail_share: f64,
    pub min_tag_support: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_artists: 2000,
            n_event_artists: 150,
            n_tags: 130,
            n_events: 120,
            power_law_exponent: 1.0,
            footprint_popularity_correlation_target: -0.56,
            n_genres: 10,
            scenes_per_genre: 5,
            latent_dim: 100,
            median_footprint: 60.0,
            max_footprint: 400,
            event_artist_tail_share: 0.68,
            min_tag_support: DEFAULT_MIN_SUPPORT,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn n_structured_tags(&self) -> usize {
        self.n_genres * (1 + self.scenes_per_genre)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let r = self.footprint_popularity_correlation_target;
        if !(r > -1.0 && r < 0.0) {
            return bad(format!("footprint/popularity correlation target {r} outside (-1, 0)"));
        }
        if self.n_artists < 2 || self.n_genres == 0 || self.scenes_per_genre == 0 || self.latent_dim == 0 {
            return bad("artist, genre, scene and latent dimension counts must be positive".into());
        }
        if self.n_event_artists == 0 || self.n_event_artists > self.n_artists {
            return bad(format!("n_event_artists {} outside 1..={}", self.n_event_artists, self.n_artists));
        }
        if self.n_events == 0 {
            return bad("n_events must be positive".into());
        }
        let fixed = self.n_structured_tags() + default_banlist().len();
        if self.n_tags < fixed {
            return bad(format!("n_tags {} below the {fixed} genre, scene and non-genre tags", self.n_tags));
        }
        if !self.power_law_exponent.is_finite() || self.power_law_exponent <= 0.0 {
            return bad("power_law_exponent must be positive".into());
        }
        if self.median_footprint.is_nan() || self.median_footprint < 1.0 || self.max_footprint < 2 {
            return bad("footprint bounds must allow at least two features".into());
        }
        if !(0.0..=1.0).contains(&self.event_artist_tail_share) {
            return bad("event_artist_tail_share outside [0, 1]".into());
        }
        Ok(())
    }
}

const GENRE_NAMES: [&str; 20] = [
    "rock",
    "jazz",
    "electronic",
    "hip hop",
    "folk",
    "metal",
    "punk",
    "soul",
    "country",
    "classical",
    "reggae",
    "blues",
    "pop",
    "ambient",
    "funk",
    "techno",
    "house",
    "gospel",
    "latin",
    "grunge",
];
const SCENE_PREFIXES: [&str; 10] =
    ["indie", "post", "dark", "lo-fi", "experimental", "melodic", "progressive", "neo", "avant", "dream"];
const DESCRIPTOR_A: [&str; 12] =
    ["warm", "cold", "slow", "fast", "bright", "raw", "lush", "sparse", "noisy", "quiet", "heavy", "soft"];
const DESCRIPTOR_B: [&str; 5] = ["guitars", "vocals", "synths", "drums", "bass"];
const NAME_A: [&str; 40] = [
    "Velvet", "Paper", "Silver", "Hollow", "Electric", "Quiet", "Golden", "Broken", "Crystal", "Neon", "Wild",
    "Lonely", "Northern", "Static", "Violet", "Iron", "Glass", "Midnight", "Copper", "Scarlet", "Distant", "Young",
    "Frozen", "Secret", "Wooden", "Burning", "Pale", "Little", "Modern", "Ancient", "Savage", "Gentle", "Atomic",
    "Coastal", "Rusty", "Sacred", "Lucky", "Cosmic", "Lunar", "Marble",
];
const NAME_B: [&str; 50] = [
    "Harbor",
    "Wolves",
    "Engines",
    "Gardens",
    "Tigers",
    "Satellites",
    "Rivers",
    "Lanterns",
    "Sparrows",
    "Machines",
    "Orchard",
    "Saints",
    "Ghosts",
    "Horses",
    "Pilots",
    "Mirrors",
    "Foxes",
    "Comets",
    "Cathedral",
    "Tides",
    "Arrows",
    "Owls",
    "Canyons",
    "Radios",
    "Bells",
    "Drifters",
    "Kings",
    "Echoes",
    "Strangers",
    "Fever",
    "Waves",
    "Shadows",
    "Monarchs",
    "Signals",
    "Thieves",
    "Ravens",
    "Valley",
    "Parade",
    "Circuit",
    "Embers",
    "Islands",
    "Dancers",
    "Choir",
    "Hearts",
    "Rockets",
    "Forest",
    "Season",
    "Motel",
    "Colony",
    "Summit",
];
const VENUES: [&str; 12] = [
    "The Rivet Room",
    "Union Hall",
    "Canal Street Ballroom",
    "The Lantern",
    "Old Mill Stage",
    "Pier 9",
    "Basement East",
    "The Granary",
    "Northside Theatre",
    "Saint Agnes Hall",
    "The Foundry",
    "Arcade Club",
];

/// Generates a finalized synthetic corpus. Identical configs give identical
/// bundles.
pub fn generate_synthetic_corpus(config: &GeneratorConfig) -> Result<CorpusBundle> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n_artists;
    let dim = config.latent_dim;

    // Popularity: a noisy power law, dealt out to artists in random order.
    let mut listeners: Vec<u64> = (1..=n)
        .map(|r| {
            let z: f64 = rng.sample(StandardNormal);
            let l = LISTENER_SCALE * (r as f64).powf(-config.power_law_exponent) * (LISTENER_NOISE * z).exp();
            l.floor() as u64 + 1
        })
        .collect();
    listeners.sort_unstable_by(|a, b| b.cmp(a));
    let mut rank_of: Vec<usize> = (0..n).collect();
    rank_of.shuffle(&mut rng);

    // Latent positions.
    let n_scenes = config.n_genres * config.scenes_per_genre;
    let scale = 1.0 / (dim as f64).sqrt();
    let normal_rows = |rows: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
        (0..rows).map(|_| (0..dim).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()).collect()
    };
    let genre_centers = normal_rows(config.n_genres, &mut rng);
    let scene_centers = normal_rows(n_scenes, &mut rng);
    let scene_of: Vec<usize> = (0..n).map(|_| rng.random_range(0..n_scenes)).collect();
    let individual = normal_rows(n, &mut rng);
    let positions: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let s = scene_of[i];
            let g = s / config.scenes_per_genre;
            (0..dim)
                .map(|d| {
                    GENRE_WEIGHT * genre_centers[g][d]
                        + SCENE_WEIGHT * scene_centers[s][d]
                        + INDIVIDUAL_WEIGHT * individual[i][d]
                })
                .collect()
        })
        .collect();

    // Tag positions: genre centres, scene centres, then descriptors placed on
    // random artists. Non-genre labels have no position.
    let banlist = default_banlist();
    let n_descriptors = config.n_tags - config.n_structured_tags() - banlist.len();
    let mut tag_positions: Vec<Vec<f64>> =
        genre_centers.iter().map(|c| c.iter().map(|x| GENRE_WEIGHT * x).collect()).collect();
    for (s, scene) in scene_centers.iter().enumerate().take(n_scenes) {
        let genre = &genre_centers[s / config.scenes_per_genre];
        tag_positions.push((0..dim).map(|d| GENRE_WEIGHT * genre[d] + SCENE_WEIGHT * scene[d]).collect());
    }
    for &i in rand::seq::index::sample(&mut rng, n, n_descriptors.min(n)).into_vec().iter() {
        tag_positions.push(positions[i].clone());
    }
    let n_placed_tags = tag_positions.len();
    let n_tags = n_placed_tags + banlist.len();

    // Footprint sizes.
    let footprint_cap = config.max_footprint.min(n + n_tags);
    let spread: Vec<(f64, f64)> = rank_of
        .iter()
        .map(|&r| {
            let u = (3.0f64).sqrt() * (1.0 - 2.0 * (r as f64 + 0.5) / n as f64);
            (u, rng.sample::<f64, _>(StandardNormal))
        })
        .collect();
    let ranks: Vec<f64> = rank_of.iter().map(|&r| (r + 1) as f64).collect();
    let footprints_for = |rho: f64| -> Vec<usize> {
        spread
            .iter()
            .map(|(u, e)| {
                let log_f = config.median_footprint.ln() + FOOTPRINT_SPREAD * (rho * u + (1.0 - rho * rho).sqrt() * e);
                (log_f.exp().round() as usize).clamp(2, footprint_cap)
            })
            .collect()
    };
    let correlation = |f: &[usize]| pearson(&f.iter().map(|&x| x as f64).collect::<Vec<_>>(), &ranks);
    let target = config.footprint_popularity_correlation_target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if correlation(&footprints_for(mid)) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let footprints = footprints_for(0.5 * (lo + hi));
    let achieved = correlation(&footprints);
    if !achieved.is_finite() || (achieved - target).abs() > CORRELATION_SLACK {
        return Err(Error::InvalidConfig(format!(
            "footprint/popularity correlation {target} unreachable (closest {achieved:.3})"
        )));
    }

    // Ids, names and labels.
    let artist_ids: Vec<ArtistId> = (0..n).map(|i| ArtistId::new(format!("a{:04}", i + 1))).collect();
    let tag_ids: Vec<TagId> = (0..n_tags).map(|t| TagId::new(format!("t{:04}", t + 1))).collect();
    let tag_labels = tag_labels(config, n_descriptors, &banlist);
    let names = artist_names(n, &mut rng);

    // Affinities.
    let gumbel = Gumbel::new(0.0, 1.0).expect("unit Gumbel");
    let sq_norms: Vec<f64> = positions.iter().map(|p| p.iter().map(|x| x * x).sum()).collect();
    let mut affinities = Vec::new();
    for i in 0..n {
        affinities.push(AffinityRecord::new(artist_ids[i].clone(), FeatureId::Artist(artist_ids[i].clone()), 1.0));
        let k = footprints[i] - 1;
        let mut m = (ARTIST_SHARE * k as f64).round() as usize;
        let mut t = k - m;
        if t > n_tags {
            m += t - n_tags;
            t = n_tags;
        }
        m = m.min(n - 1);

        let mut artist_scores: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let dot: f64 = positions[i].iter().zip(&positions[j]).map(|(a, b)| a * b).sum();
                let d2 = sq_norms[i] + sq_norms[j] - 2.0 * dot;
                (-d2 / ARTIST_TEMPERATURE + gumbel.sample(&mut rng), j)
            })
            .collect();
        for j in top_indices(&mut artist_scores, m) {
            let w = rng.random_range(0.3..=1.0);
            affinities.push(AffinityRecord::new(artist_ids[i].clone(), FeatureId::Artist(artist_ids[j].clone()), w));
        }

        let mut tag_scores: Vec<(f64, usize)> = (0..n_tags)
            .map(|t| {
                let base = match tag_positions.get(t) {
                    Some(tp) => {
                        -tp.iter().zip(&positions[i]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / TAG_TEMPERATURE
                    }
                    None => NOISE_TAG_SCORE,
                };
                (base + gumbel.sample(&mut rng), t)
            })
            .collect();
        for t in top_indices(&mut tag_scores, t) {
            let w = rng.random_range(0.5..=1.0);
            affinities.push(AffinityRecord::new(artist_ids[i].clone(), FeatureId::Tag(tag_ids[t].clone()), w));
        }
    }

    let artists: Vec<Artist> = (0..n)
        .map(|i| {
            let s = scene_of[i];
            let g = s / config.scenes_per_genre;
            Artist {
                id: artist_ids[i].clone(),
                name: names[i].clone(),
                listener_count: listeners[rank_of[i]],
                biography: format!(
                    "{} plays {} out of the {} scene.",
                    names[i],
                    tag_labels[config.n_genres + s],
                    tag_labels[g]
                ),
                is_event_artist: false,
            }
        })
        .collect();
    let raw_tags: Vec<Tag> = (0..n_tags)
        .map(|t| Tag { id: tag_ids[t].clone(), label: tag_labels[t].clone(), artist_count: 0, is_genre: false })
        .collect();

    // Event artists: a fixed share from the bottom three popularity deciles.
    let tail_start = n - (3 * n).div_ceil(10);
    let (tail, head): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| rank_of[i] >= tail_start);
    let from_tail = ((config.event_artist_tail_share * config.n_event_artists as f64).round() as usize).min(tail.len());
    let from_head = (config.n_event_artists - from_tail).min(head.len());
    let from_tail = config.n_event_artists - from_head;
    let mut performers: Vec<usize> = tail.choose_multiple(&mut rng, from_tail).copied().collect();
    performers.extend(head.choose_multiple(&mut rng, from_head).copied());
    performers.sort_unstable();
    performers.shuffle(&mut rng);

    let events = schedule_events(config, &performers, &artist_ids, &names, &mut rng);

    let mut bundle = CorpusBundle {
        artists,
        tags: raw_tags,
        affinities,
        events,
        provenance: Provenance::Synthetic,
        seed: Some(config.seed),
    };
    let vocabulary = build_tag_vocabulary(&bundle.tags, &bundle.affinities, config.min_tag_support);
    bundle.retain_tags(&vocabulary);
    bundle.finalize()?;
    Ok(bundle)
}

/// Indices of the `m` highest scores, in index order.
fn top_indices(scores: &mut [(f64, usize)], m: usize) -> Vec<usize> {
    if m == 0 {
        return Vec::new();
    }
    let m = m.min(scores.len());
    scores.select_nth_unstable_by(m - 1, |a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked: Vec<usize> = scores[..m].iter().map(|s| s.1).collect();
    picked.sort_unstable();
    picked
}

fn tag_labels(config: &GeneratorConfig, n_descriptors: usize, banlist: &[String]) -> Vec<String> {
    let genre = |g: usize| GENRE_NAMES.get(g).map_or_else(|| format!("genre {}", g + 1), |s| s.to_string());
    let mut labels: Vec<String> = (0..config.n_genres).map(genre).collect();
    for g in 0..config.n_genres {
        for s in 0..config.scenes_per_genre {
            labels.push(match SCENE_PREFIXES.get(s) {
                Some(p) => format!("{p} {}", genre(g)),
                None => format!("{} {}", genre(g), s + 1),
            });
        }
    }
    let combos = DESCRIPTOR_A.len() * DESCRIPTOR_B.len();
    for d in 0..n_descriptors {
        let base = format!(
            "{} {}",
            DESCRIPTOR_A[d % DESCRIPTOR_A.len()],
            DESCRIPTOR_B[(d / DESCRIPTOR_A.len()) % DESCRIPTOR_B.len()]
        );
        labels.push(if d < combos { base } else { format!("{base} {}", d / combos + 1) });
    }
    labels.extend(banlist.iter().cloned());
    labels
}

fn artist_names(n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
    let mut seen = HashSet::new();
    (0..n)
        .map(|_| {
            let base = format!("{} {}", NAME_A.choose(rng).expect("nonempty"), NAME_B.choose(rng).expect("nonempty"));
            let mut name = base.clone();
            let mut k = 2;
            while !seen.insert(name.clone()) {
                name = format!("{base} {k}");
                k += 1;
            }
            name
        })
        .collect()
}

/// Every performer gets at least one event and every event at least one
/// performer. (title, venue, start time) is unique per event.
fn schedule_events(
    config: &GeneratorConfig,
    performers: &[usize],
    artist_ids: &[ArtistId],
    names: &[String],
    rng: &mut ChaCha8Rng,
) -> Vec<Event> {
    let base = Utc.with_ymd_and_hms(2026, 11, 6, 0, 0, 0).single().expect("valid date");
    let n_events = config.n_events;
    let mut lineups: Vec<Vec<usize>> = (0..n_events)
        .map(|e| vec![if e < performers.len() { performers[e] } else { *performers.choose(rng).expect("nonempty") }])
        .collect();
    for &p in performers.iter().skip(n_events) {
        lineups[rng.random_range(0..n_events)].push(p);
    }
    for lineup in &mut lineups {
        if performers.len() > lineup.len() && rng.random_bool(SUPPORT_ACT_PROBABILITY) {
            let extra = *performers.choose(rng).expect("nonempty");
            if !lineup.contains(&extra) {
                lineup.push(extra);
            }
        }
    }

    let mut keys = HashSet::new();
    lineups
        .into_iter()
        .enumerate()
        .map(|(e, lineup)| {
            let title = match lineup.len() {
                1 => names[lineup[0]].clone(),
                _ => format!(
                    "{} with {}",
                    names[lineup[0]],
                    lineup[1..].iter().map(|&a| names[a].as_str()).collect::<Vec<_>>().join(", ")
                ),
            };
            let (venue, start_time) = loop {
                let venue = VENUES.choose(rng).expect("nonempty").to_string();
                let start = base
                    + Duration::days(rng.random_range(0..56))
                    + Duration::hours(rng.random_range(19..=21))
                    + Duration::minutes(30 * rng.random_range(0..2));
                if keys.insert((title.clone(), venue.clone(), start)) {
                    break (venue, start);
                }
            };
            Event {
                id: format!("e{:04}", e + 1).into(),
                title,
                venue,
                start_time,
                source: EventSource::Synthetic,
                artist_ids: lineup.iter().map(|&a| artist_ids[a].clone()).collect(),
            }
        })
        .collect()
}
