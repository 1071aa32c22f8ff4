//! Structural checks on built graphs and their recommendations.

use std::collections::{HashMap, HashSet};

use showfinder::event_graph::{Level, MusicEventGraph, RankedEventList};
use showfinder::fusion::UserPreferences;

/// Level of every node id, checked to be unique across levels.
pub fn levels_of(graph: &MusicEventGraph) -> HashMap<String, Level> {
    let mut out = HashMap::new();
    let mut put = |id: String, level: Level| assert!(out.insert(id, level).is_none(), "node on two levels");
    graph.levels.genre_tags.iter().for_each(|n| put(format!("tag:{}", n.id), Level::GenreTag));
    graph.levels.popular_artists.iter().for_each(|n| put(n.id.to_string(), Level::PopularArtist));
    graph.levels.event_artists.iter().for_each(|n| put(n.id.to_string(), Level::EventArtist));
    graph.levels.events.iter().for_each(|n| put(format!("event:{}", n.event.id), Level::Event));
    out
}

pub fn check_four_partite(graph: &MusicEventGraph) {
    let levels = levels_of(graph);
    let level = |key: String| *levels.get(&key).unwrap_or_else(|| panic!("dangling endpoint {key}"));
    for e in &graph.edges.tag_popular {
        assert_eq!(
            (level(format!("tag:{}", e.from)), level(e.to.to_string())),
            (Level::GenreTag, Level::PopularArtist)
        );
        assert!(e.weight > 0.0 && e.weight <= 1.0);
    }
    for e in &graph.edges.popular_event_artist {
        assert_eq!((level(e.from.to_string()), level(e.to.to_string())), (Level::PopularArtist, Level::EventArtist));
        assert!(e.weight > 0.0 && e.weight <= 1.0);
    }
    for e in &graph.edges.event_artist_event {
        assert_eq!((level(e.from.to_string()), level(format!("event:{}", e.to))), (Level::EventArtist, Level::Event));
        assert_eq!(e.weight, 1.0);
    }
    for n in &graph.levels.events {
        assert!(!n.event.artist_ids.is_empty());
        for a in &n.event.artist_ids {
            assert!(graph.edges.event_artist_event.iter().any(|e| &e.from == a && e.to == n.event.id));
        }
    }
}

/// Each path must be a walk over existing edges, with the edge weights it
/// reports, ending at its event.
pub fn check_paths(graph: &MusicEventGraph, out: &RankedEventList, prefs: &UserPreferences) {
    let tag_pop: HashMap<(&str, &str), f64> =
        graph.edges.tag_popular.iter().map(|e| ((e.from.as_str(), e.to.as_str()), e.weight)).collect();
    let pop_ea: HashMap<(&str, &str), f64> =
        graph.edges.popular_event_artist.iter().map(|e| ((e.from.as_str(), e.to.as_str()), e.weight)).collect();
    let ea_ev: HashSet<(&str, &str)> =
        graph.edges.event_artist_event.iter().map(|e| (e.from.as_str(), e.to.as_str())).collect();
    for ev in &out.events {
        for path in &ev.paths {
            let n = &path.nodes;
            let w = &path.weights;
            assert_eq!(n.len(), w.len() + 1);
            assert_eq!(n.last().unwrap().id, ev.event_id.as_str());
            let kinds: Vec<Level> = n.iter().map(|x| x.level).collect();
            let offset = match kinds.as_slice() {
                [Level::GenreTag, Level::PopularArtist, Level::EventArtist, Level::Event] => 1,
                [Level::PopularArtist, Level::EventArtist, Level::Event] => 0,
                other => panic!("bad path shape {other:?}"),
            };
            if offset == 1 {
                assert_eq!(tag_pop[&(n[0].id.as_str(), n[1].id.as_str())], w[0]);
                assert!(prefs.genre_tag_ids.iter().any(|g| g.as_str() == n[0].id));
            } else {
                assert!(prefs.popular_artist_ids.iter().any(|p| p.as_str() == n[0].id));
            }
            assert_eq!(pop_ea[&(n[offset].id.as_str(), n[offset + 1].id.as_str())], w[offset]);
            assert!(ea_ev.contains(&(n[offset + 1].id.as_str(), n[offset + 2].id.as_str())));
            assert_eq!(w[offset + 1], 1.0);
            assert_eq!(path.product_weight, w.iter().product::<f64>());
        }
    }
}
