//! Local music event recommendation: an LSA artist space, the Music Event
//! Graph built on top of it, preference fusion, corpus ingestion and the
//! evaluation harness.

pub mod artist_space;
pub mod error;
pub mod eval;
pub mod event_graph;
pub mod fusion;
pub mod ids;
pub mod ingest;
pub mod linalg;
pub mod stats;

pub use error::{Error, Result};
pub use ids::{ArtistId, EventId, FeatureId, FeatureKind, TagId};
