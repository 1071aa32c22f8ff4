//! Opaque string identifiers.

use std::fmt;

use serde::{Deserialize, Serialize};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(ArtistId);
string_id!(TagId);
string_id!(EventId);

/// A column of the raw data matrix: either an artist (similarity) or a tag
/// (affinity). Artists order before tags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum FeatureId {
    Artist(ArtistId),
    Tag(TagId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Artist,
    Tag,
}

impl FeatureId {
    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureId::Artist(_) => FeatureKind::Artist,
            FeatureId::Tag(_) => FeatureKind::Tag,
        }
    }

    pub fn as_artist(&self) -> Option<&ArtistId> {
        match self {
            FeatureId::Artist(a) => Some(a),
            FeatureId::Tag(_) => None,
        }
    }

    pub fn as_tag(&self) -> Option<&TagId> {
        match self {
            FeatureId::Tag(t) => Some(t),
            FeatureId::Artist(_) => None,
        }
    }
}

impl From<ArtistId> for FeatureId {
    fn from(a: ArtistId) -> Self {
        FeatureId::Artist(a)
    }
}

impl From<TagId> for FeatureId {
    fn from(t: TagId) -> Self {
        FeatureId::Tag(t)
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureId::Artist(a) => write!(f, "artist:{a}"),
            FeatureId::Tag(t) => write!(f, "tag:{t}"),
        }
    }
}
