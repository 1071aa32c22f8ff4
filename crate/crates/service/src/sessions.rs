//! Onboarding sessions: an in-process map, optionally mirrored to a JSON
//! file after every change.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use showfinder::fusion::FusionConfig;
use showfinder::{ArtistId, TagId};
use uuid::Uuid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub session_id: Uuid,
    pub selected_genre_ids: Vec<TagId>,
    pub selected_popular_artist_ids: Vec<ArtistId>,
    pub fusion_config: FusionConfig,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: Mutex<BTreeMap<Uuid, SessionState>>,
    path: Option<PathBuf>,
}

impl SessionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Reads existing sessions from `path` when it exists.
    pub fn persistent(path: impl Into<PathBuf>) -> anyhow::Result<Self> {
        let path = path.into();
        let sessions = if path.exists() {
            let list: Vec<SessionState> = serde_json::from_str(&fs::read_to_string(&path)?)?;
            list.into_iter().map(|s| (s.session_id, s)).collect()
        } else {
            BTreeMap::new()
        };
        Ok(Self { sessions: Mutex::new(sessions), path: Some(path) })
    }

    pub fn get(&self, id: &Uuid) -> Option<SessionState> {
        self.sessions.lock().unwrap().get(id).cloned()
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&self, state: SessionState) -> anyhow::Result<()> {
        let mut sessions = self.sessions.lock().unwrap();
        sessions.insert(state.session_id, state);
        self.persist(&sessions)
    }

    /// Applies `f` to a stored session. Returns the updated state, or
    /// `None` when there is no such session.
    pub fn update(&self, id: &Uuid, f: impl FnOnce(&mut SessionState)) -> anyhow::Result<Option<SessionState>> {
        let mut sessions = self.sessions.lock().unwrap();
        let Some(state) = sessions.get_mut(id) else { return Ok(None) };
        f(state);
        let updated = state.clone();
        self.persist(&sessions)?;
        Ok(Some(updated))
    }

    fn persist(&self, sessions: &BTreeMap<Uuid, SessionState>) -> anyhow::Result<()> {
        let Some(path) = &self.path else { return Ok(()) };
        let list: Vec<&SessionState> = sessions.values().collect();
        write_atomic(path, &serde_json::to_string_pretty(&list)?)
    }
}

fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
