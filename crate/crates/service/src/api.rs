//! The `/v1` JSON API, `/healthz` and the optional static route.

use std::collections::HashSet;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::json;
use showfinder::eval::PreferenceSource;
use showfinder::event_graph::{recommend, EventSource, Level, RankedEvent, Ranker};
use showfinder::fusion::{FusionConfig, UserPreferences};
use showfinder::linalg::cosine;
use showfinder::{ArtistId, EventId, TagId};
use tower_http::services::ServeDir;
use uuid::Uuid;

use crate::engine::{Engine, EngineConfig};
use crate::sessions::{SessionState, SessionStore};

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub max_genres: usize,
    pub max_artists_per_genre: usize,
    /// Popular artists shown per genre panel.
    pub panel_size: usize,
    pub fusion: FusionConfig,
    pub seed: u64,
    pub static_dir: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            max_genres: 3,
            max_artists_per_genre: 3,
            panel_size: 16,
            fusion: FusionConfig::default(),
            seed: 0,
            static_dir: None,
        }
    }
}

struct Inner {
    engine: RwLock<Option<Arc<Engine>>>,
    sessions: SessionStore,
    settings: Settings,
    loader: Option<EngineConfig>,
    reload_lock: tokio::sync::Mutex<()>,
}

/// Shared handler state. The engine is swapped whole on reload; sessions
/// are the only other mutable state.
#[derive(Clone)]
pub struct AppState(Arc<Inner>);

impl AppState {
    /// State with no engine yet; requests needing one get 503 until
    /// [`set_engine`](Self::set_engine) or a reload.
    pub fn new(settings: Settings, sessions: SessionStore, loader: Option<EngineConfig>) -> Self {
        Self(Arc::new(Inner {
            engine: RwLock::new(None),
            sessions,
            settings,
            loader,
            reload_lock: tokio::sync::Mutex::new(()),
        }))
    }

    pub fn with_engine(engine: Engine, settings: Settings) -> Self {
        let state = Self::new(settings, SessionStore::in_memory(), None);
        state.set_engine(engine);
        state
    }

    pub fn set_engine(&self, engine: Engine) {
        *self.0.engine.write().unwrap() = Some(Arc::new(engine));
    }

    pub fn settings(&self) -> &Settings {
        &self.0.settings
    }

    pub fn sessions(&self) -> &SessionStore {
        &self.0.sessions
    }

    pub fn is_ready(&self) -> bool {
        self.0.engine.read().unwrap().is_some()
    }

    fn engine(&self) -> Result<Arc<Engine>, ApiError> {
        self.0
            .engine
            .read()
            .unwrap()
            .clone()
            .ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "not_ready", "the engine is still loading"))
    }

    /// Rebuilds the engine from the configured source and swaps it in. The
    /// old engine keeps serving if loading fails.
    pub async fn reload(&self) -> Result<Arc<Engine>, ApiError> {
        let Some(config) = self.0.loader.clone() else {
            return Err(ApiError::new(StatusCode::CONFLICT, "no_source", "no engine source is configured"));
        };
        let _guard = self.0.reload_lock.lock().await;
        let engine = tokio::task::spawn_blocking(move || Engine::load(&config))
            .await
            .map_err(|e| ApiError::internal(e.to_string()))?
            .map_err(|e| ApiError::internal(e.to_string()))?;
        let engine = Arc::new(engine);
        *self.0.engine.write().unwrap() = Some(engine.clone());
        Ok(engine)
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_request", message)
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

impl From<showfinder::Error> for ApiError {
    fn from(e: showfinder::Error) -> Self {
        use showfinder::Error as E;
        match e {
            E::UnknownEntity { .. } => Self::not_found(e.to_string()),
            E::EmptyPreferences | E::InvalidConfig(_) => Self::unprocessable(e.to_string()),
            _ => Self::internal(e.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::new(e.status(), "invalid_body", e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::new(e.status(), "invalid_query", e.body_text())
    }
}

impl From<anyhow::Error> for ApiError {
    fn from(e: anyhow::Error) -> Self {
        Self::internal(e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: AppState) -> Router {
    let api = Router::new()
        .route("/genres", get(genres))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/recommendations", post(recommendations))
        .route("/events/{id}", get(event_detail))
        .route("/admin/reload", post(reload));
    let mut app = Router::new().nest("/v1", api).route("/healthz", get(healthz));
    if let Some(dir) = &state.settings().static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.with_state(state)
}

async fn healthz(State(state): State<AppState>) -> Json<serde_json::Value> {
    let engine = if state.is_ready() { "ready" } else { "loading" };
    Json(json!({ "status": "ok", "engine": engine }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenreView {
    pub id: TagId,
    pub label: String,
    pub event_artist_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenresResponse {
    pub genres: Vec<GenreView>,
}

async fn genres(State(state): State<AppState>) -> ApiResult<Json<GenresResponse>> {
    let engine = state.engine()?;
    let genres = engine
        .graph
        .levels
        .genre_tags
        .iter()
        .map(|g| GenreView { id: g.id.clone(), label: g.label.clone(), event_artist_count: g.event_artist_count })
        .collect();
    Ok(Json(GenresResponse { genres }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSession {
    pub genre_ids: Vec<TagId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularArtistView {
    pub id: ArtistId,
    pub name: String,
    pub listener_count: u64,
    /// Latent similarity between the genre and the artist.
    pub affinity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenrePanel {
    pub genre_id: TagId,
    pub label: String,
    pub popular_artists: Vec<PopularArtistView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResponse {
    pub session_id: Uuid,
    pub selected_genre_ids: Vec<TagId>,
    pub selected_popular_artist_ids: Vec<ArtistId>,
    pub fusion_config: FusionConfig,
    pub created_at: DateTime<Utc>,
    pub panels: Vec<GenrePanel>,
}

fn check_unique<T: Eq + std::hash::Hash + std::fmt::Display>(ids: &[T], what: &str) -> ApiResult<()> {
    let mut seen = HashSet::new();
    match ids.iter().find(|id| !seen.insert(*id)) {
        Some(id) => Err(ApiError::unprocessable(format!("{what} `{id}` selected twice"))),
        None => Ok(()),
    }
}

fn panels(engine: &Engine, genre_ids: &[TagId], size: usize) -> Vec<GenrePanel> {
    genre_ids
        .iter()
        .filter_map(|id| engine.graph.genre(id))
        .map(|g| GenrePanel {
            genre_id: g.id.clone(),
            label: g.label.clone(),
            popular_artists: engine
                .graph
                .popular_for_genre(&g.id)
                .into_iter()
                .take(size)
                .map(|(p, w)| PopularArtistView {
                    id: p.id.clone(),
                    name: p.name.clone(),
                    listener_count: p.listener_count,
                    affinity: w,
                })
                .collect(),
        })
        .collect()
}

fn session_response(engine: &Engine, state: SessionState, panel_size: usize) -> SessionResponse {
    SessionResponse {
        panels: panels(engine, &state.selected_genre_ids, panel_size),
        session_id: state.session_id,
        selected_genre_ids: state.selected_genre_ids,
        selected_popular_artist_ids: state.selected_popular_artist_ids,
        fusion_config: state.fusion_config,
        created_at: state.created_at,
    }
}

fn parse_session_id(raw: &str) -> ApiResult<Uuid> {
    Uuid::parse_str(raw).map_err(|_| ApiError::not_found(format!("unknown session `{raw}`")))
}

fn lookup_session(state: &AppState, raw: &str) -> ApiResult<SessionState> {
    let id = parse_session_id(raw)?;
    state.sessions().get(&id).ok_or_else(|| ApiError::not_found(format!("unknown session `{raw}`")))
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionResponse>)> {
    let engine = state.engine()?;
    let Json(req) = body?;
    let settings = state.settings();
    if req.genre_ids.is_empty() || req.genre_ids.len() > settings.max_genres {
        return Err(ApiError::unprocessable(format!(
            "select between 1 and {} genres (got {})",
            settings.max_genres,
            req.genre_ids.len()
        )));
    }
    check_unique(&req.genre_ids, "genre")?;
    if let Some(g) = req.genre_ids.iter().find(|g| engine.graph.genre(g).is_none()) {
        return Err(ApiError::not_found(format!("unknown genre `{g}`")));
    }
    let session = SessionState {
        session_id: Uuid::new_v4(),
        selected_genre_ids: req.genre_ids,
        selected_popular_artist_ids: Vec::new(),
        fusion_config: settings.fusion,
        created_at: Utc::now(),
    };
    state.sessions().insert(session.clone())?;
    Ok((StatusCode::CREATED, Json(session_response(&engine, session, settings.panel_size))))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<SessionResponse>> {
    let engine = state.engine()?;
    let session = lookup_session(&state, &id)?;
    Ok(Json(session_response(&engine, session, state.settings().panel_size)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendRequest {
    pub popular_artist_ids: Vec<ArtistId>,
    #[serde(default)]
    pub fusion_config: Option<FusionConfig>,
    /// Which selections drive the ranking; artists only by default.
    #[serde(default)]
    pub preferences: Option<PreferenceSource>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendedEvent {
    #[serde(flatten)]
    pub event: RankedEvent,
    /// Each path rendered as a chain, in `paths` order.
    pub explanations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendResponse {
    pub session_id: Uuid,
    pub fusion_config: FusionConfig,
    pub preferences: PreferenceSource,
    pub events: Vec<RecommendedEvent>,
}

async fn recommendations(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<RecommendRequest>, JsonRejection>,
) -> ApiResult<Json<RecommendResponse>> {
    let engine = state.engine()?;
    let session = lookup_session(&state, &id)?;
    let Json(req) = body?;
    let settings = state.settings();

    let limit = settings.max_artists_per_genre * session.selected_genre_ids.len();
    if req.popular_artist_ids.is_empty() || req.popular_artist_ids.len() > limit {
        return Err(ApiError::unprocessable(format!(
            "select between 1 and {} popular artists ({} per genre)",
            limit, settings.max_artists_per_genre
        )));
    }
    check_unique(&req.popular_artist_ids, "artist")?;
    if let Some(a) = req.popular_artist_ids.iter().find(|a| engine.graph.popular_artist(a).is_none()) {
        return Err(ApiError::not_found(format!("unknown popular artist `{a}`")));
    }
    let offered: HashSet<ArtistId> = panels(&engine, &session.selected_genre_ids, settings.panel_size)
        .into_iter()
        .flat_map(|p| p.popular_artists.into_iter().map(|a| a.id))
        .collect();
    if let Some(a) = req.popular_artist_ids.iter().find(|a| !offered.contains(*a)) {
        return Err(ApiError::unprocessable(format!("artist `{a}` was not offered for the selected genres")));
    }

    let config = req.fusion_config.unwrap_or(session.fusion_config);
    let source = req.preferences.unwrap_or(PreferenceSource::Artists);
    let prefs =
        source.select(&UserPreferences::new(session.selected_genre_ids.clone(), req.popular_artist_ids.clone()));
    let ranked = recommend(&engine.graph, &prefs, &Ranker::Fusion { config, seed: settings.seed })?;
    let events = ranked
        .events
        .into_iter()
        .filter(|e| !e.paths.is_empty())
        .map(|e| RecommendedEvent { explanations: e.paths.iter().map(|p| p.render()).collect(), event: e })
        .collect();

    state.sessions().update(&session.session_id, |s| {
        s.selected_popular_artist_ids = req.popular_artist_ids;
        s.fusion_config = config;
    })?;
    Ok(Json(RecommendResponse { session_id: session.session_id, fusion_config: config, preferences: source, events }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub level: Level,
    pub id: String,
    pub label: String,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventArtistView {
    pub id: ArtistId,
    pub name: String,
    pub listener_count: u64,
    pub embedded: bool,
    pub folded_in: bool,
    /// Popular artists linked to this artist in the graph, most similar first.
    pub similar_popular_artists: Vec<Similarity>,
    /// Similarity to each of the session's selections, when a session is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection_similarity: Option<Vec<Similarity>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDetail {
    pub id: EventId,
    pub title: String,
    pub venue: String,
    pub start_time: DateTime<Utc>,
    pub source: EventSource,
    pub isolated: bool,
    pub artists: Vec<EventArtistView>,
}

#[derive(Debug, Clone, Default, Deserialize)]
struct EventQuery {
    session: Option<String>,
}

async fn event_detail(
    State(state): State<AppState>,
    Path(id): Path<String>,
    query: Result<Query<EventQuery>, QueryRejection>,
) -> ApiResult<Json<EventDetail>> {
    let engine = state.engine()?;
    let Query(query) = query?;
    let session = query.session.as_deref().map(|s| lookup_session(&state, s)).transpose()?;
    let graph = &engine.graph;
    let node =
        graph.event(&EventId::new(id.clone())).ok_or_else(|| ApiError::not_found(format!("unknown event `{id}`")))?;

    let mut artists = Vec::new();
    for a in &node.event.artist_ids {
        let Some(artist) = graph.event_artist(a) else { continue };
        let mut similar: Vec<Similarity> = graph
            .edges
            .popular_event_artist
            .iter()
            .filter(|e| &e.to == a)
            .filter_map(|e| {
                graph.popular_artist(&e.from).map(|p| Similarity {
                    level: Level::PopularArtist,
                    id: p.id.to_string(),
                    label: p.name.clone(),
                    similarity: e.weight,
                })
            })
            .collect();
        similar.sort_by(|x, y| y.similarity.total_cmp(&x.similarity).then_with(|| x.id.cmp(&y.id)));

        let selection_similarity = session.as_ref().map(|s| {
            let Some(v) = &artist.vector else { return Vec::new() };
            let genres = s.selected_genre_ids.iter().filter_map(|g| graph.genre(g)).map(|g| Similarity {
                level: Level::GenreTag,
                id: g.id.to_string(),
                label: g.label.clone(),
                similarity: cosine(v, &g.vector),
            });
            let popular =
                s.selected_popular_artist_ids.iter().filter_map(|p| graph.popular_artist(p)).map(|p| Similarity {
                    level: Level::PopularArtist,
                    id: p.id.to_string(),
                    label: p.name.clone(),
                    similarity: cosine(v, &p.vector),
                });
            genres.chain(popular).collect()
        });

        artists.push(EventArtistView {
            id: artist.id.clone(),
            name: artist.name.clone(),
            listener_count: artist.listener_count,
            embedded: artist.vector.is_some(),
            folded_in: artist.folded_in,
            similar_popular_artists: similar,
            selection_similarity,
        });
    }
    let e = &node.event;
    Ok(Json(EventDetail {
        id: e.id.clone(),
        title: e.title.clone(),
        venue: e.venue.clone(),
        start_time: e.start_time,
        source: e.source,
        isolated: node.isolated,
        artists,
    }))
}

async fn reload(State(state): State<AppState>) -> ApiResult<Json<serde_json::Value>> {
    let engine = state.reload().await?;
    let levels = &engine.graph.levels;
    Ok(Json(json!({
        "status": "reloaded",
        "genres": levels.genre_tags.len(),
        "popular_artists": levels.popular_artists.len(),
        "event_artists": levels.event_artists.len(),
        "events": levels.events.len(),
    })))
}
