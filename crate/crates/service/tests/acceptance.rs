//! End-to-end API criterion over a real socket. Prints one PASS/FAIL line
//! and exits nonzero on failure.

mod common;

use std::collections::BTreeSet;

use common::{http, ids, offered, onboarding_dir};
use serde_json::json;
use showfinder_service::sessions::SessionStore;
use showfinder_service::{router, AppState, EngineConfig, Settings};

async fn end_to_end() -> Result<String, String> {
    let state =
        AppState::new(Settings::default(), SessionStore::in_memory(), Some(EngineConfig::for_dir(onboarding_dir())));
    state.reload().await.map_err(|e| format!("{e:?}"))?;
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.map_err(|e| e.to_string())?;
    let addr = listener.local_addr().map_err(|e| e.to_string())?;
    tokio::spawn(async move { axum::serve(listener, router(state)).await });

    tokio::task::spawn_blocking(move || {
        let (status, genres) = http(addr, "GET", "/v1/genres", None);
        if status != 200 {
            return Err(format!("GET /v1/genres returned {status}"));
        }
        let (status, session) = http(addr, "POST", "/v1/sessions", Some(&json!({ "genre_ids": ["t1", "t3"] })));
        if status != 201 {
            return Err(format!("POST /v1/sessions returned {status}: {session}"));
        }
        let shown: BTreeSet<String> = offered(&session).into_iter().collect();
        let want: BTreeSet<String> = ["pa1", "pa2", "pa5", "pa6"].map(String::from).into();
        if shown != want {
            return Err(format!("genres {{t1,t3}} offered {shown:?}"));
        }
        let uri = format!("/v1/sessions/{}/recommendations", session["session_id"].as_str().unwrap_or_default());
        let (status, recs) = http(addr, "POST", &uri, Some(&json!({ "popular_artist_ids": ["pa2", "pa6"] })));
        if status != 200 {
            return Err(format!("recommendations returned {status}: {recs}"));
        }
        let order = ids(&recs["events"], "event_id");
        if order.first().map(String::as_str) != Some("e4") {
            return Err(format!("artists {{pa2,pa6}} ranked {order:?}"));
        }
        Ok(format!(
            "{} genres served; {{t1,t3}} → {shown:?}; {{pa2,pa6}} → {order:?}",
            genres["genres"].as_array().map_or(0, Vec::len)
        ))
    })
    .await
    .map_err(|e| e.to_string())?
}

#[tokio::main]
async fn main() {
    match end_to_end().await {
        Ok(detail) => println!("PASS  end-to-end API: {detail}"),
        Err(detail) => {
            println!("FAIL  end-to-end API: {detail}");
            std::process::exit(1);
        }
    }
}
