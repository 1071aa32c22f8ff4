//! HTTP onboarding API and command-line tools for the showfinder engine.

pub mod api;
pub mod cli;
pub mod engine;
pub mod sessions;

pub use api::{router, AppState, Settings};
pub use engine::{Engine, EngineConfig};
