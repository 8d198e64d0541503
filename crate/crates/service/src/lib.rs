//! HTTP service that runs odd-one-out sessions and concreteness ratings.
//!
//! Each participant gets one slot of a precomputed triplet schedule, works
//! through it trial by trial, then rates every stimulus word on a 1–9 scale.
//! Accepted responses are appended to a JSON-lines log in the data directory
//! and flushed before the reply, so a restarted server resumes where it
//! stopped. The judgment export feeds straight into the analysis library.
//!
//! ```text
//! POST /sessions                       claim a slot
//! GET  /sessions/{id}/trial            current trial
//! POST /sessions/{id}/choice           {"trial_id","chosen","rt_ms"}
//! POST /sessions/{id}/rating           {"trial_id","rating","rt_ms"}
//! GET  /export/judgments.csv
//! GET  /export/ratings.csv
//! GET  /health
//! GET  /consent
//! POST /admin/sessions/{id}/release    bearer token required
//! ```

pub mod config;
pub mod http;
pub mod study;

use std::path::Path;
use std::sync::Arc;

pub use config::{ConfigError, LoadedConfig, ServiceConfig};
pub use http::{router, AppState};
pub use study::{Ack, Phase, Session, Study, StudyError, StudyStatus, Trial};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Study(#[from] StudyError),
    #[error("server: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the study described by `loaded` and builds the router state.
pub fn app_state(loaded: &LoadedConfig) -> Result<AppState, StudyError> {
    let study = Study::open(
        loaded.schedule.clone(),
        loaded.rating_words.clone(),
        loaded.config.seed,
        &loaded.data_dir,
    )?;
    Ok(AppState {
        study: Arc::new(study),
        consent: loaded.consent.as_deref().map(Arc::from),
        admin_token: loaded.config.admin_token.as_deref().map(Arc::from),
    })
}

/// Serves until ctrl-c. `base` is the directory relative config paths
/// resolve against.
pub async fn serve(config: ServiceConfig, base: &Path) -> Result<(), ServeError> {
    let loaded = config.load(base)?;
    let state = app_state(&loaded)?;
    let status = state.study.status();
    let listener = tokio::net::TcpListener::bind(loaded.bind).await?;
    log::info!(
        "listening on {} ({} slots, {} claimed, log {})",
        listener.local_addr()?,
        status.slots,
        status.claimed,
        state.study.wal_path().display()
    );
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            log::info!("shutting down");
        })
        .await?;
    Ok(())
}
