#![allow(dead_code)]

use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use lexalign::design::{generate_triplets, schedule_triplets, write_schedule_csv};
use lexalign_service::{app_state, router, AppState, ServiceConfig};
use serde_json::Value;
use tower::ServiceExt;

pub fn words(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("word{i:02}")).collect()
}

/// Writes a schedule over `n_words` words split into `slots` blocks and a
/// config pointing at it. Returns the config.
pub fn setup(dir: &Path, n_words: usize, slots: usize, token: Option<&str>) -> ServiceConfig {
    let schedule =
        schedule_triplets(&generate_triplets(&words(n_words)).unwrap(), slots, 3).unwrap();
    write_schedule_csv(
        &schedule,
        std::fs::File::create(dir.join("schedule.csv")).unwrap(),
    )
    .unwrap();
    std::fs::write(dir.join("consent.txt"), "I agree.\n").unwrap();
    let mut text =
        "schedule = \"schedule.csv\"\ndata_dir = \"data\"\nseed = 11\nconsent = \"consent.txt\"\n"
            .to_string();
    if let Some(t) = token {
        text += &format!("admin_token = \"{t}\"\n");
    }
    ServiceConfig::from_toml(&text).unwrap()
}

pub fn state(dir: &Path, cfg: &ServiceConfig) -> AppState {
    app_state(&cfg.clone().load(dir).unwrap()).unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("{e}: {}", self.text))
    }

    pub fn code(&self) -> String {
        self.json()["error"]["code"].as_str().unwrap().to_string()
    }
}

pub async fn call(
    app: &Router,
    method: &str,
    uri: &str,
    body: Option<Value>,
    auth: Option<&str>,
) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(a) = auth {
        req = req.header("authorization", format!("Bearer {a}"));
    }
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

pub fn app(state: AppState) -> Router {
    router(state)
}
