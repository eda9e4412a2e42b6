//! Fixtures and HTTP helpers shared by the service tests.
#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use packseq::pool::{Pool, Trial};
use packseq::service::{router, AppState};
use packseq_core::evaluation::{SourceKind, Verdict};
use packseq_core::fixtures::grocery_catalog;
use packseq_core::ObjectId;
use serde_json::Value;
use tower::ServiceExt;

const SCENES: [&[&str]; 4] = [
    &["apple", "bowl", "mug"],
    &["bread", "milk_carton", "sponge", "plum"],
    &["banana", "cracker_box"],
    &["lemon", "orange", "peach", "pear", "sugar_box"],
];

/// `per_source` trials of each source, with opaque ids in a mixed order.
pub fn fixture_pool(per_source: usize) -> Pool {
    let mut trials = Vec::new();
    for i in 0..per_source {
        for (k, source) in SourceKind::ALL.into_iter().enumerate() {
            let scene: Vec<ObjectId> = SCENES[(i + k) % SCENES.len()].iter().map(|s| ObjectId::from(*s)).collect();
            let mut sequence = scene.clone();
            sequence.rotate_left(k % scene.len());
            let mut scene = scene;
            scene.sort();
            trials.push(Trial {
                trial_id: format!("t{:04}", (i * 4 + k) * 7919 % 10_000),
                scene,
                sequence,
                source,
                created_at: 1_700_000_000,
            });
        }
    }
    Pool::new(&grocery_catalog(), trials).unwrap()
}

pub fn open(pool: Pool, log: &std::path::Path) -> (Arc<AppState>, Router) {
    let state = AppState::open(pool, log, 7).unwrap();
    (state.clone(), router(state))
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap_or(Value::Null) };
    (status, value)
}

pub async fn new_session(app: &Router) -> String {
    let (status, v) = call(app, "POST", "/api/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED);
    v["session_id"].as_str().unwrap().to_string()
}

pub async fn judge(app: &Router, session: &str, trial: &str, verdict: &str) -> StatusCode {
    let body = serde_json::json!({ "trial_id": trial, "verdict": verdict });
    call(app, "POST", &format!("/api/sessions/{session}/judgments"), Some(body)).await.0
}

/// Judgment counts of the published results table, reconstructed by rounding
/// each percentage times its sample size to the nearest integer:
/// `(source, judged human, judged computer)`.
pub const TABLE_ONE: [(SourceKind, usize, usize); 4] = [
    (SourceKind::Random, 2, 28),
    (SourceKind::Real, 26, 7),
    (SourceKind::BeamN, 8, 8),
    (SourceKind::Beam3, 15, 2),
];

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::HumanGenerated => "human_generated",
        Verdict::ComputerGenerated => "computer_generated",
    }
}

/// Replays the reconstructed results table through the HTTP API: one trial
/// per source, and session `i` judges every source that still has judgments
/// left in its row.
pub async fn submit_table_one(app: &Router, pool: &Pool) {
    let trial_of = |k: SourceKind| pool.trials.iter().find(|t| t.source == k).unwrap().trial_id.clone();
    let longest = TABLE_ONE.iter().map(|(_, h, c)| h + c).max().unwrap();
    for i in 0..longest {
        let session = new_session(app).await;
        for (kind, human, computer) in TABLE_ONE {
            let verdict = if i < human {
                Verdict::HumanGenerated
            } else if i < human + computer {
                Verdict::ComputerGenerated
            } else {
                continue;
            };
            assert_eq!(judge(app, &session, &trial_of(kind), verdict_name(verdict)).await, StatusCode::CREATED);
        }
    }
}
