//! HTTP evaluation service.
//!
//! Routes:
//!
//! - `POST /api/sessions` returns `{"session_id": ...}`.
//! - `GET /api/sessions/{id}/next-trial` returns a blinded trial or
//!   `{"status": "no_trials_remaining"}`.
//! - `POST /api/sessions/{id}/judgments` takes `{"trial_id", "verdict"}`.
//! - `GET /api/results?pair=beam_3,beam_n` returns the results table.
//!
//! Sessions and judgments are appended to a JSON Lines log and synced to disk
//! before the response is sent. The log is replayed on startup.
//!
//! Within a session, trials are served in blocks that contain each source
//! once in shuffled order, picking a random unserved trial of that source.
//! Sources with nothing left are skipped.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use packseq_core::evaluation::{tally, PairTestConfig, ResultsTable, SourceKind, Verdict};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tokio::sync::Mutex;

use crate::error::{io, Error, Result};
use crate::formats::CatalogRecord;
use crate::pool::Pool;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LogRecord {
    Session { session_id: String, created_at: u64 },
    Judgment { session_id: String, trial_id: String, verdict: Verdict, submitted_at: u64 },
}

/// What a client sees of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NextTrial {
    Trial { trial_id: String, objects: Vec<CatalogRecord>, sequence: Vec<String> },
    NoTrialsRemaining,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JudgmentRequest {
    pub trial_id: String,
    pub verdict: Verdict,
}

struct Session {
    rng: ChaCha8Rng,
    block: Vec<SourceKind>,
    served: BTreeSet<usize>,
    judged: BTreeMap<usize, Verdict>,
}

struct Inner {
    sessions: HashMap<String, Session>,
    log: File,
}

pub struct AppState {
    pool: Pool,
    by_id: HashMap<String, usize>,
    catalog: HashMap<String, CatalogRecord>,
    seed: u64,
    log_path: PathBuf,
    inner: Mutex<Inner>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl AppState {
    /// Opens the log at `log_path`, creating it if needed, and replays it.
    /// A torn final line left by a crash is truncated away.
    pub fn open(pool: Pool, log_path: &Path, seed: u64) -> Result<Arc<Self>> {
        pool.validate()?;
        let by_id = pool.trials.iter().enumerate().map(|(i, t)| (t.trial_id.clone(), i)).collect();
        let catalog = pool.catalog.iter().map(|r| (r.id.as_str().to_string(), r.clone())).collect();
        let mut log = OpenOptions::new().read(true).append(true).create(true).open(log_path).map_err(io(log_path))?;
        let records = replay(&mut log, log_path)?;
        let mut state = AppState {
            pool,
            by_id,
            catalog,
            seed,
            log_path: log_path.to_path_buf(),
            inner: Mutex::new(Inner { sessions: HashMap::new(), log }),
        };
        let sessions = &mut state.inner.get_mut().sessions;
        for (line, record) in records {
            match record {
                LogRecord::Session { session_id, .. } => {
                    let session = new_session(seed, &session_id);
                    sessions.insert(session_id, session);
                }
                LogRecord::Judgment { session_id, trial_id, verdict, .. } => {
                    let bad = |what: &str| Error::Pool(format!("judgment log line {line}: unknown {what}"));
                    let t = *state.by_id.get(&trial_id).ok_or_else(|| bad("trial"))?;
                    let s = sessions.get_mut(&session_id).ok_or_else(|| bad("session"))?;
                    s.served.insert(t);
                    s.judged.insert(t, verdict);
                }
            }
        }
        Ok(Arc::new(state))
    }

    pub fn log_path(&self) -> &Path {
        &self.log_path
    }

    pub async fn create_session(&self) -> std::io::Result<String> {
        let session_id = uuid::Uuid::new_v4().to_string();
        let mut inner = self.inner.lock().await;
        append(&mut inner.log, &LogRecord::Session { session_id: session_id.clone(), created_at: now() })?;
        inner.sessions.insert(session_id.clone(), new_session(self.seed, &session_id));
        Ok(session_id)
    }

    /// `None` for an unknown session.
    pub async fn next_trial(&self, session_id: &str) -> Option<NextTrial> {
        let mut inner = self.inner.lock().await;
        let session = inner.sessions.get_mut(session_id)?;
        let open = |kind: SourceKind, served: &BTreeSet<usize>| -> Vec<usize> {
            (0..self.pool.trials.len())
                .filter(|i| self.pool.trials[*i].source == kind && !served.contains(i))
                .collect()
        };
        loop {
            if session.block.is_empty() {
                session.block = SourceKind::ALL.into_iter().filter(|k| !open(*k, &session.served).is_empty()).collect();
                if session.block.is_empty() {
                    return Some(NextTrial::NoTrialsRemaining);
                }
                session.block.shuffle(&mut session.rng);
            }
            let kind = session.block.pop().expect("non-empty block");
            if let Some(&pick) = open(kind, &session.served).choose(&mut session.rng) {
                session.served.insert(pick);
                return Some(self.view(pick));
            }
        }
    }

    fn view(&self, index: usize) -> NextTrial {
        let t = &self.pool.trials[index];
        NextTrial::Trial {
            trial_id: t.trial_id.clone(),
            objects: t.scene.iter().filter_map(|id| self.catalog.get(id.as_str()).cloned()).collect(),
            sequence: t.sequence.iter().map(|id| id.as_str().to_string()).collect(),
        }
    }

    pub async fn submit(&self, session_id: &str, req: &JudgmentRequest) -> Result<(), ApiError> {
        let trial = *self.by_id.get(&req.trial_id).ok_or(ApiError::NotFound("trial"))?;
        let mut inner = self.inner.lock().await;
        let Inner { sessions, log } = &mut *inner;
        let session = sessions.get_mut(session_id).ok_or(ApiError::NotFound("session"))?;
        if session.judged.contains_key(&trial) {
            return Err(ApiError::Conflict);
        }
        let record = LogRecord::Judgment {
            session_id: session_id.to_string(),
            trial_id: req.trial_id.clone(),
            verdict: req.verdict,
            submitted_at: now(),
        };
        append(log, &record).map_err(|e| ApiError::Internal(e.to_string()))?;
        session.served.insert(trial);
        session.judged.insert(trial, req.verdict);
        Ok(())
    }

    /// All recorded `(true source, verdict)` pairs.
    pub async fn judgments(&self) -> Vec<(SourceKind, Verdict)> {
        let inner = self.inner.lock().await;
        inner
            .sessions
            .values()
            .flat_map(|s| s.judged.iter().map(|(t, v)| (self.pool.trials[*t].source, *v)))
            .collect()
    }

    pub async fn results(&self, pair: Option<(SourceKind, SourceKind)>) -> packseq_core::Result<ResultsTable> {
        tally(self.judgments().await, pair, &PairTestConfig::default())
    }
}

fn new_session(seed: u64, session_id: &str) -> Session {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(session_id.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    Session {
        rng: ChaCha8Rng::from_seed(digest),
        block: Vec::new(),
        served: BTreeSet::new(),
        judged: BTreeMap::new(),
    }
}

fn append(log: &mut File, record: &LogRecord) -> std::io::Result<()> {
    let mut line = serde_json::to_vec(record).expect("log record serializes");
    line.push(b'\n');
    log.write_all(&line)?;
    log.flush()?;
    log.sync_data()
}

fn replay(log: &mut File, path: &Path) -> Result<Vec<(usize, LogRecord)>> {
    let mut records = Vec::new();
    let mut good_len = 0u64;
    let mut reader = BufReader::new(&*log);
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let n = reader.read_line(&mut buf).map_err(io(path))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        if !buf.ends_with('\n') {
            // torn write at the tail
            break;
        }
        if !buf.trim().is_empty() {
            let record = serde_json::from_str(buf.trim_end()).map_err(|source| Error::Parse { line: line_no, source })?;
            records.push((line_no, record));
        }
        good_len += n as u64;
    }
    if log.metadata().map_err(io(path))?.len() != good_len {
        log.set_len(good_len).map_err(io(path))?;
        log.seek(SeekFrom::End(0)).map_err(io(path))?;
    }
    Ok(records)
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(&'static str),
    Conflict,
    BadRequest(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, message) = match self {
            ApiError::NotFound(what) => (StatusCode::NOT_FOUND, format!("unknown {what}")),
            ApiError::Conflict => (StatusCode::CONFLICT, "trial already judged in this session".to_string()),
            ApiError::BadRequest(m) => (StatusCode::BAD_REQUEST, m),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(serde_json::json!({ "error": message }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
struct ResultsQuery {
    pair: Option<String>,
}

/// Parses `first,second` into two source kinds.
pub fn parse_pair(s: &str) -> Result<(SourceKind, SourceKind), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `first,second`, got `{s}`"))?;
    let kind = |x: &str| x.trim().parse::<SourceKind>().map_err(|e| e.to_string());
    Ok((kind(a)?, kind(b)?))
}

async fn create_session(State(state): State<Arc<AppState>>) -> Result<impl IntoResponse, ApiError> {
    let id = state.create_session().await.map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "session_id": id }))))
}

async fn next_trial(State(state): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Result<Json<NextTrial>, ApiError> {
    state.next_trial(&id).await.map(Json).ok_or(ApiError::NotFound("session"))
}

async fn submit_judgment(
    State(state): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<JudgmentRequest>,
) -> Result<impl IntoResponse, ApiError> {
    state.submit(&id, &req).await?;
    Ok((StatusCode::CREATED, Json(serde_json::json!({ "status": "recorded", "trial_id": req.trial_id }))))
}

async fn results(State(state): State<Arc<AppState>>, Query(q): Query<ResultsQuery>) -> Result<Json<ResultsTable>, ApiError> {
    let pair = q.pair.as_deref().map(parse_pair).transpose().map_err(ApiError::BadRequest)?;
    state.results(pair).await.map(Json).map_err(|e| ApiError::Internal(e.to_string()))
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/next-trial", get(next_trial))
        .route("/api/sessions/{id}/judgments", post(submit_judgment))
        .route("/api/results", get(results))
        .with_state(state)
}
