//! HTTP interface to elicitation sessions.
//!
//! Sessions live in memory, each behind its own lock, so operations on one
//! session are serialized while different sessions proceed in parallel.
//! With a snapshot directory every committed change is also written to
//! `<id>.json` there and reloaded on startup.
//!
//! Every mutation bumps the session's `revision`, returned in the body and
//! as an `ETag`. A POST carrying `If-Match: <revision>` is refused with 409
//! when the session has moved on, which is how a client makes sure its
//! answer goes to the question it was shown.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use tradeoff_core::elicitation::{
    Answer, ElicitationSession, EliminationEvent, FinalReport, SessionStatus, SessionView,
};
use tradeoff_core::frontier::PlanRecord;
use tradeoff_core::io::{read_plans_csv, PlanTable};
use tradeoff_core::utility::ScaledAttribute;
use tradeoff_core::Error as CoreError;

/// A stored session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResource {
    pub id: String,
    pub revision: u64,
    /// Unix time in milliseconds.
    pub created_at: u64,
    pub updated_at: u64,
    pub session: ElicitationSession,
}

impl SessionResource {
    pub fn body(&self) -> ResourceBody {
        ResourceBody {
            id: self.id.clone(),
            revision: self.revision,
            created_at: self.created_at,
            updated_at: self.updated_at,
            session: self.session.view(),
        }
    }
}

/// What the API returns for a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceBody {
    pub id: String,
    pub revision: u64,
    pub created_at: u64,
    pub updated_at: u64,
    pub session: SessionView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierBody {
    pub status: SessionStatus,
    pub frontier: Vec<usize>,
    /// The surviving plans, in the current merged columns.
    pub plans: Vec<PlanRecord>,
    pub eliminated: Vec<EliminationEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    pub detail: serde_json::Value,
}

/// Plans given inline. The label defaults to `p<index>`.
#[derive(Debug, Clone, Deserialize)]
pub struct InlinePlan {
    #[serde(default)]
    pub label: Option<String>,
    pub w: Vec<f64>,
}

/// Body of `POST /sessions`. Plans come either as CSV text or inline; when
/// both plans and attributes are missing the server defaults are used.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateRequest {
    #[serde(default)]
    pub plans_csv: Option<String>,
    #[serde(default)]
    pub plans: Option<Vec<InlinePlan>>,
    #[serde(default)]
    pub attributes: Option<Vec<ScaledAttribute>>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

/// Plans and attributes used when a create request leaves them out.
#[derive(Debug, Clone, Default)]
pub struct Defaults {
    pub plans: Option<PlanTable>,
    pub attributes: Option<Vec<ScaledAttribute>>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
    detail: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.into(),
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }

    fn core(status: StatusCode, err: CoreError) -> Self {
        ApiError {
            status,
            code: err.kind().into(),
            message: err.to_string(),
            detail: serde_json::to_value(format!("{err:?}")).unwrap_or_default(),
        }
    }

    fn not_found(id: &str) -> Self {
        let mut e = Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session `{id}`"));
        e.detail = serde_json::json!({ "id": id });
        e
    }

    fn storage(err: io::Error) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "storage", err.to_string())
    }

    pub fn status(&self) -> StatusCode {
        self.status
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: self.message,
            detail: self.detail,
        };
        (self.status, Json(body)).into_response()
    }
}

/// Status for an error raised while answering or accepting.
fn answer_status(err: &CoreError) -> StatusCode {
    match err {
        CoreError::NoPendingQuestion
        | CoreError::SessionDone
        | CoreError::AlreadyDecided
        | CoreError::QuestionPending => StatusCode::CONFLICT,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

type Slot = Arc<Mutex<SessionResource>>;

/// The session store shared by all handlers.
pub struct Store {
    sessions: RwLock<HashMap<String, Slot>>,
    snapshot_dir: Option<PathBuf>,
    defaults: Defaults,
}

impl Store {
    pub fn in_memory() -> Self {
        Store {
            sessions: RwLock::new(HashMap::new()),
            snapshot_dir: None,
            defaults: Defaults::default(),
        }
    }

    /// Opens a store that snapshots to `dir`, loading any sessions already
    /// there. Files that do not parse are skipped.
    pub fn with_snapshots(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            if let Ok(res) = serde_json::from_str::<SessionResource>(&text) {
                sessions.insert(res.id.clone(), Arc::new(Mutex::new(res)));
            }
        }
        Ok(Store {
            sessions: RwLock::new(sessions),
            snapshot_dir: Some(dir),
            defaults: Defaults::default(),
        })
    }

    pub fn with_defaults(mut self, defaults: Defaults) -> Self {
        self.defaults = defaults;
        self
    }

    pub fn len(&self) -> usize {
        self.sessions.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// A copy of the stored session.
    pub fn get(&self, id: &str) -> Option<SessionResource> {
        self.slot(id).map(|s| s.lock().clone())
    }

    fn slot(&self, id: &str) -> Option<Slot> {
        self.sessions.read().get(id).cloned()
    }

    fn insert(&self, res: SessionResource) -> io::Result<()> {
        self.persist(&res)?;
        self.sessions.write().insert(res.id.clone(), Arc::new(Mutex::new(res)));
        Ok(())
    }

    fn persist(&self, res: &SessionResource) -> io::Result<()> {
        let Some(dir) = &self.snapshot_dir else {
            return Ok(());
        };
        let text = serde_json::to_string(res).map_err(io::Error::other)?;
        write_atomic(&dir.join(format!("{}.json", res.id)), text.as_bytes())
    }

    /// Runs `f` on the session under its lock. The change is committed,
    /// with a new revision, only when `f` succeeds and the snapshot (if
    /// any) is written.
    fn mutate<T>(
        &self,
        id: &str,
        expected: Option<u64>,
        f: impl FnOnce(&mut ElicitationSession) -> Result<T, ApiError>,
    ) -> Result<(SessionResource, T), ApiError> {
        let slot = self.slot(id).ok_or_else(|| ApiError::not_found(id))?;
        let mut guard = slot.lock();
        if let Some(rev) = expected {
            if rev != guard.revision {
                let mut e = ApiError::new(
                    StatusCode::CONFLICT,
                    "stale_revision",
                    format!("session is at revision {}, not {rev}", guard.revision),
                );
                e.detail = serde_json::json!({ "current": guard.revision, "expected": rev });
                return Err(e);
            }
        }
        let mut next = guard.clone();
        let out = f(&mut next.session)?;
        next.revision += 1;
        next.updated_at = now_ms();
        self.persist(&next).map_err(ApiError::storage)?;
        *guard = next.clone();
        Ok((next, out))
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

fn etag(revision: u64) -> HeaderValue {
    HeaderValue::from_str(&format!("\"{revision}\"")).expect("digits are a valid header")
}

fn with_etag(status: StatusCode, res: &SessionResource) -> Response {
    let mut resp = (status, Json(res.body())).into_response();
    resp.headers_mut().insert(header::ETAG, etag(res.revision));
    resp
}

/// Reads `If-Match`, with or without quotes.
fn if_match(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    value
        .to_str()
        .ok()
        .map(|s| s.trim().trim_matches('"'))
        .and_then(|s| s.parse().ok())
        .map(Some)
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "bad_if_match", "If-Match must be a revision number"))
}

/// Builds a session from a create request.
pub fn build_session(req: CreateRequest, defaults: &Defaults) -> Result<ElicitationSession, ApiError> {
    let bad = |e: CoreError| ApiError::core(StatusCode::BAD_REQUEST, e);
    let attributes = req
        .attributes
        .or_else(|| defaults.attributes.clone())
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing_attributes", "no attributes given"))?;
    let plans = match (req.plans_csv, req.plans) {
        (Some(_), Some(_)) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "ambiguous_plans",
                "give either plans_csv or plans, not both",
            ))
        }
        (Some(text), None) => {
            let table = read_plans_csv(text.as_bytes()).map_err(bad)?;
            table.check_attributes(&attributes).map_err(bad)?;
            table.plans
        }
        (None, Some(rows)) => rows
            .into_iter()
            .enumerate()
            .map(|(id, p)| PlanRecord {
                id,
                label: p.label.unwrap_or_else(|| format!("p{id}")),
                w: p.w,
            })
            .collect(),
        (None, None) => {
            let table = defaults
                .plans
                .as_ref()
                .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing_plans", "no plans given"))?;
            table.check_attributes(&attributes).map_err(bad)?;
            table.plans.clone()
        }
    };
    for p in &plans {
        if p.w.len() != attributes.len() {
            let mut e = bad(CoreError::DimensionMismatch {
                expected: attributes.len(),
                found: p.w.len(),
            });
            e.detail = serde_json::json!({ "plan": p.id, "expected": attributes.len(), "found": p.w.len() });
            return Err(e);
        }
    }
    ElicitationSession::start(plans, attributes, req.epsilon.unwrap_or(0.0)).map_err(bad)
}

/// The router over a shared store.
pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/frontier", get(get_frontier))
        .route("/sessions/{id}/question", get(get_question))
        .route("/sessions/{id}/answer", post(post_answer))
        .route("/sessions/{id}/accept", post(post_accept))
        .with_state(store)
}

/// Serves the API on `addr` until the process ends.
pub async fn serve(addr: SocketAddr, store: Arc<Store>) -> io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok" }))
}

async fn create(State(store): State<Arc<Store>>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = serde_json::from_slice(&body).map_err(|e| {
        ApiError::core(StatusCode::BAD_REQUEST, CoreError::Parse(e.to_string()))
    })?;
    let session = build_session(req, &store.defaults)?;
    let now = now_ms();
    let res = SessionResource {
        id: uuid::Uuid::new_v4().simple().to_string(),
        revision: 0,
        created_at: now,
        updated_at: now,
        session,
    };
    store.insert(res.clone()).map_err(ApiError::storage)?;
    let mut resp = with_etag(StatusCode::CREATED, &res);
    if let Ok(loc) = HeaderValue::from_str(&format!("/sessions/{}", res.id)) {
        resp.headers_mut().insert(header::LOCATION, loc);
    }
    Ok(resp)
}

async fn get_session(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let res = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    Ok(with_etag(StatusCode::OK, &res))
}

async fn get_frontier(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>) -> Result<Json<FrontierBody>, ApiError> {
    let res = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let s = &res.session;
    let frontier = s.frontier().surviving.clone();
    let plans = frontier.iter().filter_map(|&p| s.matrix().plan(p).cloned()).collect();
    Ok(Json(FrontierBody {
        status: s.status(),
        frontier,
        plans,
        eliminated: s.eliminations().to_vec(),
    }))
}

/// The question the next answer will be applied to. Computed on a copy, so
/// asking never changes the session.
async fn get_question(State(store): State<Arc<Store>>, UrlPath(id): UrlPath<String>) -> Result<Response, ApiError> {
    let res = store.get(&id).ok_or_else(|| ApiError::not_found(&id))?;
    let mut probe = res.session;
    match probe.next_question() {
        Ok(q) => {
            let mut resp = Json(q).into_response();
            resp.headers_mut().insert(header::ETAG, etag(res.revision));
            Ok(resp)
        }
        Err(CoreError::AlreadyDecided | CoreError::SessionDone) => Ok(StatusCode::NO_CONTENT.into_response()),
        Err(e) => Err(ApiError::core(StatusCode::INTERNAL_SERVER_ERROR, e)),
    }
}

async fn post_answer(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Response, ApiError> {
    let expected = if_match(&headers)?;
    let answer: Answer = serde_json::from_slice(&body).map_err(|e| {
        ApiError::core(StatusCode::UNPROCESSABLE_ENTITY, CoreError::InvalidAnswer(e.to_string()))
    })?;
    let (res, ()) = store.mutate(&id, expected, |session| {
        let explicit = matches!(answer, Answer::DirectRatio { pair: Some(_), .. });
        if session.status() == SessionStatus::Done {
            return Err(ApiError::core(StatusCode::CONFLICT, CoreError::SessionDone));
        }
        if !explicit && session.pending_question().is_none() {
            session.next_question().map_err(|e| {
                let e = if matches!(e, CoreError::AlreadyDecided) { CoreError::NoPendingQuestion } else { e };
                ApiError::core(answer_status(&e), e)
            })?;
        }
        session
            .apply_answer(answer)
            .map_err(|e| ApiError::core(answer_status(&e), e))
    })?;
    Ok(with_etag(StatusCode::OK, &res))
}

async fn post_accept(
    State(store): State<Arc<Store>>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> Result<Json<FinalReport>, ApiError> {
    let expected = if_match(&headers)?;
    let (_, report) = store.mutate(&id, expected, |session| Ok(session.accept()))?;
    Ok(Json(report))
}
