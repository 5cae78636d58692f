//! HTTP surface of the fairness board.
//!
//! GET  /v1/board          — all entries (optional ?from=&to=)
//! GET  /v1/board/head     — newest entry
//! GET  /v1/board/{seq}    — one entry
//! GET  /v1/board/verify   — chain verification from disk
//! POST /v1/board          — append {kind, payload}; bearer credential
//!
//! Reads are unauthenticated; the append credential travels in the
//! Authorization header.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BoardEntry, BoardError, BoardStore, ChainReport, EntryKind};

pub fn router(store: Arc<BoardStore>) -> Router {
    Router::new()
        .route("/v1/board", get(list_entries).post(append_entry))
        .route("/v1/board/head", get(head_entry))
        .route("/v1/board/verify", get(verify_chain))
        .route("/v1/board/{seq}", get(get_entry))
        .with_state(store)
}

/// Serves the board until the process exits.
pub async fn serve(
    store: Arc<BoardStore>,
    listener: tokio::net::TcpListener,
) -> std::io::Result<()> {
    axum::serve(listener, router(store)).await
}

#[derive(Debug, Deserialize)]
struct RangeQuery {
    from: Option<u64>,
    to: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AppendRequest {
    pub kind: EntryKind,
    pub payload: Value,
}

fn error_response(err: &BoardError) -> Response {
    let status = match err {
        BoardError::BadCredential => StatusCode::UNAUTHORIZED,
        BoardError::GateRejected(_) => StatusCode::UNPROCESSABLE_ENTITY,
        BoardError::NotFound(_) => StatusCode::NOT_FOUND,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    let body = serde_json::json!({ "error": err.to_string() });
    (status, Json(body)).into_response()
}

async fn list_entries(
    State(store): State<Arc<BoardStore>>,
    Query(range): Query<RangeQuery>,
) -> Response {
    match store.list(range.from, range.to) {
        Ok(entries) => Json(entries).into_response(),
        Err(e) => error_response(&e),
    }
}

async fn head_entry(State(store): State<Arc<BoardStore>>) -> Response {
    match store.head() {
        Ok(Some(entry)) => Json(entry).into_response(),
        Ok(None) => error_response(&BoardError::NotFound(0)),
        Err(e) => error_response(&e),
    }
}

async fn get_entry(State(store): State<Arc<BoardStore>>, Path(seq): Path<u64>) -> Response {
    match store.get(seq) {
        Ok(entry) => Json(entry).into_response(),
        Err(e) => error_response(&e),
    }
}

async fn verify_chain(State(store): State<Arc<BoardStore>>) -> Json<ChainReport> {
    Json(store.verify_chain())
}

async fn append_entry(
    State(store): State<Arc<BoardStore>>,
    headers: HeaderMap,
    Json(request): Json<AppendRequest>,
) -> Response {
    let credential = headers
        .get("authorization")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .unwrap_or("");
    match store.append(request.kind, request.payload, credential) {
        Ok(entry) => (StatusCode::CREATED, Json(entry)).into_response(),
        Err(e) => error_response(&e),
    }
}

/// Synchronous client for the board API; enough for the CLI roles and for
/// third-party verification over the wire.
pub struct BoardClient {
    base_url: String,
    credential: Option<String>,
}

impl BoardClient {
    pub fn new(base_url: impl Into<String>) -> Self {
        let mut base_url = base_url.into();
        while base_url.ends_with('/') {
            base_url.pop();
        }
        BoardClient {
            base_url,
            credential: None,
        }
    }

    pub fn with_credential(mut self, credential: impl Into<String>) -> Self {
        self.credential = Some(credential.into());
        self
    }

    pub fn list(&self) -> Result<Vec<BoardEntry>, BoardError> {
        let url = format!("{}/v1/board", self.base_url);
        let mut response = ureq::get(&url)
            .call()
            .map_err(|e| BoardError::Http(e.to_string()))?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| BoardError::Http(e.to_string()))
    }

    pub fn get(&self, seq: u64) -> Result<BoardEntry, BoardError> {
        let url = format!("{}/v1/board/{seq}", self.base_url);
        let mut response = ureq::get(&url)
            .call()
            .map_err(|e| BoardError::Http(e.to_string()))?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| BoardError::Http(e.to_string()))
    }

    pub fn head(&self) -> Result<BoardEntry, BoardError> {
        let url = format!("{}/v1/board/head", self.base_url);
        let mut response = ureq::get(&url)
            .call()
            .map_err(|e| BoardError::Http(e.to_string()))?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| BoardError::Http(e.to_string()))
    }

    /// The board's own chain verification (server side, from disk).
    pub fn verify_remote(&self) -> Result<ChainReport, BoardError> {
        let url = format!("{}/v1/board/verify", self.base_url);
        let mut response = ureq::get(&url)
            .call()
            .map_err(|e| BoardError::Http(e.to_string()))?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| BoardError::Http(e.to_string()))
    }

    pub fn append(&self, kind: EntryKind, payload: Value) -> Result<BoardEntry, BoardError> {
        let url = format!("{}/v1/board", self.base_url);
        let credential = self.credential.clone().unwrap_or_default();
        let request = AppendRequest { kind, payload };
        let result = ureq::post(&url)
            .header("authorization", &format!("Bearer {credential}"))
            .send_json(&request);
        match result {
            Ok(mut response) => response
                .body_mut()
                .read_json()
                .map_err(|e| BoardError::Http(e.to_string())),
            Err(ureq::Error::StatusCode(401)) => Err(BoardError::BadCredential),
            Err(ureq::Error::StatusCode(422)) => {
                Err(BoardError::GateRejected("rejected by board gate".into()))
            }
            Err(e) => Err(BoardError::Http(e.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::BoardConfig;

    /// Spawns the board server on an ephemeral port; returns its base URL.
    fn spawn_server(store: Arc<BoardStore>) -> String {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .unwrap();
        let listener = runtime
            .block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))
            .unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            runtime.block_on(serve(store, listener)).ok();
        });
        format!("http://{addr}")
    }

    #[test]
    fn http_round_trip_append_get_verify() {
        let dir = tempfile::tempdir().unwrap();
        let store = Arc::new(BoardStore::open(dir.path(), BoardConfig::new("tok")).unwrap());
        let base = spawn_server(store);

        let client = BoardClient::new(&base).with_credential("tok");
        let entry = client
            .append(
                EntryKind::GroupParams,
                serde_json::json!({"profile": "test"}),
            )
            .unwrap();
        assert_eq!(entry.seq, 0);

        let fetched = client.get(0).unwrap();
        assert_eq!(fetched, entry);
        assert_eq!(client.head().unwrap(), entry);
        assert_eq!(client.list().unwrap().len(), 1);
        assert!(client.verify_remote().unwrap().valid);

        // Wrong credential is a 401.
        let bad = BoardClient::new(&base).with_credential("nope");
        assert!(matches!(
            bad.append(EntryKind::GroupParams, serde_json::json!({})),
            Err(BoardError::BadCredential)
        ));

        // Missing entries are a 404.
        assert!(client.get(7).is_err());
    }
}
