//! A local OpenAI-compatible endpoint for closed-loop testing of the
//! evaluation pipeline.

use crate::taskgen::Instance;
use axum::extract::State;
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

#[derive(Debug, Clone)]
pub enum StubPolicy {
    /// Reply with the mapped text for the instance named in the request id.
    EchoTruth(HashMap<String, String>),
    /// Reply with the same text every time.
    Constant(String),
}

/// `id -> "Answer: <ground truth>"` for every instance.
pub fn truth_replies<'a>(instances: impl IntoIterator<Item = &'a Instance>) -> HashMap<String, String> {
    instances
        .into_iter()
        .map(|i| (i.id.clone(), format!("Answer: {}", i.ground_truth)))
        .collect()
}

struct StubState {
    policy: StubPolicy,
    script: Mutex<VecDeque<u16>>,
    requests: AtomicUsize,
}

pub struct StubServer {
    /// Chat-completions URL of the stub.
    pub url: String,
    state: Arc<StubState>,
    task: tokio::task::JoinHandle<()>,
}

impl StubServer {
    /// Requests received so far, including scripted failures.
    pub fn requests(&self) -> usize {
        self.state.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.task.abort();
    }
}

async fn complete(State(st): State<Arc<StubState>>, headers: HeaderMap, Json(_body): Json<Value>) -> Response {
    st.requests.fetch_add(1, Ordering::SeqCst);
    if let Some(code) = st.script.lock().unwrap().pop_front() {
        let status = StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        if status != StatusCode::OK {
            return (status, "scripted failure").into_response();
        }
    }
    let rid = headers.get("x-request-id").and_then(|v| v.to_str().ok()).unwrap_or_default();
    let id = rid.split('/').next().unwrap_or_default();
    let text = match &st.policy {
        StubPolicy::Constant(t) => t.clone(),
        StubPolicy::EchoTruth(map) => match map.get(id) {
            Some(t) => t.clone(),
            None => return (StatusCode::BAD_REQUEST, format!("unknown instance `{id}`")).into_response(),
        },
    };
    Json(json!({
        "id": format!("stub-{rid}"),
        "object": "chat.completion",
        "choices": [{"index": 0, "message": {"role": "assistant", "content": text}, "finish_reason": "stop"}],
    }))
    .into_response()
}

/// Start the stub on an ephemeral local port. `script` lists status codes
/// returned by the first requests, in order, before the policy applies.
pub async fn spawn_stub(policy: StubPolicy, script: Vec<u16>) -> std::io::Result<StubServer> {
    let state = Arc::new(StubState {
        policy,
        script: Mutex::new(script.into()),
        requests: AtomicUsize::new(0),
    });
    let app = Router::new()
        .route("/v1/chat/completions", post(complete))
        .with_state(state.clone());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    let task = tokio::spawn(async move {
        let _ = axum::serve(listener, app).await;
    });
    Ok(StubServer {
        url: format!("http://{addr}/v1/chat/completions"),
        state,
        task,
    })
}
