//! HTTP service for human validation: sampled rater sessions, a response
//! log, and the human-baseline report.

pub mod report;
pub mod store;

pub use report::{human_report, HumanReport, HumanRow, VerdictCell};
pub use store::{read_log, replay, LogEvent, RaterResponse, RaterSession, Store, StoreError, Verdict, LOG_FILE};

use crate::dataset::{read_dataset, Dataset, DatasetError, IMAGES_DIR};
use crate::eval::{parse_answer, Parsed};
use crate::taskgen::{catalog, Answer, Instance};
use crate::topology::Topology;
use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Redirect, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;
use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use tower_http::services::ServeDir;

pub const DEFAULT_PLAN: usize = 20;

#[derive(Debug, thiserror::Error)]
pub enum ServerError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub dataset: PathBuf,
    pub log_dir: PathBuf,
    /// Built rater UI bundle, served under `/ui/`.
    pub ui_dir: PathBuf,
}

pub struct AppState {
    dataset: Dataset,
    by_id: HashMap<String, usize>,
    store: Mutex<Store>,
}

impl AppState {
    pub fn new(dataset: Dataset, store: Store) -> Self {
        let by_id = dataset
            .instances
            .iter()
            .enumerate()
            .map(|(i, inst)| (inst.id.clone(), i))
            .collect();
        AppState {
            dataset,
            by_id,
            store: Mutex::new(store),
        }
    }

    fn instance(&self, id: &str) -> Option<&Instance> {
        self.by_id.get(id).map(|i| &self.dataset.instances[*i])
    }
}

fn err(status: StatusCode, msg: impl Into<String>) -> Response {
    (status, Json(json!({"error": msg.into()}))).into_response()
}

/// Sample `n` Cartesian/Polar pairs per task without replacement and order
/// the resulting slots so that no two members of a pair are adjacent
/// (impossible only for a single pair).
pub fn plan_slots(instances: &[Instance], tasks: &[String], n: usize, seed: u64) -> Result<Vec<String>, String> {
    let mut pairs: BTreeMap<(&str, u64), [Option<&str>; 2]> = BTreeMap::new();
    for inst in instances {
        let side = match inst.topology {
            Topology::Cartesian => 0,
            Topology::Polar => 1,
            _ => continue,
        };
        pairs.entry((inst.task_id.as_str(), inst.seed)).or_default()[side] = Some(&inst.id);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items: Vec<(&str, usize)> = Vec::new();
    for task in tasks {
        let complete: Vec<[&str; 2]> = pairs
            .range((task.as_str(), 0)..=(task.as_str(), u64::MAX))
            .filter_map(|(_, [c, p])| Some([(*c)?, (*p)?]))
            .collect();
        if complete.len() < n {
            return Err(format!("task {task} has {} pairs, plan asks for {n}", complete.len()));
        }
        for pair in complete.choose_multiple(&mut rng, n) {
            let key = items.len() / 2;
            items.push((pair[0], key));
            items.push((pair[1], key));
        }
    }
    let mut best: Vec<(&str, usize)> = Vec::new();
    let mut best_clashes = usize::MAX;
    for _ in 0..64 {
        let mut pool = items.clone();
        pool.shuffle(&mut rng);
        let mut order: Vec<(&str, usize)> = Vec::with_capacity(pool.len());
        while !pool.is_empty() {
            let last = order.last().map(|x| x.1);
            let ok: Vec<usize> = (0..pool.len()).filter(|i| Some(pool[*i].1) != last).collect();
            let pick = if ok.is_empty() { 0 } else { ok[rng.gen_range(0..ok.len())] };
            order.push(pool.swap_remove(pick));
        }
        let clashes = order.windows(2).filter(|w| w[0].1 == w[1].1).count();
        if clashes < best_clashes {
            best_clashes = clashes;
            best = order;
        }
        if clashes == 0 {
            break;
        }
    }
    Ok(best.into_iter().map(|(id, _)| id.to_string()).collect())
}

#[derive(Debug, Deserialize)]
struct NewSession {
    plan: Option<usize>,
    seed: Option<u64>,
    alias: Option<String>,
    /// Comma-separated task ids.
    tasks: Option<String>,
}

async fn new_session(State(st): State<Arc<AppState>>, Query(q): Query<NewSession>) -> Response {
    if st.dataset.instances.is_empty() {
        return err(StatusCode::CONFLICT, "dataset is empty");
    }
    let plan = q.plan.unwrap_or(DEFAULT_PLAN);
    if plan == 0 {
        return err(StatusCode::BAD_REQUEST, "plan must be at least 1");
    }
    let present: Vec<String> = catalog()
        .iter()
        .map(|t| t.id.to_string())
        .filter(|t| st.dataset.instances.iter().any(|i| i.task_id == *t))
        .collect();
    let tasks = match q.tasks.as_deref().filter(|s| !s.trim().is_empty()) {
        None => present,
        Some(list) => {
            let wanted: Vec<String> = list.split(',').map(|s| s.trim().to_string()).collect();
            if let Some(bad) = wanted.iter().find(|t| !present.contains(t)) {
                return err(StatusCode::BAD_REQUEST, format!("task {bad} is not in the dataset"));
            }
            wanted
        }
    };
    let seed = q.seed.unwrap_or_else(|| rand::thread_rng().gen());
    let slots = match plan_slots(&st.dataset.instances, &tasks, plan, seed) {
        Ok(s) => s,
        Err(msg) => return err(StatusCode::CONFLICT, msg),
    };
    let session = RaterSession {
        id: uuid::Uuid::new_v4().to_string(),
        alias: q.alias.unwrap_or_default(),
        seed,
        plan,
        tasks,
        slots,
        cursor: 0,
    };
    let mut store = st.store.lock().unwrap();
    if let Err(e) = store.append(&LogEvent::Session(session.clone())) {
        return err(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
    }
    store.sessions.insert(session.id.clone(), session.clone());
    (StatusCode::OK, Json(session)).into_response()
}

async fn next_item(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> Response {
    let (cursor, total, inst_id) = {
        let store = st.store.lock().unwrap();
        let Some(s) = store.sessions.get(&id) else {
            return err(StatusCode::NOT_FOUND, format!("no session {id}"));
        };
        (s.cursor, s.slots.len(), s.slots.get(s.cursor).cloned())
    };
    let Some(inst_id) = inst_id else {
        return Json(json!({"status": "done", "total": total})).into_response();
    };
    let Some(inst) = st.instance(&inst_id) else {
        return err(StatusCode::INTERNAL_SERVER_ERROR, format!("instance {inst_id} missing"));
    };
    let svg = match std::fs::read_to_string(st.dataset.root.join(IMAGES_DIR).join(format!("{inst_id}.svg"))) {
        Ok(s) => s,
        Err(e) => return err(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    };
    let options: Option<Vec<_>> = inst
        .options
        .as_ref()
        .map(|o| o.iter().map(|e| json!({"label": e.label, "text": e.text})).collect());
    Json(json!({
        "status": "item",
        "slot": cursor,
        "total": total,
        "instance_id": inst.id,
        "task_id": inst.task_id,
        "category": inst.category,
        "topology": inst.topology,
        "question": inst.question,
        "options": options,
        "answer_type": inst.answer_type,
        "image_url": format!("/images/{inst_id}.svg"),
        "image_svg": svg,
    }))
    .into_response()
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum GivenAnswer {
    Typed(Answer),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Submission {
    instance_id: String,
    verdict: Verdict,
    clarity_ok: bool,
    logic_ok: bool,
    #[serde(default)]
    given_answer: Option<GivenAnswer>,
    elapsed_s: f64,
}

async fn submit(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, body: Bytes) -> Response {
    let sub: Submission = match serde_json::from_slice(&body) {
        Ok(s) => s,
        Err(e) => return err(StatusCode::BAD_REQUEST, format!("malformed response: {e}")),
    };
    if !(sub.elapsed_s.is_finite() && sub.elapsed_s > 0.0) {
        return err(StatusCode::BAD_REQUEST, "elapsed_s must be positive");
    }
    let mut store = st.store.lock().unwrap();
    let Some(session) = store.sessions.get(&id) else {
        return err(StatusCode::NOT_FOUND, format!("no session {id}"));
    };
    let slot = session.cursor;
    match session.slots.get(slot) {
        Some(expected) if *expected == sub.instance_id => {}
        Some(expected) => {
            return err(
                StatusCode::CONFLICT,
                format!("slot {slot} expects {expected}, got {}", sub.instance_id),
            )
        }
        None => return err(StatusCode::CONFLICT, "session is complete"),
    }
    let Some(inst) = st.instance(&sub.instance_id) else {
        return err(StatusCode::INTERNAL_SERVER_ERROR, "instance missing");
    };
    let given = match sub.given_answer {
        None => None,
        Some(GivenAnswer::Typed(a)) if a.answer_type() == inst.answer_type => Some(a),
        Some(GivenAnswer::Typed(_)) => return err(StatusCode::BAD_REQUEST, "given_answer has the wrong answer type"),
        Some(GivenAnswer::Text(t)) if t.trim().is_empty() => None,
        Some(GivenAnswer::Text(t)) => match parse_answer(&t, inst.answer_type) {
            Parsed::Answer(a) => Some(a),
            Parsed::Failed => return err(StatusCode::BAD_REQUEST, format!("cannot read given_answer {t:?}")),
        },
    };
    let answer_correct = given.as_ref().map(|a| a.matches(&inst.ground_truth));
    let received_ms = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64);
    let resp = RaterResponse {
        session_id: id.clone(),
        slot,
        instance_id: sub.instance_id,
        task_id: inst.task_id.clone(),
        category: inst.category,
        topology: inst.topology,
        verdict: sub.verdict,
        clarity_ok: sub.clarity_ok,
        logic_ok: sub.logic_ok,
        given_answer: given,
        answer_correct,
        elapsed_s: sub.elapsed_s,
        received_ms,
    };
    if let Err(e) = store.append(&LogEvent::Response(resp.clone())) {
        return err(StatusCode::INTERNAL_SERVER_ERROR, e.to_string());
    }
    let session = store.sessions.get_mut(&id).expect("checked above");
    session.cursor += 1;
    let (cursor, done) = (session.cursor, session.cursor == session.slots.len());
    store.responses.push(resp);
    Json(json!({
        "accepted": true,
        "slot": slot,
        "cursor": cursor,
        "done": done,
        "answer_correct": answer_correct,
        "ground_truth": inst.ground_truth.to_string(),
    }))
    .into_response()
}

async fn report(State(st): State<Arc<AppState>>) -> Response {
    let store = st.store.lock().unwrap();
    Json(human_report(&store.responses)).into_response()
}

pub fn router(state: Arc<AppState>, ui_dir: PathBuf) -> Router {
    let images = state.dataset.root.join(IMAGES_DIR);
    Router::new()
        .route("/", get(|| async { Redirect::temporary("/ui/") }))
        .route("/api/session/new", get(new_session))
        .route("/api/session/{id}/next", get(next_item))
        .route("/api/session/{id}/response", post(submit))
        .route("/api/report/human", get(report))
        .nest_service("/ui", ServeDir::new(ui_dir).append_index_html_on_directories(true))
        .nest_service("/images", ServeDir::new(images))
        .with_state(state)
}

/// Load the dataset, replay the log and build the app.
pub fn build_app(cfg: &ServerConfig) -> Result<Router, ServerError> {
    let dataset = read_dataset(&cfg.dataset)?;
    let store = Store::open(&cfg.log_dir)?;
    tracing::info!(
        instances = dataset.instances.len(),
        sessions = store.sessions.len(),
        responses = store.responses.len(),
        log = %store.path().display(),
        "rater service ready"
    );
    Ok(router(Arc::new(AppState::new(dataset, store)), cfg.ui_dir.clone()))
}

pub async fn serve(cfg: &ServerConfig, addr: SocketAddr) -> Result<(), ServerError> {
    let app = build_app(cfg)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app).await?;
    Ok(())
}
