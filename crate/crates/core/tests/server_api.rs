use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use polarbench::dataset::{read_dataset, write_dataset};
use polarbench::server::{
    human_report, router, AppState, LogEvent, RaterResponse, Store, Verdict, LOG_FILE,
};
use polarbench::taskgen::{generate_dataset, Category, GenConfig, GeneratedSet};
use polarbench::topology::Topology;
use serde_json::{json, Value};
use std::sync::Arc;
use tower::ServiceExt;

struct Env {
    _tmp: tempfile::TempDir,
    data: std::path::PathBuf,
    logs: std::path::PathBuf,
    ui: std::path::PathBuf,
}

fn env(n: usize) -> Env {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let set = generate_dataset(&GenConfig {
        n_per_task: n,
        task_filter: vec!["maze".into(), "knight_paths".into(), "grid_rotation".into()],
        ..GenConfig::default()
    })
    .unwrap();
    write_dataset(&set, &data).unwrap();
    let ui = tmp.path().join("ui");
    std::fs::create_dir_all(&ui).unwrap();
    std::fs::write(ui.join("index.html"), "<!doctype html><title>rater</title>").unwrap();
    Env {
        logs: tmp.path().join("logs"),
        data,
        ui,
        _tmp: tmp,
    }
}

fn app(e: &Env) -> Router {
    let state = AppState::new(read_dataset(&e.data).unwrap(), Store::open(&e.logs).unwrap());
    router(Arc::new(state), e.ui.clone())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, String) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let text = String::from_utf8_lossy(&bytes).to_string();
    (status, serde_json::from_str(&text).unwrap_or(Value::Null), text)
}

fn log_lines(e: &Env) -> usize {
    std::fs::read_to_string(e.logs.join(LOG_FILE))
        .unwrap_or_default()
        .lines()
        .count()
}

fn answer(item: &Value, verdict: &str) -> Value {
    json!({
        "instance_id": item["instance_id"],
        "verdict": verdict,
        "clarity_ok": true,
        "logic_ok": true,
        "given_answer": null,
        "elapsed_s": 30.0
    })
}

fn pair_key(id: &str) -> String {
    id.replace("_cartesian_", "_").replace("_polar_", "_")
}

#[tokio::test]
async fn plan_sizes_and_determinism() {
    let e = env(3);
    let app = app(&e);
    let (s, v, _) = call(&app, "GET", "/api/session/new?plan=1&seed=9&tasks=maze,knight_paths", None).await;
    assert_eq!(s, StatusCode::OK);
    let slots: Vec<String> = serde_json::from_value(v["slots"].clone()).unwrap();
    assert_eq!(slots.len(), 4);
    for w in slots.windows(2) {
        assert_ne!(pair_key(&w[0]), pair_key(&w[1]), "pair members adjacent in {slots:?}");
    }
    let (_, v2, _) = call(&app, "GET", "/api/session/new?plan=1&seed=9&tasks=maze,knight_paths", None).await;
    assert_eq!(v2["slots"], v["slots"]);
    assert_ne!(v2["id"], v["id"]);

    let (s, v, _) = call(&app, "GET", "/api/session/new?plan=3&seed=1", None).await;
    assert_eq!(s, StatusCode::OK);
    let slots: Vec<String> = serde_json::from_value(v["slots"].clone()).unwrap();
    assert_eq!(slots.len(), 3 * 3 * 2);
    let unique: std::collections::BTreeSet<&String> = slots.iter().collect();
    assert_eq!(unique.len(), slots.len());
    for w in slots.windows(2) {
        assert_ne!(pair_key(&w[0]), pair_key(&w[1]));
    }

    let (s, _, _) = call(&app, "GET", "/api/session/new?plan=4", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _, _) = call(&app, "GET", "/api/session/new?plan=1&tasks=sudoku", None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn empty_dataset_is_a_conflict() {
    let e = env(1);
    let empty = e.data.with_file_name("empty");
    write_dataset(
        &GeneratedSet {
            pairs: vec![],
            variants: vec![],
        },
        &empty,
    )
    .unwrap();
    let state = AppState::new(read_dataset(&empty).unwrap(), Store::open(&e.logs).unwrap());
    let app = router(Arc::new(state), e.ui.clone());
    let (s, _, _) = call(&app, "GET", "/api/session/new?plan=1", None).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn session_walkthrough_without_leaks() {
    let e = env(2);
    let app = app(&e);
    let (_, sess, _) = call(&app, "GET", "/api/session/new?plan=1&seed=3&tasks=maze,grid_rotation&alias=r1", None).await;
    let id = sess["id"].as_str().unwrap().to_string();
    let next = format!("/api/session/{id}/next");
    let post = format!("/api/session/{id}/response");

    let (s, item, raw) = call(&app, "GET", &next, None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(item["slot"], 0);
    assert!(!raw.contains("ground_truth"));
    assert!(item["image_svg"].as_str().unwrap().contains("<svg"));
    let (_, again, _) = call(&app, "GET", &next, None).await;
    assert_eq!(again["instance_id"], item["instance_id"]);

    let (s, _, _) = call(&app, "POST", &post, Some(json!({"instance_id": item["instance_id"], "verdict": "maybe",
        "clarity_ok": true, "logic_ok": true, "elapsed_s": 3.0}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let mut bad_time = answer(&item, "correct");
    bad_time["elapsed_s"] = json!(0.0);
    assert_eq!(call(&app, "POST", &post, Some(bad_time)).await.0, StatusCode::BAD_REQUEST);
    let wrong = json!({"instance_id": "maze_polar_999", "verdict": "correct", "clarity_ok": true,
        "logic_ok": true, "elapsed_s": 3.0});
    assert_eq!(call(&app, "POST", &post, Some(wrong)).await.0, StatusCode::CONFLICT);
    let lines = log_lines(&e);

    let mut first = answer(&item, "correct");
    first["given_answer"] = json!("Answer: A");
    let (s, ack, _) = call(&app, "POST", &post, Some(first.clone())).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(ack["cursor"], 1);
    assert!(ack["answer_correct"].is_boolean());
    assert!(ack["ground_truth"].is_string());
    assert_eq!(log_lines(&e), lines + 1);

    let (s, _, _) = call(&app, "POST", &post, Some(first)).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(log_lines(&e), lines + 1);

    for verdict in ["i_dont_know", "incorrect", "correct"] {
        let (_, item, raw) = call(&app, "GET", &next, None).await;
        assert!(!raw.contains("ground_truth"));
        let (s, _, _) = call(&app, "POST", &post, Some(answer(&item, verdict))).await;
        assert_eq!(s, StatusCode::OK);
    }
    let (_, done, _) = call(&app, "GET", &next, None).await;
    assert_eq!(done["status"], "done");

    let (s, _, _) = call(&app, "GET", "/api/session/nope/next", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let (_, report, _) = call(&app, "GET", "/api/report/human", None).await;
    let overall = report["rows"].as_array().unwrap().last().unwrap();
    assert_eq!(overall["category"], "Overall");
    assert_eq!(overall["all"]["n"], 4);
    assert_eq!(overall["all"]["correct_pct"], 50.0);
    assert_eq!(overall["all"]["idk_pct"], 25.0);
    assert_eq!(overall["all"]["incorrect_pct"], 25.0);
    assert_eq!(overall["all"]["avg_minutes"], 0.5);
}

#[tokio::test]
async fn restart_replays_the_log() {
    let e = env(2);
    let id;
    let first_item;
    {
        let app = app(&e);
        let (_, sess, _) = call(&app, "GET", "/api/session/new?plan=1&seed=5&tasks=maze,knight_paths", None).await;
        id = sess["id"].as_str().unwrap().to_string();
        let (_, item, _) = call(&app, "GET", &format!("/api/session/{id}/next"), None).await;
        first_item = item.clone();
        call(&app, "POST", &format!("/api/session/{id}/response"), Some(answer(&item, "correct"))).await;
    }
    // A response that reached the log but was never acknowledged.
    let app = app(&e);
    let (_, second, _) = call(&app, "GET", &format!("/api/session/{id}/next"), None).await;
    assert_eq!(second["slot"], 1);
    assert_ne!(second["instance_id"], first_item["instance_id"]);
    let events = polarbench::server::read_log(&e.logs.join(LOG_FILE)).unwrap();
    let LogEvent::Response(template) = events.last().unwrap().clone() else {
        panic!("last event should be a response")
    };
    let unacked = RaterResponse {
        slot: 1,
        instance_id: second["instance_id"].as_str().unwrap().to_string(),
        ..template
    };
    let mut line = serde_json::to_string(&LogEvent::Response(unacked)).unwrap();
    line.push('\n');
    line.push_str("{\"event\": \"resp");
    use std::io::Write;
    std::fs::OpenOptions::new()
        .append(true)
        .open(e.logs.join(LOG_FILE))
        .unwrap()
        .write_all(line.as_bytes())
        .unwrap();

    let app = self::app(&e);
    let (_, third, _) = call(&app, "GET", &format!("/api/session/{id}/next"), None).await;
    assert_eq!(third["slot"], 2);
    let (s, _, _) = call(&app, "POST", &format!("/api/session/{id}/response"), Some(answer(&third, "incorrect"))).await;
    assert_eq!(s, StatusCode::OK);
    let events = polarbench::server::read_log(&e.logs.join(LOG_FILE)).unwrap();
    assert_eq!(events.iter().filter(|e| matches!(e, LogEvent::Response(_))).count(), 3);
    let (_, fourth, _) = call(&self::app(&e), "GET", &format!("/api/session/{id}/next"), None).await;
    assert_eq!(fourth["slot"], 3);
}

#[tokio::test]
async fn serves_ui_and_images() {
    let e = env(1);
    let app = app(&e);
    let (s, _, body) = call(&app, "GET", "/ui/", None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(body.contains("rater"));
    let id = read_dataset(&e.data).unwrap().instances[0].id.clone();
    let (s, _, body) = call(&app, "GET", &format!("/images/{id}.svg"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert!(body.contains("<svg"));
}

fn resp(category: Category, topology: Topology, verdict: Verdict, elapsed_s: f64) -> RaterResponse {
    RaterResponse {
        session_id: "s".into(),
        slot: 0,
        instance_id: "i".into(),
        task_id: "t".into(),
        category,
        topology,
        verdict,
        clarity_ok: true,
        logic_ok: true,
        given_answer: None,
        answer_correct: None,
        elapsed_s,
        received_ms: 0,
    }
}

#[test]
fn report_arithmetic() {
    let rs = vec![
        resp(Category::Spatial, Topology::Cartesian, Verdict::Correct, 600.0),
        resp(Category::Spatial, Topology::Cartesian, Verdict::Correct, 1200.0),
        resp(Category::Spatial, Topology::Polar, Verdict::IDontKnow, 600.0),
        resp(Category::Spatial, Topology::Polar, Verdict::Incorrect, 1200.0),
        resp(Category::Navigation, Topology::Polar, Verdict::Correct, 60.0),
    ];
    let report = human_report(&rs);
    let spatial = report.rows.iter().find(|r| r.category == Category::Spatial.title()).unwrap();
    assert_eq!(spatial.all.n, 4);
    assert_eq!(
        (spatial.all.correct_pct, spatial.all.idk_pct, spatial.all.incorrect_pct),
        (50.0, 25.0, 25.0)
    );
    assert_eq!(spatial.all.avg_minutes, 15.0);
    let (c, p) = (spatial.cartesian.as_ref().unwrap(), spatial.polar.as_ref().unwrap());
    assert_eq!(c.n + p.n, spatial.all.n);
    assert_eq!(spatial.delta_acc, Some(100.0));
    let nav = report.rows.iter().find(|r| r.category == Category::Navigation.title()).unwrap();
    assert!(nav.cartesian.is_none() && nav.delta_acc.is_none());
    assert_eq!(report.rows.last().unwrap().all.n, 5);
}

#[test]
fn log_reopen_cuts_a_partial_line() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join(LOG_FILE);
    std::fs::write(&path, "{\"event\":\"sess").unwrap();
    let store = Store::open(tmp.path()).unwrap();
    assert!(store.sessions.is_empty());
    assert_eq!(std::fs::read(&path).unwrap().len(), 0);
}
