use polarbench::dataset::{read_dataset, write_dataset, IMAGES_DIR};
use polarbench::eval::stub::{spawn_stub, truth_replies, StubPolicy};
use polarbench::eval::{
    aggregate, read_records, run_eval, EndpointConfig, EvalError, Judge, ModelClient, Parsed, PromptMode, RunOptions,
    TopologyFilter,
};
use polarbench::taskgen::{generate_dataset, Answer, GenConfig, Instance};
use polarbench::topology::Topology;
use std::path::Path;
use std::sync::Arc;

fn small_dataset(dir: &Path, n: usize) -> Vec<Instance> {
    let cfg = GenConfig {
        n_per_task: n,
        ..GenConfig::default()
    };
    let set = generate_dataset(&cfg).unwrap();
    write_dataset(&set, dir).unwrap();
    read_dataset(dir).unwrap().instances
}

fn client(url: &str, dir: &Path) -> Arc<ModelClient> {
    let mut cfg = EndpointConfig::new(url, "stub");
    cfg.initial_backoff_ms = 1;
    cfg.max_retries = 3;
    Arc::new(ModelClient::new(cfg, dir.join(IMAGES_DIR)).unwrap())
}

fn opts(mode: PromptMode, path: &Path) -> RunOptions {
    RunOptions {
        mode,
        topology: TopologyFilter::Both,
        repeats: 1,
        records_path: path.to_path_buf(),
        tasks: None,
    }
}

#[tokio::test]
async fn echo_stub_scores_perfectly_and_runs_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = Arc::new(small_dataset(tmp.path(), 2));
    let stub = spawn_stub(StubPolicy::EchoTruth(truth_replies(instances.iter())), vec![])
        .await
        .unwrap();
    let records = tmp.path().join("runs/records.jsonl");
    let summary = run_eval(
        instances.clone(),
        client(&stub.url, tmp.path()),
        &opts(PromptMode::Standard, &records),
        None,
    )
    .await
    .unwrap();
    let paired = instances
        .iter()
        .filter(|i| matches!(i.topology, Topology::Cartesian | Topology::Polar))
        .count();
    assert!(summary.failures.is_empty(), "{:?}", summary.failures);
    assert_eq!(summary.records.len(), paired);

    let report = aggregate(&read_records(&records).unwrap(), &instances).unwrap();
    assert_eq!(report.overall.c_acc, Some(100.0));
    assert_eq!(report.overall.p_acc, Some(100.0));
    assert_eq!(report.overall.delta, Some(0.0));
    assert_eq!(report.parse_failures, 0);

    let before = stub.requests();
    let again = run_eval(
        instances.clone(),
        client(&stub.url, tmp.path()),
        &opts(PromptMode::Standard, &records),
        None,
    )
    .await
    .unwrap();
    assert_eq!(again.skipped, paired);
    assert!(again.records.is_empty());
    assert_eq!(stub.requests(), before);
}

#[tokio::test]
async fn always_a_matches_label_frequency() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = Arc::new(small_dataset(tmp.path(), 2));
    let stub = spawn_stub(StubPolicy::Constant("Answer: A".into()), vec![]).await.unwrap();
    let records = tmp.path().join("records.jsonl");
    run_eval(
        instances.clone(),
        client(&stub.url, tmp.path()),
        &opts(PromptMode::Standard, &records),
        None,
    )
    .await
    .unwrap();
    let report = aggregate(&read_records(&records).unwrap(), &instances).unwrap();
    for (t, acc) in [
        (Topology::Cartesian, report.overall.c_acc.unwrap()),
        (Topology::Polar, report.overall.p_acc.unwrap()),
    ] {
        let side: Vec<&Instance> = instances.iter().filter(|i| i.topology == t).collect();
        let a = side.iter().filter(|i| i.ground_truth.to_string() == "A").count();
        assert_eq!(acc, 100.0 * a as f64 / side.len() as f64, "{t:?}");
    }
}

#[tokio::test]
async fn retries_rate_limits_then_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = small_dataset(tmp.path(), 1);
    let stub = spawn_stub(StubPolicy::Constant("Answer: B".into()), vec![429, 429]).await.unwrap();
    let c = client(&stub.url, tmp.path());
    let prompt = polarbench::eval::build_prompt(&instances[0], PromptMode::Standard, &[], None).unwrap();
    let reply = c.complete(&prompt, "x/standard/0").await.unwrap();
    assert_eq!(reply.text, "Answer: B");
    assert_eq!(reply.retries, 2);
    assert_eq!(stub.requests(), 3);
}

#[tokio::test]
async fn persistent_server_errors_give_up() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = small_dataset(tmp.path(), 1);
    let stub = spawn_stub(StubPolicy::Constant("Answer: B".into()), vec![500; 10]).await.unwrap();
    let c = client(&stub.url, tmp.path());
    let prompt = polarbench::eval::build_prompt(&instances[0], PromptMode::Standard, &[], None).unwrap();
    let err = c.complete(&prompt, "x/standard/0").await.unwrap_err();
    assert!(matches!(err, EvalError::Transport(_)), "{err}");
    assert_eq!(stub.requests(), 4);
}

#[tokio::test]
async fn client_errors_are_not_retried() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = small_dataset(tmp.path(), 1);
    let stub = spawn_stub(StubPolicy::Constant("x".into()), vec![401]).await.unwrap();
    let c = client(&stub.url, tmp.path());
    let prompt = polarbench::eval::build_prompt(&instances[0], PromptMode::Standard, &[], None).unwrap();
    let err = c.complete(&prompt, "x/standard/0").await.unwrap_err();
    assert!(matches!(err, EvalError::Http { status: 401, .. }), "{err}");
    assert_eq!(stub.requests(), 1);
}

#[tokio::test]
async fn two_stage_records_captions_and_answers() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = Arc::new(small_dataset(tmp.path(), 1));
    let stub = spawn_stub(StubPolicy::EchoTruth(truth_replies(instances.iter())), vec![])
        .await
        .unwrap();
    let records = tmp.path().join("records.jsonl");
    let mut o = opts(PromptMode::TwoStageAnswer, &records);
    o.topology = TopologyFilter::Polar;
    let summary = run_eval(instances.clone(), client(&stub.url, tmp.path()), &o, None)
        .await
        .unwrap();
    let polar = instances.iter().filter(|i| i.topology == Topology::Polar).count();
    assert_eq!(summary.records.len(), 2 * polar);
    let all = read_records(&records).unwrap();
    let captions: Vec<_> = all.iter().filter(|r| r.mode == PromptMode::TwoStageCaption).collect();
    assert_eq!(captions.len(), polar);
    assert!(captions.iter().all(|r| r.correct.is_none() && r.size_mention.is_some()));
    let report = aggregate(&all, &instances).unwrap();
    assert_eq!(report.scored, polar);
    assert_eq!(report.overall.p_acc, Some(100.0));
    assert_eq!(report.size_mentions.len(), 1);
}

#[tokio::test]
async fn few_shot_uses_polar_exemplars() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = Arc::new(small_dataset(tmp.path(), 6));
    let stub = spawn_stub(StubPolicy::EchoTruth(truth_replies(instances.iter())), vec![])
        .await
        .unwrap();
    let records = tmp.path().join("records.jsonl");
    let mut o = opts(PromptMode::FewShot, &records);
    o.tasks = Some(vec!["maze".into()]);
    let summary = run_eval(instances.clone(), client(&stub.url, tmp.path()), &o, None)
        .await
        .unwrap();
    assert!(summary.failures.is_empty(), "{:?}", summary.failures);
    assert_eq!(summary.records.len(), 12);
    assert!(summary.records.iter().all(|r| r.correct == Some(true)));
}

struct TruthJudge(Vec<Instance>);

impl Judge for TruthJudge {
    fn judge(&self, inst: &Instance, _raw: &str) -> Option<Answer> {
        self.0.iter().find(|i| i.id == inst.id).map(|i| i.ground_truth.clone())
    }
}

#[tokio::test]
async fn judge_hook_only_sees_parse_failures() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = Arc::new(small_dataset(tmp.path(), 1));
    let stub = spawn_stub(StubPolicy::Constant("No idea.".into()), vec![]).await.unwrap();
    let records = tmp.path().join("records.jsonl");
    let mut o = opts(PromptMode::Standard, &records);
    o.tasks = Some(vec!["knight_paths".into(), "grid_rotation".into()]);
    let judge: Arc<dyn Judge> = Arc::new(TruthJudge(instances.to_vec()));
    let summary = run_eval(instances.clone(), client(&stub.url, tmp.path()), &o, Some(judge))
        .await
        .unwrap();
    for r in &summary.records {
        if r.parsed == Parsed::Failed {
            assert!(r.judge_answer.is_some());
            assert_eq!(r.correct, Some(true));
        } else {
            assert!(r.judge_answer.is_none());
        }
    }
    assert!(summary.records.iter().any(|r| r.parsed == Parsed::Failed));
}

#[test]
fn orphan_records_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let instances = small_dataset(tmp.path(), 1);
    let rec: polarbench::eval::EvalRecord = serde_json::from_value(serde_json::json!({
        "instance_id": "nope_cartesian_0",
        "mode": "standard",
        "model": "m",
        "raw_response": "Answer: A",
        "parsed": {"answer": {"option_label": "A"}},
        "correct": true,
        "latency_ms": 1
    }))
    .unwrap();
    let err = aggregate(&[rec], &instances).unwrap_err();
    assert!(matches!(err, EvalError::Orphans(ref ids) if ids == &["nope_cartesian_0".to_string()]));
}

#[test]
fn interrupted_final_line_is_dropped() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("records.jsonl");
    let good = serde_json::json!({
        "instance_id": "a", "mode": "standard", "model": "m", "raw_response": "x",
        "parsed": "failed", "correct": null, "latency_ms": 1
    });
    std::fs::write(&path, format!("{good}\n{{\"instance_id\": \"b\", \"mo")).unwrap();
    let recs = read_records(&path).unwrap();
    assert_eq!(recs.len(), 1);
    std::fs::write(&path, format!("{{broken\n{good}\n")).unwrap();
    assert!(read_records(&path).is_err());
}
