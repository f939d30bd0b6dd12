use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rankfit_core::model::{build_unsat_ranking, generate_uniform, sum_ranking};
use rankfit_service::{router, AppState, Config};
use serde_json::{json, Value};
use tower::ServiceExt;

const EXAMPLE_CSV: &str = "id,A1,A2,A3\nr,3,2,8\ns,4,1,15\nt,1,1,14\n";
const EXAMPLE_RANKING: &str = "r\n> s\n> t\n";

fn app_with(config: Config) -> Router {
    router(AppState::new(config).unwrap())
}

fn app() -> Router {
    app_with(Config::default())
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, value)
}

async fn upload(app: &Router, csv: &str, ranking: &str) -> String {
    let (status, info) = call(app, "POST", "/datasets", Some(json!({ "name": "t", "csv": csv, "ranking": ranking }))).await;
    assert_eq!(status, StatusCode::CREATED, "{info}");
    info["id"].as_str().unwrap().to_string()
}

async fn submit(app: &Router, dataset: &str, body: Value) -> String {
    let (status, created) = call(app, "POST", &format!("/datasets/{dataset}/solve"), Some(body)).await;
    assert_eq!(status, StatusCode::ACCEPTED, "{created}");
    created["jobId"].as_str().unwrap().to_string()
}

/// Polls a job until it leaves the queued and running states.
async fn wait(app: &Router, job: &str) -> Value {
    let start = Instant::now();
    loop {
        let (status, view) = call(app, "GET", &format!("/jobs/{job}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if !matches!(view["state"].as_str(), Some("queued" | "running")) {
            return view;
        }
        assert!(start.elapsed() < Duration::from_secs(120), "job {job} never finished");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

/// A generated relation with its ranking file text.
fn generated(n: usize, m: usize, seed: u64, unsat: bool) -> (String, String) {
    let rel = generate_uniform(n, m, seed).unwrap();
    let ranking = if unsat { build_unsat_ranking(&rel).unwrap() } else { sum_ranking(&rel) };
    (rel.to_csv_string(), ranking.to_text(&rel))
}

#[tokio::test]
async fn upload_reports_shape_and_preview() {
    let app = app();
    let (status, info) = call(
        &app,
        "POST",
        "/datasets",
        Some(json!({ "name": "example", "csv": EXAMPLE_CSV, "ranking": EXAMPLE_RANKING })),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(info["attributes"], json!(["A1", "A2", "A3"]));
    assert_eq!((info["n"].as_u64(), info["m"].as_u64()), (Some(3), Some(3)));
    assert_eq!(info["preview"][1]["id"], "s");
    assert_eq!(info["preview"][1]["rank"], 2);
    let id = info["id"].as_str().unwrap();
    let (status, again) = call(&app, "GET", &format!("/datasets/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, info);
}

#[tokio::test]
async fn missing_ranking_uses_row_order() {
    let app = app();
    let (status, info) = call(&app, "POST", "/datasets", Some(json!({ "csv": "id,A\nb,1\na,2\n" }))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(info["preview"][0]["id"], "b");
}

#[tokio::test]
async fn sat_on_example_returns_certificate() {
    let app = app();
    let ds = upload(&app, EXAMPLE_CSV, EXAMPLE_RANKING).await;
    let job = submit(&app, &ds, json!({ "mode": "sat", "k": 2 })).await;
    let view = wait(&app, &job).await;
    assert_eq!(view["state"], "done");
    assert_eq!(view["datasetId"], ds);
    let report = &view["report"];
    assert_eq!(report["status"], "SATISFIABLE");
    assert_eq!(report["verified"], true);
    assert_eq!(report["weights"].as_array().unwrap().len(), 3);
    for t in report["per_tuple"].as_array().unwrap() {
        assert_eq!(t["given_rank"], t["achieved_rank"]);
    }
}

#[tokio::test]
async fn constrained_solve_never_beats_unconstrained() {
    let app = app();
    let (csv, ranking) = generated(40, 3, 21, true);
    let ds = upload(&app, &csv, &ranking).await;
    let free = wait(&app, &submit(&app, &ds, json!({ "mode": "opt", "k": 5 })).await).await;
    let held = wait(
        &app,
        &submit(&app, &ds, json!({ "mode": "opt", "k": 5, "constraints": ["A1 <= 0.1"] })).await,
    )
    .await;
    let e0 = free["report"]["objective"].as_f64().unwrap();
    let e1 = held["report"]["objective"].as_f64().unwrap();
    assert!(e1 >= e0, "{e1} < {e0}");
    assert!(held["report"]["weights"][0].as_f64().unwrap() <= 0.1 + 1e-9);

    let (status, history) = call(&app, "GET", &format!("/datasets/{ds}/explanations"), None).await;
    assert_eq!(status, StatusCode::OK);
    let list = history["explanations"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[0]["report"], free["report"]);
    assert_eq!(list[1]["request"]["constraints"], json!(["A1 <= 0.1"]));
}

#[tokio::test]
async fn history_is_append_only() {
    let app = app();
    let ds = upload(&app, EXAMPLE_CSV, EXAMPLE_RANKING).await;
    let mut seen: Vec<Value> = Vec::new();
    for k in 1..=3 {
        wait(&app, &submit(&app, &ds, json!({ "mode": "opt", "k": k })).await).await;
        let (_, history) = call(&app, "GET", &format!("/datasets/{ds}/explanations"), None).await;
        let list = history["explanations"].as_array().unwrap().clone();
        assert_eq!(list.len(), seen.len() + 1);
        assert_eq!(&list[..seen.len()], &seen[..]);
        seen = list;
    }
}

#[tokio::test]
async fn unknown_ids_are_not_found() {
    let app = app();
    let body = json!({ "mode": "sat", "k": 1 });
    assert_eq!(call(&app, "POST", "/datasets/nope/solve", Some(body)).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/datasets/nope", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", "/datasets/nope/explanations", None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "DELETE", "/datasets/nope", None).await.0, StatusCode::NOT_FOUND);
    let (status, err) = call(&app, "GET", "/jobs/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(err["error"].as_str().unwrap().contains("nope"));
    assert_eq!(call(&app, "DELETE", "/jobs/nope", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn bad_requests_are_rejected() {
    let app = app();
    let ds = upload(&app, EXAMPLE_CSV, EXAMPLE_RANKING).await;
    let solve = format!("/datasets/{ds}/solve");
    for body in [
        json!({ "mode": "opt", "k": 2, "constraints": ["A1 < 0.1"] }),
        json!({ "mode": "opt", "k": 2, "constraints": ["PTS <= 0.1"] }),
        json!({ "mode": "opt", "k": 2, "importance": { "zz": 2.0 } }),
        json!({ "mode": "opt", "k": 9 }),
        json!({ "mode": "opt", "k": 2, "eps": { "eps1": 1e-12 } }),
        json!({ "mode": "cell", "k": 2 }),
        json!({ "mode": "cell", "k": 2, "cell": { "strategy": "explicit", "size": 0.1 } }),
        json!({ "mode": "fast", "k": 2 }),
        json!({ "mode": "opt", "k": 2, "timeLimit": -1.0 }),
    ] {
        let (status, err) = call(&app, "POST", &solve, Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
        assert!(err["error"].is_string(), "{body}");
    }
    for body in [json!({ "csv": "id,A\nx,abc\n" }), json!({ "csv": EXAMPLE_CSV, "ranking": "r\n> zz\n" }), json!({})] {
        assert_eq!(call(&app, "POST", "/datasets", Some(body.clone())).await.0, StatusCode::BAD_REQUEST, "{body}");
    }
    // Nothing was recorded for the rejected solves.
    let (_, history) = call(&app, "GET", &format!("/datasets/{ds}/explanations"), None).await;
    assert!(history["explanations"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn upload_cap_is_enforced() {
    let app = app_with(Config {
        max_rows: 5,
        ..Config::default()
    });
    let (csv, ranking) = generated(6, 2, 1, false);
    let (status, _) = call(&app, "POST", "/datasets", Some(json!({ "csv": csv, "ranking": ranking }))).await;
    assert_eq!(status, StatusCode::PAYLOAD_TOO_LARGE);
    let (csv, ranking) = generated(5, 2, 1, false);
    let (status, _) = call(&app, "POST", "/datasets", Some(json!({ "csv": csv, "ranking": ranking }))).await;
    assert_eq!(status, StatusCode::CREATED);
}

#[tokio::test]
async fn running_job_blocks_the_dataset_until_cancelled() {
    let app = app();
    let (csv, ranking) = generated(200, 8, 42, true);
    let ds = upload(&app, &csv, &ranking).await;
    let job = submit(&app, &ds, json!({ "mode": "opt", "k": 5, "timeLimit": 60 })).await;

    let (status, _) = call(&app, "POST", &format!("/datasets/{ds}/solve"), Some(json!({ "mode": "sat", "k": 5 }))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(call(&app, "DELETE", &format!("/datasets/{ds}"), None).await.0, StatusCode::CONFLICT);

    let (status, _) = call(&app, "DELETE", &format!("/jobs/{job}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let start = Instant::now();
    let view = wait(&app, &job).await;
    assert!(start.elapsed() < Duration::from_secs(30));
    assert_eq!(view["state"], "cancelled");

    assert_eq!(call(&app, "DELETE", &format!("/datasets/{ds}"), None).await.0, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, "GET", &format!("/datasets/{ds}"), None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, "GET", &format!("/jobs/{job}"), None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn time_limit_returns_the_incumbent() {
    let app = app();
    let (csv, ranking) = generated(200, 8, 42, true);
    let ds = upload(&app, &csv, &ranking).await;
    let view = wait(&app, &submit(&app, &ds, json!({ "mode": "opt", "k": 5, "timeLimit": 2 })).await).await;
    assert_eq!(view["state"], "done");
    let report = &view["report"];
    assert_eq!(report["status"], "TIMEOUT_BEST");
    assert!(report["weights"].is_array());
    assert!(report["best_bound"].as_f64().unwrap() <= report["objective"].as_f64().unwrap());
}

#[tokio::test]
async fn cell_mode_runs_around_a_seed() {
    let app = app();
    let (csv, ranking) = generated(20, 3, 5, true);
    let ds = upload(&app, &csv, &ranking).await;
    let body = json!({ "mode": "cell", "k": 4, "cell": { "strategy": "sample", "size": 0.05, "samples": 50, "seed": 1 } });
    let view = wait(&app, &submit(&app, &ds, body).await).await;
    assert_eq!(view["state"], "done");
    assert_eq!(view["report"]["method"], "cell:sampling");
    assert_eq!(view["report"]["verified"], true);
}

#[tokio::test]
async fn snapshots_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = Config {
        snapshot_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    };
    let app = app_with(config.clone());
    let ds = upload(&app, EXAMPLE_CSV, EXAMPLE_RANKING).await;
    let job = submit(&app, &ds, json!({ "mode": "opt", "k": 3 })).await;
    let first = wait(&app, &job).await;

    let restarted = app_with(config);
    let (status, history) = call(&restarted, "GET", &format!("/datasets/{ds}/explanations"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(history["explanations"][0]["report"], first["report"]);
    assert_eq!(history["explanations"][0]["jobId"], job);
    let other = upload(&restarted, EXAMPLE_CSV, EXAMPLE_RANKING).await;
    assert_ne!(other, ds);
    let job2 = submit(&restarted, &ds, json!({ "mode": "sat", "k": 2 })).await;
    assert_ne!(job2, job);

    wait(&restarted, &job2).await;
    assert_eq!(call(&restarted, "DELETE", &format!("/datasets/{ds}"), None).await.0, StatusCode::NO_CONTENT);
    assert!(!dir.path().join(format!("{ds}.json")).exists());
}

#[tokio::test]
async fn static_bundle_is_served_at_root() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>ui</html>").unwrap();
    let app = app_with(Config {
        static_dir: Some(dir.path().to_path_buf()),
        ..Config::default()
    });
    let (status, body) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, Value::String("<html>ui</html>".into()));
    let (status, _) = call(&app, "GET", "/datasets/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
