use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use futures::StreamExt;
use http_body_util::BodyExt;
use polytile::run_cli;
use polytile::service::{router, AppState, DEFAULT_TTL};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;
use tower::ServiceExt;

async fn send(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn send_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = send(app, method, uri, body).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::Null))
}

async fn create(app: &Router, body: Option<Value>) -> String {
    let (status, doc) = send_json(app, "POST", "/sessions", body).await;
    assert_eq!(status, StatusCode::CREATED, "{doc}");
    doc["id"].as_str().unwrap().to_string()
}

/// Heptagon 0 with hexagons 1..=7 glued around it and to each other.
async fn heptagon_ring(app: &Router, id: &str) {
    let post = |path: &str, body: Value| {
        let uri = format!("/sessions/{id}/{path}");
        async move {
            let (status, doc) = send_json(app, "POST", &uri, Some(body)).await;
            assert_eq!(status, StatusCode::OK, "{doc}");
            doc
        }
    };
    assert_eq!(post("faces", json!({ "sides": 7, "edge_length": "1" })).await["face"], 0);
    for k in 1..=7 {
        post("faces", json!({ "sides": 6 })).await;
        post("glue", json!({ "a": { "face": 0, "index": k - 1 }, "b": { "face": k, "index": 0 } })).await;
    }
    for k in 1..=7 {
        let next = k % 7 + 1;
        post("glue", json!({ "a": { "face": k, "index": 5 }, "b": { "face": next, "index": 1 } })).await;
    }
}

fn interior_values(report: &Value) -> Vec<String> {
    report["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["kind"] == "interior")
        .map(|v| v["value"]["display"].as_str().unwrap().to_string())
        .collect()
}

#[tokio::test]
async fn heptagon_ring_has_seven_excess_vertices() {
    let app = router(AppState::new(DEFAULT_TTL));
    let id = create(&app, None).await;
    heptagon_ring(&app, &id).await;
    let (status, report) = send_json(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(interior_values(&report), vec!["-8 4/7°"; 7]);
    assert_eq!(report["counts"], json!({ "v": 28, "e": 35, "f": 8 }));
}

#[tokio::test]
async fn undo_restores_the_previous_report() {
    let app = router(AppState::new(DEFAULT_TTL));
    let id = create(&app, None).await;
    send(&app, "POST", &format!("/sessions/{id}/faces"), Some(json!({ "sides": 7 }))).await;
    send(&app, "POST", &format!("/sessions/{id}/faces"), Some(json!({ "sides": 6 }))).await;
    let (_, before) = send(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    let glue = json!({ "a": { "face": 0, "index": 0 }, "b": { "face": 1, "index": 0 } });
    let (status, _) = send(&app, "POST", &format!("/sessions/{id}/glue"), Some(glue)).await;
    assert_eq!(status, StatusCode::OK);
    let (_, after) = send(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_ne!(before, after);
    let (status, doc) = send_json(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["undo_depth"], 2);
    let (_, restored) = send(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_eq!(restored, before);
    for _ in 0..2 {
        send(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    }
    let (status, doc) = send_json(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(doc["error"]["code"], "NothingToUndo");
}

#[tokio::test]
async fn report_matches_the_cli() {
    let app = router(AppState::new(DEFAULT_TTL));
    let id = create(&app, None).await;
    heptagon_ring(&app, &id).await;
    let (_, spec) = send(&app, "GET", &format!("/sessions/{id}/spec"), None).await;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.toml");
    std::fs::write(&path, &spec).unwrap();
    let cli = run_cli(["polytile", "analyze", "--spec", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(cli.code, 0, "{}", cli.stderr);
    let (_, report) = send(&app, "GET", &format!("/sessions/{id}/report"), None).await;
    assert_eq!(report, cli.stdout);

    let preset = create(&app, Some(json!({ "preset": "torus-9fold" }))).await;
    let (_, report) = send(&app, "GET", &format!("/sessions/{preset}/report"), None).await;
    assert_eq!(report, run_cli(["polytile", "analyze", "--preset", "torus-9fold", "--format", "json"]).stdout);
}

#[tokio::test]
async fn errors_carry_codes() {
    let app = router(AppState::new(DEFAULT_TTL));
    let (status, doc) = send_json(&app, "GET", "/sessions/nope/report", None).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownSession")));

    let id = create(&app, None).await;
    let faces = format!("/sessions/{id}/faces");
    let (status, doc) = send_json(&app, "POST", &faces, Some(json!({ "sides": 2 }))).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("SidesTooSmall")));
    send(&app, "POST", &faces, Some(json!({ "sides": 3 }))).await;
    send(&app, "POST", &faces, Some(json!({ "sides": 3, "edge_length": "3/2" }))).await;
    let glue = format!("/sessions/{id}/glue");
    let (status, doc) =
        send_json(&app, "POST", &glue, Some(json!({ "a": { "face": 0, "index": 0 }, "b": { "face": 1, "index": 0 } }))).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("LengthMismatch")));
    let (status, _) = send_json(&app, "POST", &glue, Some(json!({ "a": 1 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    // A stale revision means another writer got there first.
    let (status, doc) = send_json(&app, "POST", &faces, Some(json!({ "sides": 4, "revision": 0 }))).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::CONFLICT, Some("ConflictingMutation")));
    let (status, doc) = send_json(&app, "POST", &faces, Some(json!({ "sides": 4, "revision": 2 }))).await;
    assert_eq!((status, doc["revision"].as_u64()), (StatusCode::OK, Some(3)));

    let (status, doc) = send_json(&app, "POST", "/sessions", Some(json!({ "preset": "football-9-1" }))).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("UnknownPreset")));
    let empty = create(&app, None).await;
    let (status, doc) = send_json(&app, "GET", &format!("/sessions/{empty}/embedding"), None).await;
    assert_eq!((status, doc["error"]["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("Empty")));
}

#[tokio::test]
async fn relax_and_embedding() {
    let app = router(AppState::new(DEFAULT_TTL));
    let id = create(&app, Some(json!({ "preset": "cube" }))).await;
    let (status, doc) = send_json(&app, "GET", &format!("/sessions/{id}/embedding"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(doc["positions"].as_array().unwrap().len(), 14);
    assert!(doc["relax"].is_null());
    let (status, doc) =
        send_json(&app, "POST", &format!("/sessions/{id}/relax"), Some(json!({ "iters": 5000, "tol": 1e-8, "seed": 1 }))).await;
    assert_eq!(status, StatusCode::OK, "{doc}");
    assert!(doc["relax"]["max_residual"].as_f64().unwrap() < 0.01);
    let (_, emb) = send_json(&app, "GET", &format!("/sessions/{id}/embedding"), None).await;
    assert_eq!(emb["relax"], doc["relax"]);
}

async fn next<S>(ws: &mut S) -> Value
where
    S: futures::Stream<Item = Result<Message, tokio_tungstenite::tungstenite::Error>> + Unpin,
{
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(20), ws.next()).await.unwrap().unwrap().unwrap();
        if let Message::Text(t) = msg {
            return serde_json::from_str(&t).unwrap();
        }
    }
}

#[tokio::test]
async fn live_stream_pushes_reports_and_frames() {
    let state = AppState::new(DEFAULT_TTL);
    let app = router(Arc::clone(&state));
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let served = router(Arc::clone(&state));
    tokio::spawn(async move { axum::serve(listener, served).await.unwrap() });

    let id = create(&app, Some(json!({ "preset": "truncated-icosahedron" }))).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/{id}/live")).await.unwrap();
    let hello = next(&mut ws).await;
    assert_eq!(hello["event"], "snapshot");
    assert_eq!(hello["report"]["counts"]["v"], 60);
    assert_eq!(hello["frame"]["positions"].as_array().unwrap().len(), 60 + 32);

    let start = Instant::now();
    let (status, _) =
        send_json(&app, "POST", &format!("/sessions/{id}/relax"), Some(json!({ "iters": 20000, "tol": 1e-12 }))).await;
    assert_eq!(status, StatusCode::OK);
    let elapsed = start.elapsed();
    let mut frames = 0;
    loop {
        let ev = next(&mut ws).await;
        match ev["event"].as_str().unwrap() {
            "relax_frame" => {
                frames += 1;
                assert!(ev["report"].is_null());
            }
            "relaxed" => {
                assert_eq!(ev["report"]["counts"]["v"], 60);
                assert_eq!(ev["frame"]["iteration"], 20000);
                break;
            }
            other => panic!("unexpected {other}"),
        }
    }
    assert!(frames >= 1);
    assert!(frames as f64 <= elapsed.as_secs_f64() * 30.0 + 1.0, "{frames} frames in {elapsed:?}");

    let (status, _) = send_json(&app, "POST", &format!("/sessions/{id}/faces"), Some(json!({ "sides": 4 }))).await;
    assert_eq!(status, StatusCode::OK);
    let ev = next(&mut ws).await;
    assert_eq!(ev["event"], "face_added");
    assert_eq!(ev["report"]["counts"]["f"], 33);
    // Two pieces cannot be embedded together.
    assert!(ev["frame"].is_null());
    send(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
    let ev = next(&mut ws).await;
    assert_eq!(ev["event"], "undo");
    assert_eq!(ev["report"]["counts"]["f"], 32);
    assert!(ev["frame"]["positions"].is_array());
}

#[tokio::test]
async fn mutation_during_relax_conflicts() {
    let state = AppState::new(DEFAULT_TTL);
    let app = router(state);
    let id = create(&app, Some(json!({ "preset": "truncated-icosidodecahedron" }))).await;
    let relaxing = {
        let app = app.clone();
        let id = id.clone();
        tokio::spawn(async move {
            send_json(&app, "POST", &format!("/sessions/{id}/relax"), Some(json!({ "iters": 20000, "tol": 0.0 }))).await
        })
    };
    let mut saw_conflict = false;
    for _ in 0..200 {
        let (status, doc) = send_json(&app, "POST", &format!("/sessions/{id}/faces"), Some(json!({ "sides": 3 }))).await;
        if status == StatusCode::CONFLICT {
            assert_eq!(doc["error"]["code"], "ConflictingMutation");
            saw_conflict = true;
            break;
        }
        // Relax has not started yet; take the face back off.
        send(&app, "POST", &format!("/sessions/{id}/undo"), None).await;
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
    let (status, _) = relaxing.await.unwrap();
    assert_eq!(status, StatusCode::OK);
    assert!(saw_conflict);
    let (status, _) = send_json(&app, "POST", &format!("/sessions/{id}/faces"), Some(json!({ "sides": 3 }))).await;
    assert_eq!(status, StatusCode::OK);
}
