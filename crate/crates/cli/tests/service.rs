mod common;

use std::time::Duration;

use axum::http::StatusCode;
use serde_json::json;

use common::{call, fake_upstream, without_request_id, LogCapture, Upstream, SECRET};
use wiregen_cli::server::{router, AppState};
use wiregen_core::generation::{ApiKey, RemoteClient, RetryPolicy};
use wiregen_core::{Backend, GenerationConfig};

fn mock_app() -> axum::Router {
    router(AppState::mock_only(), None)
}

fn remote_app(url: &str) -> axum::Router {
    let client = RemoteClient::new(url, Some(ApiKey::new(SECRET)), &GenerationConfig::default())
        .unwrap()
        .with_retry(RetryPolicy {
            max_retries: 1,
            base_delay: Duration::from_millis(1),
        });
    router(AppState::mock_only().with_remote(Backend::Remote(client), true), None)
}

#[tokio::test]
async fn health_and_icons() {
    let app = mock_app();
    let (status, body) = call(&app, "GET", "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!({ "status": "ok" }));
    let (status, body) = call(&app, "GET", "/api/icons", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["icons"].as_array().unwrap().len(), 10);
}

#[tokio::test]
async fn generate_with_mock_is_deterministic() {
    let app = mock_app();
    let req = json!({ "description": "a login page", "config": { "backend": "mock", "seed": 7 } });
    let (status, first) = call(&app, "POST", "/api/generate", Some(req.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert!(first["svg"].as_str().unwrap().starts_with("<svg"));
    assert!(first["beautified_dsl"].as_str().unwrap().ends_with("</html>"));
    let (_, second) = call(&app, "POST", "/api/generate", Some(req)).await;
    assert_ne!(first["request_id"], second["request_id"]);
    assert_eq!(without_request_id(first), without_request_id(second));
}

#[tokio::test]
async fn responses_do_not_depend_on_request_order() {
    let prompts = ["a login page", "a settings page", "search for recipes"];
    let request = |p: &str| json!({ "description": p, "config": { "seed": 3, "mode": "few-shot", "k": 2 } });
    let forward = mock_app();
    let mut a = Vec::new();
    for p in prompts {
        a.push(without_request_id(
            call(&forward, "POST", "/api/generate", Some(request(p))).await.1,
        ));
    }
    let backward = mock_app();
    let mut b = Vec::new();
    for p in prompts.iter().rev() {
        b.push(without_request_id(
            call(&backward, "POST", "/api/generate", Some(request(p))).await.1,
        ));
    }
    b.reverse();
    assert_eq!(a, b);
}

#[tokio::test]
async fn request_errors_map_to_status_codes() {
    let app = mock_app();
    let (status, body) = call(&app, "POST", "/api/generate", Some(json!({ "description": "  " }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["request_id"].is_string());
    let (status, _) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "x", "config": { "temperature": 3.0 } })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    // no remote configured
    let (status, _) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "x", "config": { "backend": "remote" } })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
}

#[tokio::test]
async fn beautify_endpoint() {
    let app = mock_app();
    let raw = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/bad.html")).unwrap();
    let (status, body) = call(&app, "POST", "/api/beautify", Some(json!({ "raw_dsl": raw }))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["findings"].as_array().unwrap().len(), 3);
    assert!(body["report"]["residual"].as_array().unwrap().is_empty());
    assert!(body["svg"].as_str().unwrap().starts_with("<svg"));
    let (status, _) = call(&app, "POST", "/api/beautify", Some(json!({ "raw_dsl": "just words" }))).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn unreachable_backend_is_bad_gateway() {
    let app = remote_app("http://127.0.0.1:1/v1/chat/completions");
    let (status, body) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "a login page" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert!(!body["error"].as_str().unwrap().is_empty());
}

#[tokio::test]
async fn prose_completion_is_unprocessable() {
    let (url, _) = fake_upstream(Upstream::Prose).await;
    let app = remote_app(&url);
    let (status, _) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "a login page" })),
    )
    .await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn remote_generation_sends_the_key_and_never_reveals_it() {
    let logs = LogCapture::default();
    let _guard = logs.install();

    let (url, seen) = fake_upstream(Upstream::Wireframe).await;
    let app = remote_app(&url);
    let (status, ok_body) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "a greeting" })),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(seen.lock().unwrap().as_slice(), [format!("Bearer {SECRET}")]);

    let (url, _) = fake_upstream(Upstream::EchoKeyUnauthorized).await;
    let app = remote_app(&url);
    let (status, err_body) = call(
        &app,
        "POST",
        "/api/generate",
        Some(json!({ "description": "a greeting" })),
    )
    .await;
    assert_eq!(status, StatusCode::BAD_GATEWAY);
    assert!(err_body["error"].as_str().unwrap().contains("401"));

    let text = logs.text();
    assert!(text.contains("generate"), "logging was captured");
    assert_eq!(text.matches(SECRET).count(), 0);
    assert!(!ok_body.to_string().contains(SECRET));
    assert!(!err_body.to_string().contains(SECRET));
}
