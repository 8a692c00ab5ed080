//! Helpers shared by the service and acceptance tests.
#![allow(dead_code)]

use std::io;
use std::sync::{Arc, Mutex};

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use tower::ServiceExt;
use tracing_subscriber::fmt::MakeWriter;

pub const SECRET: &str = "sk-test-7f3a9c1e5b2d4f6a8c0e";

pub async fn call(app: &Router, method: &str, path: &str, body: Option<Value>) -> (StatusCode, Value) {
    let builder = Request::builder().method(method).uri(path);
    let request = match body {
        Some(body) => builder
            .header("content-type", "application/json")
            .body(Body::from(body.to_string()))
            .unwrap(),
        None => builder.body(Body::empty()).unwrap(),
    };
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = to_bytes(response.into_body(), 16 << 20).await.unwrap();
    let value =
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, value)
}

/// Drop the per-call request id so payloads can be compared.
pub fn without_request_id(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("request_id");
    }
    v
}

#[derive(Debug, Clone, Copy)]
pub enum Upstream {
    /// 401 whose body quotes the bearer token back.
    EchoKeyUnauthorized,
    /// 200 with a completion that is not markup.
    Prose,
    /// 200 with a small wireframe.
    Wireframe,
}

/// A fake chat completions server; returns its URL and the
/// `Authorization` headers it saw.
pub async fn fake_upstream(kind: Upstream) -> (String, Arc<Mutex<Vec<String>>>) {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    let app = Router::new().route(
        "/v1/chat/completions",
        post(move |headers: axum::http::HeaderMap, Json(_body): Json<Value>| {
            let log = log.clone();
            async move {
                let auth = headers
                    .get("authorization")
                    .and_then(|h| h.to_str().ok())
                    .unwrap_or_default()
                    .to_string();
                log.lock().unwrap().push(auth.clone());
                let reply = |text: &str| json!({ "choices": [{ "message": { "role": "assistant", "content": text } }] });
                match kind {
                    Upstream::EchoKeyUnauthorized => (
                        StatusCode::UNAUTHORIZED,
                        Json(json!({ "error": { "message": format!("Incorrect API key provided: {auth}") } })),
                    ),
                    Upstream::Prose => (StatusCode::OK, Json(reply("I am not able to draw that."))),
                    Upstream::Wireframe => (
                        StatusCode::OK,
                        Json(reply(
                            "<html><style>body { width:360px; height:640px; }\n.t { position:absolute; top:10px; left:10px; width:200px; height:40px; }</style><body><p class=t>Hello</p></body></html>",
                        )),
                    ),
                }
            }
        }),
    );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (format!("http://{addr}/v1/chat/completions"), seen)
}

/// In-memory sink for every log line emitted while it is installed.
#[derive(Clone, Default)]
pub struct LogCapture(Arc<Mutex<Vec<u8>>>);

impl LogCapture {
    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.0.lock().unwrap()).into_owned()
    }

    pub fn install(&self) -> tracing::subscriber::DefaultGuard {
        let subscriber = tracing_subscriber::fmt()
            .with_max_level(tracing::Level::TRACE)
            .with_ansi(false)
            .with_writer(self.clone())
            .finish();
        tracing::subscriber::set_default(subscriber)
    }
}

impl io::Write for LogCapture {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        self.0.lock().unwrap().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl<'a> MakeWriter<'a> for LogCapture {
    type Writer = LogCapture;

    fn make_writer(&'a self) -> Self::Writer {
        self.clone()
    }
}
