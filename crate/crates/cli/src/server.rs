//! HTTP service in front of the generation pipeline.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;
use uuid::Uuid;

use wiregen_core::beautify::{beautify, BeautifyReport};
use wiregen_core::dsl::{parse_dsl, serialize, WireframeDocument};
use wiregen_core::generation::mock_generate;
use wiregen_core::render::{render_svg, RenderStyle};
use wiregen_core::{
    assemble_prompt, lint, Backend, GenerationConfig, GenerationError, Lexicon, LintConfig, LintFinding, Mode,
    TrainingExample,
};

/// Shared, read-only service state.
#[derive(Debug, Clone)]
pub struct AppState {
    pub mock: Backend,
    /// Backend used for `"remote"` requests, when one is configured.
    pub remote: Option<Backend>,
    /// Backend used when a request does not name one.
    pub default_remote: bool,
    pub exemplars: Arc<Vec<TrainingExample>>,
    pub lexicon: Arc<Lexicon>,
    pub base_config: GenerationConfig,
}

impl AppState {
    pub fn mock_only() -> Self {
        Self {
            mock: Backend::mock(),
            remote: None,
            default_remote: false,
            exemplars: Arc::new(builtin_exemplars()),
            lexicon: Arc::new(Lexicon::default()),
            base_config: GenerationConfig::default(),
        }
    }

    pub fn with_remote(mut self, remote: Backend, make_default: bool) -> Self {
        self.remote = Some(remote);
        self.default_remote = make_default;
        self
    }
}

/// Few-shot exemplars used when no corpus file is supplied: the offline
/// templates paired with short descriptions.
pub fn builtin_exemplars() -> Vec<TrainingExample> {
    [
        "a login screen with a username field",
        "app settings with notification toggles",
        "a flight booking form",
    ]
    .iter()
    .map(|d| TrainingExample::new(*d, mock_generate(d, 0, 0.0)))
    .collect()
}

pub fn router(state: AppState, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/generate", post(generate))
        .route("/api/beautify", post(beautify_dsl))
        .route("/api/icons", get(icons))
        .route("/healthz", get(healthz))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    #[serde(alias = "zero_shot")]
    ZeroShot,
    #[serde(alias = "few_shot")]
    FewShot,
    #[serde(alias = "fine_tuned")]
    FineTuned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendName {
    Mock,
    Remote,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestConfig {
    pub mode: Option<ModeName>,
    pub k: Option<usize>,
    pub temperature: Option<f64>,
    pub seed: Option<u64>,
    pub backend: Option<BackendName>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateRequest {
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub config: RequestConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub request_id: String,
    pub raw_dsl: String,
    pub beautified_dsl: String,
    pub svg: String,
    /// Flaws in the raw generation, before repair.
    pub findings: Vec<LintFinding>,
    pub report: BeautifyReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BeautifyRequest {
    pub raw_dsl: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeautifyResponse {
    pub beautified_dsl: String,
    pub svg: String,
    pub findings: Vec<LintFinding>,
    pub report: BeautifyReport,
}

struct ApiError {
    status: StatusCode,
    message: String,
    request_id: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
            request_id: None,
        }
    }

    fn with_id(mut self, id: &str) -> Self {
        self.request_id = Some(id.to_string());
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.message, "request_id": self.request_id });
        (self.status, Json(body)).into_response()
    }
}

impl From<GenerationError> for ApiError {
    fn from(err: GenerationError) -> Self {
        let status = if err.is_backend() {
            StatusCode::BAD_GATEWAY
        } else {
            StatusCode::BAD_REQUEST
        };
        ApiError::new(status, err.to_string())
    }
}

struct Polished {
    dsl: String,
    svg: String,
    findings: Vec<LintFinding>,
    report: BeautifyReport,
}

fn polish(raw: &WireframeDocument) -> Polished {
    let findings = lint(raw, &LintConfig::default());
    let (doc, report) = beautify(raw);
    let svg = render_svg(&doc, &RenderStyle::default()).unwrap_or_else(|_| {
        // residual findings can leave a box off screen; draw it clipped
        let style = RenderStyle {
            clip_out_of_canvas: true,
            ..RenderStyle::default()
        };
        render_svg(&doc, &style).expect("clipped rendering accepts any box")
    });
    Polished {
        dsl: serialize(&doc),
        svg,
        findings,
        report,
    }
}

fn generation_config(base: &GenerationConfig, req: &RequestConfig) -> GenerationConfig {
    let mode = match req.mode {
        Some(ModeName::ZeroShot) => Mode::ZeroShot,
        Some(ModeName::FewShot) => Mode::FewShot { k: req.k.unwrap_or(2) },
        Some(ModeName::FineTuned) => Mode::FineTuned,
        None => base.mode,
    };
    GenerationConfig {
        mode,
        temperature: req.temperature.unwrap_or(base.temperature),
        seed: req.seed.or(base.seed),
        ..base.clone()
    }
}

async fn generate(
    State(state): State<AppState>,
    Json(req): Json<GenerateRequest>,
) -> Result<Json<GenerateResponse>, ApiError> {
    let request_id = Uuid::new_v4().to_string();
    if req.description.trim().is_empty() {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "description must not be empty").with_id(&request_id));
    }
    let cfg = generation_config(&state.base_config, &req.config);
    cfg.validate().map_err(|e| ApiError::from(e).with_id(&request_id))?;

    let use_remote = match req.config.backend {
        Some(BackendName::Remote) => true,
        Some(BackendName::Mock) => false,
        None => state.default_remote,
    };
    let backend = if use_remote {
        state.remote.as_ref().ok_or_else(|| {
            ApiError::new(StatusCode::BAD_GATEWAY, "no remote backend is configured").with_id(&request_id)
        })?
    } else {
        &state.mock
    };
    tracing::info!(
        request_id = %request_id,
        remote = use_remote,
        mode = ?cfg.mode,
        chars = req.description.len(),
        "generate"
    );

    let prompt = assemble_prompt(&req.description, cfg.mode, &state.exemplars, cfg.max_tokens)
        .map_err(|e| ApiError::from(e).with_id(&request_id))?;
    let raw_dsl = backend.generate(&prompt, &cfg).await.map_err(|e| {
        tracing::warn!(request_id = %request_id, error = %e, "generation failed");
        ApiError::from(e).with_id(&request_id)
    })?;
    let raw = parse_dsl(&raw_dsl).map_err(|e| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("generated markup is unusable: {e}"),
        )
        .with_id(&request_id)
    })?;
    let polished = polish(&raw);
    Ok(Json(GenerateResponse {
        request_id,
        raw_dsl,
        beautified_dsl: polished.dsl,
        svg: polished.svg,
        findings: polished.findings,
        report: polished.report,
    }))
}

async fn beautify_dsl(Json(req): Json<BeautifyRequest>) -> Result<Json<BeautifyResponse>, ApiError> {
    let raw = parse_dsl(&req.raw_dsl).map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
    let polished = polish(&raw);
    Ok(Json(BeautifyResponse {
        beautified_dsl: polished.dsl,
        svg: polished.svg,
        findings: polished.findings,
        report: polished.report,
    }))
}

async fn icons(State(state): State<AppState>) -> Json<Lexicon> {
    Json(state.lexicon.as_ref().clone())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

/// Bind and serve until the process is stopped.
pub async fn serve(state: AppState, addr: std::net::SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state, static_dir)).await
}
