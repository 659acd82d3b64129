//! JSON-over-HTTP exploration API for a trained point-cloud autoencoder.
//!
//! All routes live under `/api/v1`:
//!
//! | method | path                 | body                                              |
//! |--------|----------------------|---------------------------------------------------|
//! | GET    | `/info`              |                                                   |
//! | GET    | `/items`             |                                                   |
//! | GET    | `/items/{id}`        |                                                   |
//! | POST   | `/decode`            | `{latent}`                                        |
//! | POST   | `/edit`              | `{base_id \| base_latent, sliders, knobs, offset}` |
//! | POST   | `/interpolate`       | `{ids, weights}`                                  |
//! | POST   | `/preview`           | `{base_id \| base_latent, dim}`                    |
//!
//! Errors are `{"error": {"code": ..., "message": ...}}` with status 400 for
//! malformed or out-of-range input, 404 for unknown ids and 503 while no
//! model is loaded.

mod catalog;
mod error;
pub mod handlers;
pub mod wire;

use std::future::Future;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use arc_swap::ArcSwapOption;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path as UrlPath, State};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

pub use axum::http::HeaderValue;
pub use catalog::SessionCatalog;
pub use error::{ApiError, ServiceError};

use latentcloud_core::autoencoder::load_model;
use latentcloud_core::data::DatasetManifest;

/// Shared server state. The catalog is replaced as a whole, never mutated.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    catalog: Arc<ArcSwapOption<SessionCatalog>>,
}

impl AppState {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_catalog(catalog: SessionCatalog) -> Self {
        let state = Self::default();
        state.install(catalog);
        state
    }

    /// Atomically swaps in a new catalog; in-flight requests keep the old one.
    pub fn install(&self, catalog: SessionCatalog) {
        self.catalog.store(Some(Arc::new(catalog)));
    }

    pub fn catalog(&self) -> Option<Arc<SessionCatalog>> {
        self.catalog.load_full()
    }

    fn require(&self) -> Result<Arc<SessionCatalog>, ApiError> {
        self.catalog().ok_or_else(ApiError::not_loaded)
    }
}

/// Loads a model file and a dataset manifest and encodes every entry.
pub fn load_catalog(model: &Path, manifest: &Path) -> Result<SessionCatalog, ServiceError> {
    let model = load_model(model)?;
    let manifest = DatasetManifest::load(manifest)?;
    Ok(SessionCatalog::build(model, manifest)?)
}

#[derive(Debug, Clone, Default)]
pub struct RouterOptions {
    /// Origin allowed by CORS; any origin when `None`.
    pub cors_origin: Option<HeaderValue>,
    /// Directory served for paths outside `/api/v1`.
    pub static_dir: Option<PathBuf>,
}

pub fn router(state: AppState, opts: &RouterOptions) -> Router {
    let api = Router::new()
        .route("/info", get(info))
        .route("/items", get(items))
        .route("/items/{id}", get(item))
        .route("/decode", post(decode))
        .route("/edit", post(edit))
        .route("/interpolate", post(interpolate))
        .route("/preview", post(preview))
        .with_state(state);

    let origin = match &opts.cors_origin {
        Some(o) => AllowOrigin::exact(o.clone()),
        None => AllowOrigin::from(Any),
    };
    let cors = CorsLayer::new()
        .allow_origin(origin)
        .allow_methods(Any)
        .allow_headers(Any);

    let mut app = Router::new().nest("/api/v1", api);
    if let Some(dir) = &opts.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    app.layer(cors)
}

/// Serves `app` on `listener` until `shutdown` resolves, then drains
/// in-flight requests.
pub async fn serve(
    listener: TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> Result<(), ServiceError> {
    let addr = listener.local_addr().map_err(|source| ServiceError::Bind {
        addr: "listener".into(),
        source,
    })?;
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await
        .map_err(|source| ServiceError::Serve { addr, source })
}

pub async fn bind(addr: &str) -> Result<TcpListener, ServiceError> {
    TcpListener::bind(addr)
        .await
        .map_err(|source| ServiceError::Bind {
            addr: addr.to_string(),
            source,
        })
}

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn info(State(s): State<AppState>) -> ApiResult<wire::InfoResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::info(&cat)))
}

async fn items(State(s): State<AppState>) -> ApiResult<wire::ItemsResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::items(&cat)))
}

async fn item(
    State(s): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<wire::ItemDetail> {
    let cat = s.require()?;
    Ok(Json(handlers::item(&cat, &id)?))
}

async fn decode(
    State(s): State<AppState>,
    body: Result<Json<wire::DecodeRequest>, JsonRejection>,
) -> ApiResult<wire::DecodeResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::decode(&cat, &body?.0)?))
}

async fn edit(
    State(s): State<AppState>,
    body: Result<Json<wire::EditRequest>, JsonRejection>,
) -> ApiResult<wire::EditResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::edit(&cat, &body?.0)?))
}

async fn interpolate(
    State(s): State<AppState>,
    body: Result<Json<wire::InterpolateRequest>, JsonRejection>,
) -> ApiResult<wire::InterpolateResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::interpolate_items(&cat, &body?.0)?))
}

async fn preview(
    State(s): State<AppState>,
    body: Result<Json<wire::PreviewRequest>, JsonRejection>,
) -> ApiResult<wire::PreviewResponse> {
    let cat = s.require()?;
    Ok(Json(handlers::preview(&cat, &body?.0)?))
}
