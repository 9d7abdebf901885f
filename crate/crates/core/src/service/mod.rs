//! Read-only HTTP/JSON API over an immutable graph and cube store.

mod analytics;
mod error;
mod explore;

use std::collections::BTreeSet;
use std::future::Future;
use std::sync::Arc;

use axum::http::{HeaderValue, Method};
use axum::routing::get;
use axum::Router;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::ApiError;

use crate::cube::{precompute, CubeError, CubeSpec, CubeStore};
use crate::graph::KnowledgeGraph;
use crate::soc::DepthWindow;

pub const DEFAULT_PAGE_LIMIT: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("cube store fingerprint {store} does not match the graph ({graph})")]
    StaleStore { store: String, graph: String },
    #[error(transparent)]
    Cube(#[from] CubeError),
}

/// Everything a request can read.
#[derive(Debug)]
pub struct AppState {
    pub graph: KnowledgeGraph,
    pub store: CubeStore,
}

impl AppState {
    /// Pairs a graph with a store built from the same content.
    pub fn new(graph: KnowledgeGraph, store: CubeStore) -> Result<Self, StateError> {
        store.spec.validate(graph.ontology())?;
        let fingerprint = crate::cube::graph_fingerprint(&graph);
        if store.metadata.fingerprint != fingerprint {
            return Err(StateError::StaleStore {
                store: store.metadata.fingerprint,
                graph: fingerprint,
            });
        }
        Ok(AppState { graph, store })
    }

    /// Builds the store in memory.
    pub fn precomputed(graph: KnowledgeGraph, spec: &CubeSpec) -> Result<Self, StateError> {
        let store = precompute(&graph, spec)?;
        Ok(AppState { graph, store })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ServiceConfig {
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
}

pub fn router(state: Arc<AppState>, cfg: &ServiceConfig) -> Router {
    let origin = match &cfg.cors_origin {
        Some(o) => match HeaderValue::from_str(o) {
            Ok(v) => AllowOrigin::exact(v),
            Err(_) => AllowOrigin::list([]),
        },
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_methods([Method::GET]).allow_origin(origin);
    Router::new()
        .route("/api/v1/stats", get(explore::stats))
        .route("/api/v1/cube/soc-stock", get(analytics::cube_soc_stock))
        .route("/api/v1/analytics/soc-stock", get(analytics::grouped_soc_stock))
        .route("/api/v1/treatments", get(explore::treatments))
        .route("/api/v1/treatments/facets", get(explore::treatment_facets))
        .route("/api/v1/experimental-units", get(explore::units))
        .route("/api/v1/experimental-units/{uid}", get(explore::unit_detail))
        .route("/api/v1/experimental-units/{uid}/samples", get(explore::unit_samples))
        .route("/api/v1/ontology", get(explore::ontology_graph))
        .route("/api/v1/ontology/classes/{name}", get(explore::class_detail))
        .route("/docs/{name}", get(explore::concept_page))
        .fallback(|| async { ApiError::not_found("not-found", "no such route") })
        .layer(cors)
        .with_state(state)
}

/// Serves until `shutdown` resolves, then drains in-flight requests.
pub async fn serve(
    listener: TcpListener,
    app: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await
}

/// Query parameters with each name used at most once.
pub(crate) struct Params(Vec<(String, String)>);

impl Params {
    pub(crate) fn new(pairs: Vec<(String, String)>) -> Result<Self, ApiError> {
        let mut seen = BTreeSet::new();
        for (k, _) in &pairs {
            if !seen.insert(k.as_str()) {
                return Err(ApiError::bad_request("duplicate-parameter", format!("`{k}` given more than once")));
            }
        }
        Ok(Params(pairs))
    }

    pub(crate) fn take(&mut self, name: &str) -> Option<String> {
        let i = self.0.iter().position(|(k, _)| k == name)?;
        Some(self.0.remove(i).1)
    }

    pub(crate) fn take_usize(&mut self, name: &str, default: usize) -> Result<usize, ApiError> {
        match self.take(name) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| ApiError::bad_request("invalid-parameter", format!("`{name}` must be a non-negative integer"))),
        }
    }

    /// `depthUpperCm` and `depthLowerCm`, each defaulting to `default`'s bound.
    pub(crate) fn take_window(&mut self, default: DepthWindow) -> Result<DepthWindow, ApiError> {
        let mut bound = |name: &str, fallback: f64| match self.take(name) {
            None => Ok(fallback),
            Some(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|d| d.is_finite() && *d >= 0.0)
                .ok_or_else(|| {
                    ApiError::bad_request("invalid-depth", format!("`{name}` must be a non-negative number, got `{v}`"))
                }),
        };
        let upper = bound("depthUpperCm", default.upper_cm)?;
        let lower = bound("depthLowerCm", default.lower_cm)?;
        DepthWindow::new(upper, lower).map_err(|_| {
            ApiError::unprocessable(
                "invalid-window",
                format!("depthUpperCm ({upper}) must be less than depthLowerCm ({lower})"),
            )
        })
    }

    pub(crate) fn take_page(&mut self) -> Result<(usize, usize), ApiError> {
        Ok((self.take_usize("limit", DEFAULT_PAGE_LIMIT)?, self.take_usize("offset", 0)?))
    }

    pub(crate) fn into_rest(self) -> Vec<(String, String)> {
        self.0
    }

    /// Fails on any parameter not consumed yet.
    pub(crate) fn finish(self) -> Result<(), ApiError> {
        match self.0.first() {
            None => Ok(()),
            Some((k, _)) => Err(ApiError::bad_request("unknown-parameter", format!("unknown parameter `{k}`"))),
        }
    }
}
