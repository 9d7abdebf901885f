use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::Json;
use serde::Serialize;

use super::{ApiError, AppState, Params};
use crate::cube::{describe, evaluate_live, lookup, Combination, CubeCell, CubeError, ANY};
use crate::soc::{grouped_mean_stock, AggregateResult, DepthWindow, GroupBy};

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CubeResponse {
    pub source: &'static str,
    pub key: String,
    pub dimensions: BTreeMap<String, String>,
    pub depth_upper_cm: f64,
    pub depth_lower_cm: f64,
    #[serde(flatten)]
    pub cell: CubeCell,
}

#[derive(Debug, Serialize)]
pub struct GroupRow {
    pub uid: String,
    #[serde(flatten)]
    pub result: AggregateResult,
}

fn cube_error(e: CubeError) -> ApiError {
    match e {
        CubeError::UnknownDimension(_) => ApiError::bad_request("unknown-dimension", e.to_string()),
        CubeError::InvalidValue { .. } => ApiError::bad_request("invalid-value", e.to_string()),
        CubeError::Mismatch { .. } | CubeError::BadKey(_) => ApiError::bad_request("invalid-key", e.to_string()),
        other => ApiError::internal(other.to_string()),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

pub(super) async fn cube_soc_stock(
    State(st): State<Arc<AppState>>,
    Query(pairs): Query<Vec<(String, String)>>,
) -> Result<Json<CubeResponse>, ApiError> {
    let mut params = Params::new(pairs)?;
    let spec = &st.store.spec;
    let stored_window = spec.window().map_err(cube_error)?;
    let window = params.take_window(stored_window)?;
    let rest = params.into_rest();
    let pairs = rest
        .iter()
        .map(|(k, v)| (k.as_str(), if v.is_empty() { ANY } else { v.as_str() }));
    let combo = Combination::from_pairs(spec, pairs).map_err(cube_error)?.canonical(spec);
    let key = combo.key(spec);
    let dimensions = describe(spec, &combo);
    let respond = |source, cell| CubeResponse {
        source,
        key: key.clone(),
        dimensions: dimensions.clone(),
        depth_upper_cm: window.upper_cm,
        depth_lower_cm: window.lower_cm,
        cell,
    };

    if window == stored_window {
        match lookup(&st.store, &combo) {
            Ok(cell) => return Ok(Json(respond("cube", cell))),
            Err(CubeError::KeyNotPrecomputed(_)) => {}
            Err(e) => return Err(cube_error(e)),
        }
    }
    let st = st.clone();
    let cell = blocking(move || {
        let mut spec = st.store.spec.clone();
        spec.window_upper_cm = window.upper_cm;
        spec.window_lower_cm = window.lower_cm;
        evaluate_live(&st.graph, &spec, &combo).map_err(cube_error)
    })
    .await?;
    Ok(Json(respond("live", cell)))
}

pub(super) async fn grouped_soc_stock(
    State(st): State<Arc<AppState>>,
    Query(pairs): Query<Vec<(String, String)>>,
) -> Result<Json<Vec<GroupRow>>, ApiError> {
    let mut params = Params::new(pairs)?;
    let group_by: GroupBy = params
        .take("groupBy")
        .unwrap_or_else(|| "treatment".to_string())
        .parse()
        .map_err(|e: crate::soc::SocError| {
            ApiError::bad_request("invalid-group-by", e.to_string())
                .with_details(serde_json::json!({ "allowed": ["treatment", "field", "site"] }))
        })?;
    let window = params.take_window(DepthWindow::default())?;
    params.finish()?;
    let rows = blocking(move || {
        grouped_mean_stock(&st.graph, group_by, window).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await?;
    Ok(Json(rows.into_iter().map(|(uid, result)| GroupRow { uid, result }).collect()))
}
