use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap};
use axum::response::{Html, IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use super::{ApiError, AppState, Params};
use crate::graph::{facet_options, filter_treatments, EntityId, FacetField, GraphStats, KnowledgeGraph, TreatmentFilter};
use crate::ontology::concept_doc;
use crate::soc::unit_path;
use crate::value::{parse_date, Scalar};
use crate::vocab::{self, SampleKind, SAMPLE_KINDS};

type Pairs = Query<Vec<(String, String)>>;

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Page<T> {
    pub total: usize,
    pub limit: usize,
    pub offset: usize,
    pub items: Vec<T>,
}

fn page<T>(all: Vec<T>, limit: usize, offset: usize) -> Page<T> {
    let total = all.len();
    let items = all.into_iter().skip(offset).take(limit).collect();
    Page { total, limit, offset, items }
}

pub(super) async fn stats(State(st): State<Arc<AppState>>) -> Json<GraphStats> {
    Json(st.graph.stats())
}

fn take_filter(params: Params) -> Result<TreatmentFilter, ApiError> {
    let mut f = TreatmentFilter::default();
    for (k, v) in params.into_rest() {
        let field = FacetField::from_key(&k)
            .ok_or_else(|| ApiError::bad_request("unknown-parameter", format!("unknown facet `{k}`")))?;
        if v.is_empty() {
            continue;
        }
        f.set(field, &v)
            .map_err(|e| ApiError::bad_request("invalid-facet-value", e.to_string()))?;
    }
    Ok(f)
}

fn uids(g: &KnowledgeGraph, ids: impl IntoIterator<Item = EntityId>) -> Vec<String> {
    let mut out: Vec<String> = ids.into_iter().map(|i| g.entity(i).uid.clone()).collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreatmentItem<'a> {
    pub uid: &'a str,
    pub values: &'a BTreeMap<String, Scalar>,
    pub experimental_units: Vec<String>,
}

pub(super) async fn treatments(State(st): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Response, ApiError> {
    let mut params = Params::new(pairs)?;
    let (limit, offset) = params.take_page()?;
    let filter = take_filter(params)?;
    let g = &st.graph;
    let items = filter_treatments(g, &filter)
        .into_iter()
        .map(|t| TreatmentItem {
            uid: &g.entity(t).uid,
            values: &g.entity(t).values,
            experimental_units: uids(g, g.subjects(t, vocab::HAS_TREATMENT)),
        })
        .collect();
    Ok(Json(page(items, limit, offset)).into_response())
}

#[derive(Debug, Serialize)]
pub struct FacetResponse {
    pub total: usize,
    pub facets: BTreeMap<FacetField, Vec<String>>,
}

pub(super) async fn treatment_facets(
    State(st): State<Arc<AppState>>,
    Query(pairs): Pairs,
) -> Result<Json<FacetResponse>, ApiError> {
    let filter = take_filter(Params::new(pairs)?)?;
    Ok(Json(FacetResponse {
        total: filter_treatments(&st.graph, &filter).len(),
        facets: facet_options(&st.graph, &filter),
    }))
}

pub(super) async fn units(State(st): State<Arc<AppState>>, Query(pairs): Pairs) -> Result<Json<Page<String>>, ApiError> {
    let mut params = Params::new(pairs)?;
    let (limit, offset) = params.take_page()?;
    params.finish()?;
    let g = &st.graph;
    Ok(Json(page(uids(g, g.ids_of(vocab::EXPERIMENTAL_UNIT)), limit, offset)))
}

fn unit_id(g: &KnowledgeGraph, uid: &str) -> Result<EntityId, ApiError> {
    g.find(vocab::EXPERIMENTAL_UNIT, uid)
        .ok_or_else(|| ApiError::not_found("unknown-unit", format!("no experimental unit `{uid}`")))
}

#[derive(Debug, Serialize)]
pub struct Location {
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UnitDetail<'a> {
    pub uid: &'a str,
    pub values: &'a BTreeMap<String, Scalar>,
    pub location: Option<Location>,
    pub treatments: Vec<String>,
    pub fields: Vec<String>,
    pub sites: Vec<String>,
    pub sample_counts: BTreeMap<&'static str, usize>,
}

pub(super) async fn unit_detail(State(st): State<Arc<AppState>>, Path(uid): Path<String>) -> Result<Response, ApiError> {
    let g = &st.graph;
    let id = unit_id(g, &uid)?;
    let e = g.entity(id);
    let coord = |p: &str| e.get(p).and_then(Scalar::as_f64);
    let (latitude, longitude) = (coord(vocab::UNIT_LATITUDE), coord(vocab::UNIT_LONGITUDE));
    let reach = |class: &str| uids(g, unit_path(g, class).map(|p| g.follow(id, &p)).unwrap_or_default());
    let detail = UnitDetail {
        uid: &e.uid,
        values: &e.values,
        location: (latitude.is_some() || longitude.is_some()).then_some(Location { latitude, longitude }),
        treatments: reach(vocab::TREATMENT),
        fields: reach(vocab::FIELD),
        sites: reach(vocab::SITE),
        sample_counts: SAMPLE_KINDS
            .iter()
            .map(|k| (k.key, g.objects(id, k.link).count()))
            .collect(),
    };
    Ok(Json(detail).into_response())
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleRow {
    pub uid: String,
    pub date: Option<String>,
    pub upper_cm: Option<f64>,
    pub lower_cm: Option<f64>,
    pub values: BTreeMap<String, Scalar>,
}

#[derive(Debug, Serialize)]
pub struct SampleSeries {
    pub unit: String,
    pub kind: &'static str,
    pub properties: Vec<String>,
    pub rows: Vec<SampleRow>,
}

/// Resolves a property name for `class`, exactly or else ASCII case-insensitively.
fn resolve_property(g: &KnowledgeGraph, class: &str, name: &str) -> Option<String> {
    let props = g.ontology().data_properties_of(class);
    props
        .iter()
        .find(|p| p.name == name)
        .or_else(|| {
            let mut ci = props.iter().filter(|p| p.name.eq_ignore_ascii_case(name));
            let first = ci.next();
            first.filter(|_| ci.next().is_none())
        })
        .map(|p| p.name.clone())
}

pub(super) async fn unit_samples(
    State(st): State<Arc<AppState>>,
    Path(uid): Path<String>,
    Query(pairs): Pairs,
) -> Result<Json<SampleSeries>, ApiError> {
    let g = &st.graph;
    let id = unit_id(g, &uid)?;
    let mut params = Params::new(pairs)?;
    let kind_name = params
        .take("kind")
        .ok_or_else(|| ApiError::bad_request("missing-parameter", "`kind` is required"))?;
    let kind = SampleKind::by_key(&kind_name).ok_or_else(|| {
        ApiError::bad_request("unknown-kind", format!("unknown sample kind `{kind_name}`"))
            .with_details(serde_json::json!({ "allowed": SAMPLE_KINDS.iter().map(|k| k.key).collect::<Vec<_>>() }))
    })?;
    let requested = params.take("properties");
    params.finish()?;

    let samples: Vec<EntityId> = g.objects(id, kind.link).collect();
    let properties: Vec<String> = match requested.as_deref().filter(|s| !s.trim().is_empty()) {
        Some(list) => list
            .split(',')
            .map(|p| {
                resolve_property(g, kind.class, p.trim()).ok_or_else(|| {
                    ApiError::bad_request("unknown-property", format!("`{}` is not a property of {}", p.trim(), kind.class))
                })
            })
            .collect::<Result<_, _>>()?,
        None => {
            let mut all: Vec<String> = samples
                .iter()
                .flat_map(|&s| g.entity(s).values.keys().cloned())
                .collect();
            all.sort();
            all.dedup();
            all
        }
    };

    let mut rows: Vec<SampleRow> = samples
        .iter()
        .map(|&s| {
            let e = g.entity(s);
            SampleRow {
                uid: e.uid.clone(),
                date: e.get(kind.date).and_then(Scalar::as_date).map(|d| d.to_string()),
                upper_cm: e.get(kind.upper).and_then(Scalar::as_f64),
                lower_cm: e.get(kind.lower).and_then(Scalar::as_f64),
                values: properties
                    .iter()
                    .filter_map(|p| e.get(p).map(|v| (p.clone(), v.clone())))
                    .collect(),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.date.is_none(), &a.date)
            .cmp(&(b.date.is_none(), &b.date))
            .then(a.upper_cm.unwrap_or(f64::MAX).total_cmp(&b.upper_cm.unwrap_or(f64::MAX)))
            .then_with(|| a.uid.cmp(&b.uid))
    });
    Ok(Json(SampleSeries {
        unit: uid,
        kind: kind.key,
        properties,
        rows,
    }))
}

#[derive(Debug, Serialize)]
pub struct OntologyNode<'a> {
    pub name: &'a str,
    pub instances: usize,
    pub comment: Option<&'a str>,
}

#[derive(Debug, Serialize)]
pub struct OntologyEdge<'a> {
    pub name: &'a str,
    pub source: &'a str,
    pub target: &'a str,
}

#[derive(Debug, Serialize)]
pub struct OntologyGraph<'a> {
    pub nodes: Vec<OntologyNode<'a>>,
    pub edges: Vec<OntologyEdge<'a>>,
}

pub(super) async fn ontology_graph(State(st): State<Arc<AppState>>) -> Response {
    let g = &st.graph;
    let o = g.ontology();
    let body = OntologyGraph {
        nodes: o
            .classes()
            .iter()
            .map(|c| OntologyNode {
                name: &c.name,
                instances: g.ids_of(&c.name).len(),
                comment: c.comment.as_deref(),
            })
            .collect(),
        edges: o
            .object_properties()
            .iter()
            .map(|p| OntologyEdge {
                name: &p.name,
                source: &p.domain,
                target: &p.range,
            })
            .collect(),
    };
    Json(body).into_response()
}

/// Narrowest type every sample parses as.
pub fn infer_type(samples: &[String]) -> Option<&'static str> {
    if samples.is_empty() {
        return None;
    }
    let all = |f: &dyn Fn(&str) -> bool| samples.iter().all(|s| f(s));
    Some(if all(&|s| s.parse::<i64>().is_ok()) {
        "integer"
    } else if all(&|s| s.parse::<f64>().is_ok()) {
        "float"
    } else if all(&|s| s == "true" || s == "false") {
        "boolean"
    } else if all(&|s| parse_date(s).is_some()) {
        "date"
    } else {
        "string"
    })
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PropertyDetail<'a> {
    pub name: &'a str,
    pub range: String,
    pub comment: Option<&'a str>,
    pub samples: Vec<String>,
    pub inferred_type: Option<&'static str>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDetail<'a> {
    pub name: &'a str,
    pub comment: Option<&'a str>,
    pub instances: usize,
    pub data_properties: Vec<PropertyDetail<'a>>,
    pub outgoing: Vec<OntologyEdge<'a>>,
    pub incoming: Vec<OntologyEdge<'a>>,
}

pub const MAX_SAMPLE_VALUES: usize = 5;

pub(super) async fn class_detail(State(st): State<Arc<AppState>>, Path(name): Path<String>) -> Result<Response, ApiError> {
    let g = &st.graph;
    let o = g.ontology();
    let class = o
        .class(&name)
        .ok_or_else(|| ApiError::not_found("unknown-class", format!("no class `{name}`")))?;
    let instances = g.entities_of(&class.name);
    let data_properties = o
        .data_properties_of(&class.name)
        .into_iter()
        .map(|p| {
            let mut values: Vec<&Scalar> = instances.iter().filter_map(|e| e.get(&p.name)).collect();
            values.sort();
            values.dedup();
            let samples: Vec<String> = values.into_iter().take(MAX_SAMPLE_VALUES).map(Scalar::lexical).collect();
            PropertyDetail {
                name: &p.name,
                range: p.range.to_string(),
                comment: p.comment.as_deref(),
                inferred_type: infer_type(&samples),
                samples,
            }
        })
        .collect();
    let edges = |pick: &dyn Fn(&crate::ontology::ObjectPropertyDef) -> bool| {
        o.object_properties()
            .iter()
            .filter(|p| pick(p))
            .map(|p| OntologyEdge {
                name: &p.name,
                source: &p.domain,
                target: &p.range,
            })
            .collect()
    };
    let body = ClassDetail {
        name: &class.name,
        comment: class.comment.as_deref(),
        instances: instances.len(),
        data_properties,
        outgoing: edges(&|p| p.domain == class.name),
        incoming: edges(&|p| p.range == class.name),
    };
    Ok(Json(body).into_response())
}

fn wants_json(headers: &HeaderMap) -> bool {
    let accept = headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_ascii_lowercase();
    accept.contains("application/json") && !accept.contains("text/html")
}

pub(super) async fn concept_page(
    State(st): State<Arc<AppState>>,
    Path(name): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let doc = concept_doc(st.graph.ontology(), &name)
        .map_err(|_| ApiError::not_found("unknown-concept", format!("no concept `{name}`")))?;
    Ok(if wants_json(&headers) {
        Json(doc).into_response()
    } else {
        Html(doc.to_html()).into_response()
    })
}
