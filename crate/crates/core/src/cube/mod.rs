//! SOC-stock data cube: categorical dimensions with an ANY wildcard,
//! precomputed cells, and live evaluation of arbitrary combinations.

mod store;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{parse_flag, EntityId, KnowledgeGraph};
use crate::ontology::{Ontology, Range};
use crate::soc::{aggregate, assemble_profiles, evaluate_profiles, unit_path, AggregateResult, DepthWindow, ProfileStock};
use crate::value::{parse_date, Scalar};
use crate::vocab;

pub use store::{graph_fingerprint, load_store, save_store, store_from_str, store_to_string, BuildMetadata, CubeStore};

/// The bundled three-dimension spec.
pub const DEFAULT_CUBE_JSON: &str = include_str!("../../data/cube.json");

/// Rendering of the wildcard in canonical keys.
pub const ANY: &str = "*";

const KEY_ENCODE: &AsciiSet = &CONTROLS.add(b'&').add(b'=').add(b'%').add(b'*');

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CubeError {
    #[error("invalid cube spec: {0}")]
    InvalidSpec(String),
    #[error("combination has {found} values, spec has {expected} dimensions")]
    Mismatch { expected: usize, found: usize },
    #[error("unknown dimension `{0}`")]
    UnknownDimension(String),
    #[error("`{value}` is not a valid value for dimension `{dimension}`")]
    InvalidValue { dimension: String, value: String },
    #[error("key `{0}` is not precomputed")]
    KeyNotPrecomputed(String),
    #[error("malformed key `{0}`")]
    BadKey(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeDimension {
    pub name: String,
    pub class: String,
    pub property: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Fact {
    #[default]
    SocStock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CubeSpec {
    #[serde(default)]
    pub fact: Fact,
    pub window_upper_cm: f64,
    pub window_lower_cm: f64,
    pub dimensions: Vec<CubeDimension>,
}

impl CubeSpec {
    pub fn from_json(text: &str) -> Result<Self, CubeError> {
        serde_json::from_str(text).map_err(|e| CubeError::InvalidSpec(e.to_string()))
    }

    pub fn default_spec() -> Self {
        Self::from_json(DEFAULT_CUBE_JSON).expect("bundled cube spec parses")
    }

    pub fn window(&self) -> Result<DepthWindow, CubeError> {
        DepthWindow::new(self.window_upper_cm, self.window_lower_cm).map_err(|e| CubeError::InvalidSpec(e.to_string()))
    }

    pub fn dimension(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    /// Π(|values| + 1).
    pub fn cell_count(&self) -> usize {
        self.dimensions.iter().map(|d| d.values.len() + 1).product()
    }

    pub fn validate(&self, o: &Ontology) -> Result<(), CubeError> {
        let bad = |m: String| Err(CubeError::InvalidSpec(m));
        self.window()?;
        for (i, d) in self.dimensions.iter().enumerate() {
            if d.name.is_empty() || d.name.contains(['&', '=', '\t']) {
                return bad(format!("invalid dimension name `{}`", d.name));
            }
            if self.dimensions[..i].iter().any(|e| e.name == d.name) {
                return bad(format!("duplicate dimension `{}`", d.name));
            }
            if d.values.is_empty() {
                return bad(format!("dimension `{}` has no values", d.name));
            }
            for (j, v) in d.values.iter().enumerate() {
                if v == ANY || d.values[..j].iter().any(|w| w.eq_ignore_ascii_case(v)) {
                    return bad(format!("dimension `{}`: value `{v}` is reserved or repeated", d.name));
                }
            }
            match o.data_property(&d.property) {
                Some(p) if p.domain == d.class => {}
                _ => return bad(format!("`{}` is not a data property of `{}`", d.property, d.class)),
            }
            if o.property_path(vocab::EXPERIMENTAL_UNIT, &d.class).is_none() {
                return bad(format!("`{}` is not reachable from experimental units", d.class));
            }
            for v in &d.values {
                Matcher::new(o, d, v)?;
            }
        }
        Ok(())
    }
}

/// One value (or ANY) per dimension.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Combination(pub Vec<Option<String>>);

impl Combination {
    pub fn all_any(spec: &CubeSpec) -> Self {
        Combination(vec![None; spec.dimensions.len()])
    }

    /// `dim=value&…` in dimension order, ANY as `*`.
    pub fn key(&self, spec: &CubeSpec) -> String {
        self.0
            .iter()
            .zip(&spec.dimensions)
            .map(|(v, d)| match v {
                None => format!("{}={ANY}", d.name),
                Some(v) => format!("{}={}", d.name, utf8_percent_encode(v, KEY_ENCODE)),
            })
            .collect::<Vec<_>>()
            .join("&")
    }

    pub fn parse_key(spec: &CubeSpec, key: &str) -> Result<Self, CubeError> {
        let bad = || CubeError::BadKey(key.to_string());
        let parts: Vec<&str> = if key.is_empty() { vec![] } else { key.split('&').collect() };
        if parts.len() != spec.dimensions.len() {
            return Err(bad());
        }
        let mut values = Vec::with_capacity(parts.len());
        for (part, d) in parts.iter().zip(&spec.dimensions) {
            let (name, v) = part.split_once('=').ok_or_else(bad)?;
            if name != d.name {
                return Err(bad());
            }
            values.push(if v == ANY {
                None
            } else {
                Some(percent_decode_str(v).decode_utf8().map_err(|_| bad())?.into_owned())
            });
        }
        Ok(Combination(values))
    }

    /// Builds a combination from named values; unnamed dimensions are ANY.
    pub fn from_pairs<'a>(
        spec: &CubeSpec,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, CubeError> {
        let mut c = Combination::all_any(spec);
        for (name, value) in pairs {
            let i = spec.dimension(name).ok_or_else(|| CubeError::UnknownDimension(name.to_string()))?;
            c.0[i] = (value != ANY).then(|| value.to_string());
        }
        Ok(c)
    }

    /// Replaces each value with the spec's spelling when it matches one
    /// case-insensitively.
    pub fn canonical(&self, spec: &CubeSpec) -> Self {
        Combination(
            self.0
                .iter()
                .zip(&spec.dimensions)
                .map(|(v, d)| {
                    v.as_ref().map(|v| {
                        d.values
                            .iter()
                            .find(|s| s.eq_ignore_ascii_case(v))
                            .cloned()
                            .unwrap_or_else(|| v.clone())
                    })
                })
                .collect(),
        )
    }

    fn check(&self, spec: &CubeSpec) -> Result<(), CubeError> {
        if self.0.len() != spec.dimensions.len() {
            return Err(CubeError::Mismatch {
                expected: spec.dimensions.len(),
                found: self.0.len(),
            });
        }
        Ok(())
    }
}

/// Every combination, values in spec order with ANY last, first dimension
/// most significant.
pub fn generate_combinations(spec: &CubeSpec) -> Vec<Combination> {
    let mut out = vec![Vec::new()];
    for d in &spec.dimensions {
        let options: Vec<Option<String>> = d.values.iter().cloned().map(Some).chain([None]).collect();
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<Option<String>>| {
                options.iter().map(move |o| {
                    let mut c = prefix.clone();
                    c.push(o.clone());
                    c
                })
            })
            .collect();
    }
    out.into_iter().map(Combination).collect()
}

/// An aggregate cell; the mean is absent when no profile survives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubeCell {
    #[serde(rename = "mean_stock_kgC_per_ha")]
    pub mean_stock_kgc_per_ha: Option<f64>,
    pub n_samples: usize,
    pub n_units: usize,
}

impl From<Option<AggregateResult>> for CubeCell {
    fn from(a: Option<AggregateResult>) -> Self {
        match a {
            Some(a) => CubeCell {
                mean_stock_kgc_per_ha: Some(a.mean_stock_kgc_per_ha),
                n_samples: a.n_samples,
                n_units: a.n_units,
            },
            None => CubeCell {
                mean_stock_kgc_per_ha: None,
                n_samples: 0,
                n_units: 0,
            },
        }
    }
}

/// Equality test of a dimension value against stored scalars.
enum Matcher {
    Text(String),
    Flag(bool),
    Number(f64),
    Date(chrono::NaiveDate),
}

impl Matcher {
    fn new(o: &Ontology, d: &CubeDimension, value: &str) -> Result<Self, CubeError> {
        let invalid = || CubeError::InvalidValue {
            dimension: d.name.clone(),
            value: value.to_string(),
        };
        let range = o.data_property(&d.property).map(|p| p.range).ok_or_else(invalid)?;
        Ok(match range {
            Range::String => Matcher::Text(value.to_string()),
            Range::Bool => Matcher::Flag(match value.to_ascii_lowercase().as_str() {
                "applied" => true,
                "not-applied" => false,
                other => parse_flag(other).ok_or_else(invalid)?,
            }),
            Range::Float | Range::Int => Matcher::Number(value.parse().map_err(|_| invalid())?),
            Range::Date => Matcher::Date(parse_date(value).ok_or_else(invalid)?),
        })
    }

    fn matches(&self, v: &Scalar) -> bool {
        match (self, v) {
            (Matcher::Text(t), Scalar::Str(s)) => s.eq_ignore_ascii_case(t),
            (Matcher::Flag(f), Scalar::Bool(b)) => f == b,
            (Matcher::Number(n), v) => v.as_f64() == Some(*n),
            (Matcher::Date(d), Scalar::Date(x)) => d == x,
            _ => false,
        }
    }
}

/// Units whose entity reached via `path` carries a value matching `m`.
fn matching_units(g: &KnowledgeGraph, path: &[String], property: &str, m: &Matcher) -> Vec<bool> {
    let mut out = vec![false; g.entities().len()];
    for u in g.ids_of(vocab::EXPERIMENTAL_UNIT) {
        out[u] = g
            .follow(u, path)
            .into_iter()
            .any(|t| g.entity(t).get(property).is_some_and(|v| m.matches(v)));
    }
    out
}

fn dimension_path(g: &KnowledgeGraph, d: &CubeDimension) -> Result<Vec<String>, CubeError> {
    unit_path(g, &d.class).ok_or_else(|| CubeError::InvalidSpec(format!("`{}` is not reachable", d.class)))
}

/// Experimental units satisfying every non-ANY value of `c`.
pub fn select_units(g: &KnowledgeGraph, spec: &CubeSpec, c: &Combination) -> Result<Vec<EntityId>, CubeError> {
    c.check(spec)?;
    let mut keep: Vec<EntityId> = g.ids_of(vocab::EXPERIMENTAL_UNIT).collect();
    for (v, d) in c.0.iter().zip(&spec.dimensions) {
        let Some(v) = v else { continue };
        let m = Matcher::new(g.ontology(), d, v)?;
        let path = dimension_path(g, d)?;
        keep.retain(|&u| {
            g.follow(u, &path)
                .into_iter()
                .any(|t| g.entity(t).get(&d.property).is_some_and(|x| m.matches(x)))
        });
    }
    Ok(keep)
}

/// Evaluates one combination from scratch: select units, assemble and
/// evaluate their profiles, pool the surviving stocks.
pub fn evaluate_live(g: &KnowledgeGraph, spec: &CubeSpec, c: &Combination) -> Result<CubeCell, CubeError> {
    let window = spec.window()?;
    let units = select_units(g, spec, c)?;
    let (profiles, _) = assemble_profiles(g, &units);
    let (stocks, _) = evaluate_profiles(&profiles, window);
    Ok(aggregate(&stocks).into())
}

/// Every cell of the spec, computed from one shared pass over the profiles.
pub fn precompute(g: &KnowledgeGraph, spec: &CubeSpec) -> Result<CubeStore, CubeError> {
    spec.validate(g.ontology())?;
    let window = spec.window()?;
    let units: Vec<EntityId> = g.ids_of(vocab::EXPERIMENTAL_UNIT).collect();
    let (profiles, _) = assemble_profiles(g, &units);
    let (stocks, _) = evaluate_profiles(&profiles, window);

    let mut masks: Vec<Vec<Vec<bool>>> = Vec::with_capacity(spec.dimensions.len());
    for d in &spec.dimensions {
        let path = dimension_path(g, d)?;
        let per_value = d
            .values
            .iter()
            .map(|v| Ok(matching_units(g, &path, &d.property, &Matcher::new(g.ontology(), d, v)?)))
            .collect::<Result<Vec<_>, CubeError>>()?;
        masks.push(per_value);
    }

    let combos = generate_combinations(spec);
    let cells: HashMap<String, CubeCell> = combos
        .par_iter()
        .map(|c| {
            let idx: Vec<Option<usize>> = c
                .0
                .iter()
                .zip(&spec.dimensions)
                .map(|(v, d)| v.as_ref().map(|v| d.values.iter().position(|x| x == v).expect("generated value")))
                .collect();
            let selected = stocks.iter().filter(|s: &&ProfileStock| {
                idx.iter()
                    .enumerate()
                    .all(|(di, vi)| vi.is_none_or(|vi| masks[di][vi][s.unit]))
            });
            (c.key(spec), CubeCell::from(aggregate(selected)))
        })
        .collect();

    Ok(CubeStore {
        spec: spec.clone(),
        cells,
        metadata: BuildMetadata {
            fingerprint: graph_fingerprint(g),
            created: store::build_timestamp(),
        },
    })
}

/// Stored cell for `c`. Values outside the spec's lists are not stored.
pub fn lookup(store: &CubeStore, c: &Combination) -> Result<CubeCell, CubeError> {
    c.check(&store.spec)?;
    let key = c.canonical(&store.spec).key(&store.spec);
    store.cells.get(&key).copied().ok_or(CubeError::KeyNotPrecomputed(key))
}

impl fmt::Display for Combination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.0.iter().map(|v| v.as_deref().unwrap_or(ANY)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Per-dimension selected values, keyed by dimension name.
pub fn describe(spec: &CubeSpec, c: &Combination) -> BTreeMap<String, String> {
    spec.dimensions
        .iter()
        .zip(&c.0)
        .map(|(d, v)| (d.name.clone(), v.clone().unwrap_or_else(|| ANY.to_string())))
        .collect()
}
