//! Persisted cube stores.
//!
//! The file is JSON lines: a header object holding the spec and build
//! metadata, then one `key<TAB>cell` line per combination, sorted by key.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{generate_combinations, Combination, CubeCell, CubeError, CubeSpec};
use crate::graph::{export_ntriples, KnowledgeGraph};

const FORMAT: &str = "sockg-cube/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildMetadata {
    /// Hex SHA-256 of the graph's canonical N-Triples export.
    pub fingerprint: String,
    /// RFC 3339 build time, present only when `SOURCE_DATE_EPOCH` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubeStore {
    pub spec: CubeSpec,
    pub cells: HashMap<String, CubeCell>,
    pub metadata: BuildMetadata,
}

impl CubeStore {
    /// True when the store was built from a graph with the same content.
    pub fn matches_graph(&self, g: &KnowledgeGraph) -> bool {
        self.metadata.fingerprint == graph_fingerprint(g)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    spec: CubeSpec,
    metadata: BuildMetadata,
}

pub fn graph_fingerprint(g: &KnowledgeGraph) -> String {
    let digest = Sha256::digest(export_ntriples(g, g.ontology().base_uri()).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn build_timestamp() -> Option<String> {
    let secs: i64 = std::env::var("SOURCE_DATE_EPOCH").ok()?.trim().parse().ok()?;
    chrono::DateTime::from_timestamp(secs, 0).map(|t| t.to_rfc3339())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CubeError {
    CubeError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn store_to_string(store: &CubeStore) -> String {
    let header = Header {
        format: FORMAT.to_string(),
        spec: store.spec.clone(),
        metadata: store.metadata.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    let mut keys: Vec<&String> = store.cells.keys().collect();
    keys.sort();
    for k in keys {
        out.push_str(k);
        out.push('\t');
        out.push_str(&serde_json::to_string(&store.cells[k]).expect("cell serializes"));
        out.push('\n');
    }
    out
}

pub fn save_store(store: &CubeStore, path: &Path) -> Result<(), CubeError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, store_to_string(store)).map_err(|e| io_err(path, e))
}

pub fn store_from_str(text: &str) -> Result<CubeStore, CubeError> {
    let format_err = |line: usize, message: String| CubeError::Format { line, message };
    let mut lines = text.split_terminator('\n').enumerate();
    let (_, head) = lines.next().ok_or_else(|| format_err(1, "missing header".into()))?;
    let header: Header = serde_json::from_str(head).map_err(|e| format_err(1, e.to_string()))?;
    if header.format != FORMAT {
        return Err(format_err(1, format!("unsupported format `{}`", header.format)));
    }
    let spec = header.spec;
    let mut cells = HashMap::new();
    for (i, line) in lines {
        let n = i + 1;
        let (key, json) = line
            .split_once('\t')
            .ok_or_else(|| format_err(n, "expected `key<TAB>cell`".into()))?;
        Combination::parse_key(&spec, key).map_err(|e| format_err(n, e.to_string()))?;
        let cell: CubeCell = serde_json::from_str(json).map_err(|e| format_err(n, e.to_string()))?;
        if cells.insert(key.to_string(), cell).is_some() {
            return Err(format_err(n, format!("duplicate key `{key}`")));
        }
    }
    let missing = generate_combinations(&spec)
        .into_iter()
        .map(|c| c.key(&spec))
        .find(|k| !cells.contains_key(k));
    if let Some(k) = missing {
        let end = text.split_terminator('\n').count() + 1;
        return Err(format_err(end, format!("store ends before key `{k}`")));
    }
    Ok(CubeStore {
        spec,
        cells,
        metadata: header.metadata,
    })
}

pub fn load_store(path: &Path) -> Result<CubeStore, CubeError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    store_from_str(&text)
}
