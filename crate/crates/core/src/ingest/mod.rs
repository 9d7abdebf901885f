//! Workbook ingestion: raw CSV tabs become uniquely keyed, ontology-typed
//! records.
//!
//! The pipeline per tab is [`normalize_columns`] → [`assign_uids`] →
//! [`typecheck_records`]; [`ingest`] runs it for every tab and merges the
//! results in tab-name order.

mod io;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ontology::{Ontology, Range};
use crate::value::Scalar;

pub use io::{read_mapping, read_tables, write_mapping, write_tables};

/// Header of the synthesized identifier column.
pub const UID_COLUMN: &str = "@uid";

/// Separator between key cells in a synthesized uid.
pub const UID_SEPARATOR: &str = "_";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IngestError {
    #[error("tab `{tab}`: no mapping entry")]
    NoMapping { tab: String },
    #[error("tab `{tab}`: unmapped headers {headers:?}")]
    UnmappedHeaders { tab: String, headers: Vec<String> },
    #[error("tab `{tab}`: row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        tab: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("tab `{tab}`: key column `{column}` not present")]
    UnknownKeyColumn { tab: String, column: String },
    #[error("tab `{tab}`: key cell at row {row}, column `{column}` is missing or empty")]
    MissingKey {
        tab: String,
        row: usize,
        column: String,
    },
    #[error("tab `{tab}`: duplicate uid `{uid}` at rows {first_row} and {second_row}")]
    DuplicateUid {
        tab: String,
        uid: String,
        first_row: usize,
        second_row: usize,
    },
    #[error("tab `{tab}`: row {row}, column `{column}`: `{text}` is not a valid {range}")]
    Type {
        tab: String,
        row: usize,
        column: String,
        text: String,
        range: Range,
    },
    #[error("tab `{tab}`: property `{property}` has domain `{domain}`, not `{class}`")]
    DomainMismatch {
        tab: String,
        property: String,
        domain: String,
        class: String,
    },
    #[error("tab `{tab}`: invalid mapping: {message}")]
    InvalidMapping { tab: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// One workbook tab as read from disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTable {
    pub tab_name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Contextual notes attached to column headers.
    pub notes: BTreeMap<String, String>,
}

impl RawTable {
    pub fn new(
        tab_name: impl Into<String>,
        columns: Vec<String>,
        rows: Vec<Vec<String>>,
    ) -> Result<Self, IngestError> {
        let tab_name = tab_name.into();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(IngestError::RaggedRow {
                    tab: tab_name,
                    row: i,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
        }
        Ok(RawTable {
            tab_name,
            columns,
            rows,
            notes: BTreeMap::new(),
        })
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// A raw cell after sentinel interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellValue {
    /// `NaN`: the value was not recorded.
    Missing,
    /// `None`: the value is known to be empty.
    Empty,
    Value(String),
}

/// Exact, case-sensitive sentinel matching; other text is trimmed.
pub fn normalize_missing(cell: &str) -> CellValue {
    match cell {
        "NaN" => CellValue::Missing,
        "None" => CellValue::Empty,
        other => CellValue::Value(other.trim().to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkSpec {
    pub object_property: String,
    pub target_class: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TabMapping {
    pub target_class: String,
    #[serde(default)]
    pub column_map: BTreeMap<String, String>,
    #[serde(default)]
    pub key_columns: Vec<String>,
    #[serde(default)]
    pub link_columns: BTreeMap<String, LinkSpec>,
}

/// Per-tab mapping from workbook headers to ontology terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MappingDictionary {
    pub tabs: BTreeMap<String, TabMapping>,
}

/// Which way a link column's object property points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkDirection {
    /// The record is the subject.
    Forward,
    /// The record is the object; the linked uid is the subject.
    Inverse,
}

/// Direction in which `property` connects `record_class` with `target_class`.
pub fn link_direction(
    o: &Ontology,
    property: &str,
    record_class: &str,
    target_class: &str,
) -> Option<LinkDirection> {
    let op = o.object_property(property)?;
    if op.domain == record_class && op.range == target_class {
        Some(LinkDirection::Forward)
    } else if op.range == record_class && op.domain == target_class {
        Some(LinkDirection::Inverse)
    } else {
        None
    }
}

impl MappingDictionary {
    /// Checks every mapped term against the ontology.
    pub fn validate(&self, o: &Ontology) -> Vec<IngestError> {
        let mut errors = Vec::new();
        for (tab, m) in &self.tabs {
            let invalid = |message: String| IngestError::InvalidMapping {
                tab: tab.clone(),
                message,
            };
            if o.class(&m.target_class).is_none() {
                errors.push(invalid(format!("target class `{}` is not declared", m.target_class)));
                continue;
            }
            if m.key_columns.is_empty() {
                errors.push(invalid("no key columns".into()));
            }
            let mut targets: HashMap<&str, &str> = HashMap::new();
            for (header, prop) in &m.column_map {
                if let Some(prev) = targets.insert(prop, header) {
                    errors.push(invalid(format!(
                        "headers `{prev}` and `{header}` both map to `{prop}`"
                    )));
                }
                match o.data_property(prop) {
                    None => errors.push(invalid(format!("`{prop}` is not a data property"))),
                    Some(dp) if dp.domain != m.target_class => {
                        errors.push(IngestError::DomainMismatch {
                            tab: tab.clone(),
                            property: prop.clone(),
                            domain: dp.domain.clone(),
                            class: m.target_class.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
            for (header, link) in &m.link_columns {
                if m.column_map.contains_key(header) {
                    errors.push(invalid(format!("header `{header}` is both a data and a link column")));
                }
                if let Some(prev) = targets.insert(&link.object_property, header) {
                    errors.push(invalid(format!(
                        "headers `{prev}` and `{header}` both map to `{}`",
                        link.object_property
                    )));
                }
                if o.class(&link.target_class).is_none() {
                    errors.push(invalid(format!("link target `{}` is not declared", link.target_class)));
                } else if link_direction(o, &link.object_property, &m.target_class, &link.target_class)
                    .is_none()
                {
                    errors.push(invalid(format!(
                        "`{}` does not connect `{}` and `{}`",
                        link.object_property, m.target_class, link.target_class
                    )));
                }
            }
        }
        errors
    }
}

/// Replaces raw headers with ontology names. Fails with the full list of
/// headers the mapping does not cover.
pub fn normalize_columns(t: &RawTable, m: &MappingDictionary) -> Result<RawTable, IngestError> {
    let tab = m.tabs.get(&t.tab_name).ok_or_else(|| IngestError::NoMapping {
        tab: t.tab_name.clone(),
    })?;
    let mut unknown = Vec::new();
    let columns: Vec<String> = t
        .columns
        .iter()
        .map(|h| {
            if let Some(p) = tab.column_map.get(h) {
                p.clone()
            } else if let Some(l) = tab.link_columns.get(h) {
                l.object_property.clone()
            } else {
                unknown.push(h.clone());
                h.clone()
            }
        })
        .collect();
    if !unknown.is_empty() {
        return Err(IngestError::UnmappedHeaders {
            tab: t.tab_name.clone(),
            headers: unknown,
        });
    }
    let notes = t
        .notes
        .iter()
        .filter_map(|(h, n)| {
            let i = t.column_index(h)?;
            Some((columns[i].clone(), n.clone()))
        })
        .collect();
    Ok(RawTable {
        tab_name: t.tab_name.clone(),
        columns,
        rows: t.rows.clone(),
        notes,
    })
}

/// Appends a [`UID_COLUMN`] joining the key cells with `_`, in key order.
pub fn assign_uids(t: &RawTable, key_columns: &[String]) -> Result<RawTable, IngestError> {
    let idx: Vec<usize> = key_columns
        .iter()
        .map(|k| {
            t.column_index(k).ok_or_else(|| IngestError::UnknownKeyColumn {
                tab: t.tab_name.clone(),
                column: k.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    let mut seen: HashMap<String, usize> = HashMap::with_capacity(t.rows.len());
    let mut rows = Vec::with_capacity(t.rows.len());
    for (r, row) in t.rows.iter().enumerate() {
        let mut parts = Vec::with_capacity(idx.len());
        for (&i, k) in idx.iter().zip(key_columns) {
            match normalize_missing(&row[i]) {
                CellValue::Value(v) if !v.is_empty() => parts.push(v),
                _ => {
                    return Err(IngestError::MissingKey {
                        tab: t.tab_name.clone(),
                        row: r,
                        column: k.clone(),
                    })
                }
            }
        }
        let uid = parts.join(UID_SEPARATOR);
        if let Some(&first) = seen.get(&uid) {
            return Err(IngestError::DuplicateUid {
                tab: t.tab_name.clone(),
                uid,
                first_row: first,
                second_row: r,
            });
        }
        seen.insert(uid.clone(), r);
        let mut row = row.clone();
        row.push(uid);
        rows.push(row);
    }
    let mut columns = t.columns.clone();
    columns.push(UID_COLUMN.to_string());
    Ok(RawTable {
        tab_name: t.tab_name.clone(),
        columns,
        rows,
        notes: t.notes.clone(),
    })
}

/// An ontology-aligned row ready for graph construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedRecord {
    pub uid: String,
    pub class: String,
    pub values: BTreeMap<String, Scalar>,
    /// Object property → uid of the linked entity.
    pub links: BTreeMap<String, String>,
}

/// Per-tab audit counts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TabReport {
    pub rows: usize,
    pub records: usize,
    pub missing_cells: usize,
    pub empty_cells: usize,
    /// `None` cells under numeric, boolean or date ranges, stored as absent.
    pub empty_non_string_cells: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub tabs: BTreeMap<String, TabReport>,
    pub errors: Vec<IngestError>,
}

impl IngestReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Types every cell of a normalized, keyed table.
pub fn typecheck_records(
    t: &RawTable,
    o: &Ontology,
    m: &MappingDictionary,
) -> Result<(Vec<NormalizedRecord>, TabReport), IngestError> {
    let tab = m.tabs.get(&t.tab_name).ok_or_else(|| IngestError::NoMapping {
        tab: t.tab_name.clone(),
    })?;
    let class = &tab.target_class;
    let uid_idx = t.column_index(UID_COLUMN).ok_or_else(|| IngestError::UnknownKeyColumn {
        tab: t.tab_name.clone(),
        column: UID_COLUMN.to_string(),
    })?;

    enum Col<'a> {
        Data(&'a str, Range),
        Link(&'a str),
        Skip,
    }
    let link_props: HashMap<&str, &str> = tab
        .link_columns
        .values()
        .map(|l| (l.object_property.as_str(), l.target_class.as_str()))
        .collect();
    let mut cols = Vec::with_capacity(t.columns.len());
    for (i, name) in t.columns.iter().enumerate() {
        if i == uid_idx {
            cols.push(Col::Skip);
        } else if link_props.contains_key(name.as_str()) {
            cols.push(Col::Link(name));
        } else {
            let dp = o.data_property(name).ok_or_else(|| IngestError::InvalidMapping {
                tab: t.tab_name.clone(),
                message: format!("`{name}` is not a data property"),
            })?;
            if &dp.domain != class {
                return Err(IngestError::DomainMismatch {
                    tab: t.tab_name.clone(),
                    property: name.clone(),
                    domain: dp.domain.clone(),
                    class: class.clone(),
                });
            }
            cols.push(Col::Data(name, dp.range));
        }
    }

    let mut report = TabReport {
        rows: t.rows.len(),
        ..TabReport::default()
    };
    let mut records = Vec::with_capacity(t.rows.len());
    for (r, row) in t.rows.iter().enumerate() {
        let mut values = BTreeMap::new();
        let mut links = BTreeMap::new();
        for (cell, col) in row.iter().zip(&cols) {
            let cell = match col {
                Col::Skip => continue,
                _ => normalize_missing(cell),
            };
            match (col, cell) {
                (_, CellValue::Missing) => report.missing_cells += 1,
                (Col::Data(name, range), CellValue::Empty) => {
                    report.empty_cells += 1;
                    if *range == Range::String {
                        values.insert(name.to_string(), Scalar::Str(String::new()));
                    } else {
                        report.empty_non_string_cells += 1;
                    }
                }
                (Col::Link(_), CellValue::Empty) => report.empty_cells += 1,
                (Col::Data(name, range), CellValue::Value(text)) => {
                    let v = Scalar::parse(*range, &text).map_err(|_| IngestError::Type {
                        tab: t.tab_name.clone(),
                        row: r,
                        column: name.to_string(),
                        text: text.clone(),
                        range: *range,
                    })?;
                    values.insert(name.to_string(), v);
                }
                (Col::Link(name), CellValue::Value(text)) => {
                    links.insert(name.to_string(), text);
                }
                (Col::Skip, _) => unreachable!(),
            }
        }
        records.push(NormalizedRecord {
            uid: row[uid_idx].clone(),
            class: class.clone(),
            values,
            links,
        });
    }
    if report.empty_non_string_cells > 0 {
        report.warnings.push(format!(
            "{} `None` cell(s) under non-string properties stored as absent",
            report.empty_non_string_cells
        ));
    }
    report.records = records.len();
    Ok((records, report))
}

fn ingest_tab(
    t: &RawTable,
    o: &Ontology,
    m: &MappingDictionary,
) -> Result<(Vec<NormalizedRecord>, TabReport), IngestError> {
    let tab = m.tabs.get(&t.tab_name).ok_or_else(|| IngestError::NoMapping {
        tab: t.tab_name.clone(),
    })?;
    let normalized = normalize_columns(t, m)?;
    let keys: Vec<String> = tab
        .key_columns
        .iter()
        .map(|k| {
            tab.column_map
                .get(k)
                .cloned()
                .or_else(|| tab.link_columns.get(k).map(|l| l.object_property.clone()))
                .ok_or_else(|| IngestError::UnknownKeyColumn {
                    tab: t.tab_name.clone(),
                    column: k.clone(),
                })
        })
        .collect::<Result<_, _>>()?;
    let keyed = assign_uids(&normalized, &keys)?;
    typecheck_records(&keyed, o, m)
}

/// Successful ingestion: records in tab-name then row order.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub records: Vec<NormalizedRecord>,
    pub report: IngestReport,
}

/// Ingests every tab. Tabs are processed independently; any failing tab makes
/// the whole run fail, with every tab's error listed in the report.
pub fn ingest(
    tables: &[RawTable],
    m: &MappingDictionary,
    o: &Ontology,
) -> Result<Ingested, IngestReport> {
    let mut report = IngestReport {
        errors: m.validate(o),
        ..IngestReport::default()
    };
    let mut sorted: Vec<&RawTable> = tables.iter().collect();
    sorted.sort_by(|a, b| a.tab_name.cmp(&b.tab_name));
    let results: Vec<_> = sorted.par_iter().map(|t| ingest_tab(t, o, m)).collect();
    let mut records = Vec::new();
    for (t, result) in sorted.iter().zip(results) {
        match result {
            Ok((recs, tab_report)) => {
                report.tabs.insert(t.tab_name.clone(), tab_report);
                records.extend(recs);
            }
            Err(e) => {
                report.tabs.insert(
                    t.tab_name.clone(),
                    TabReport {
                        rows: t.rows.len(),
                        ..TabReport::default()
                    },
                );
                report.errors.push(e);
            }
        }
    }
    if report.is_ok() {
        Ok(Ingested { records, report })
    } else {
        Err(report)
    }
}
