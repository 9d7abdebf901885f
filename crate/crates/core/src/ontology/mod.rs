//! Experiment ontology: classes, data properties and object properties.
//!
//! An [`Ontology`] is parsed from (and serialized to) a small Turtle subset,
//! checked against the naming conventions by [`validate_ontology`], and
//! rendered as resolvable concept documentation by [`concept_doc`].

mod docs;
pub(crate) mod turtle;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use docs::{concept_doc, concept_uri, ConceptDoc, ConceptKind, RelatedConcept};
pub use turtle::{parse_ontology, parse_ontology_with_warnings, serialize_ontology, ParseWarning};
pub use validate::{validate_ontology, Violation, ViolationKind};

/// The published ontology vendored with the crate.
pub const SOCKG_TTL: &str = include_str!("../../data/sockg.ttl");

/// Namespace of the published ontology.
pub const SOCKG_BASE: &str = "https://idir.uta.edu/sockg-ontology/docs/";

#[derive(Debug, thiserror::Error)]
pub enum OntologyError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported construct at {line}:{column}: {construct}")]
    Unsupported {
        line: usize,
        column: usize,
        construct: String,
    },
    #[error("ontology is invalid ({} violation(s)): {}", .0.len(), .0.first().map(|v| v.to_string()).unwrap_or_default())]
    Invalid(Vec<Violation>),
    #[error("concept name is empty")]
    EmptyName,
    #[error("concept `{0}` is not declared")]
    Undeclared(String),
}

/// Scalar kind a data property ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Range {
    String,
    Float,
    Int,
    Bool,
    Date,
}

impl Range {
    pub const ALL: [Range; 5] = [
        Range::String,
        Range::Float,
        Range::Int,
        Range::Bool,
        Range::Date,
    ];

    pub fn xsd_local(self) -> &'static str {
        match self {
            Range::String => "string",
            Range::Float => "float",
            Range::Int => "int",
            Range::Bool => "boolean",
            Range::Date => "date",
        }
    }

    pub fn from_xsd_local(local: &str) -> Option<Range> {
        Some(match local {
            "string" => Range::String,
            "float" | "double" | "decimal" => Range::Float,
            "int" | "integer" => Range::Int,
            "boolean" => Range::Bool,
            "date" => Range::Date,
            _ => return None,
        })
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Range::Float | Range::Int)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Range::String => "string",
            Range::Float => "float",
            Range::Int => "int",
            Range::Bool => "bool",
            Range::Date => "date",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OntologyClass {
    pub name: String,
    pub comment: Option<String>,
    pub see_also: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DataPropertyDef {
    pub name: String,
    pub domain: String,
    pub range: Range,
    pub comment: Option<String>,
    pub see_also: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ObjectPropertyDef {
    pub name: String,
    pub domain: String,
    pub range: String,
    pub comment: Option<String>,
    pub see_also: Option<String>,
}

impl OntologyClass {
    pub fn new(name: impl Into<String>) -> Self {
        OntologyClass {
            name: name.into(),
            comment: None,
            see_also: None,
        }
    }
}

impl DataPropertyDef {
    pub fn new(name: impl Into<String>, domain: impl Into<String>, range: Range) -> Self {
        DataPropertyDef {
            name: name.into(),
            domain: domain.into(),
            range,
            comment: None,
            see_also: None,
        }
    }
}

impl ObjectPropertyDef {
    pub fn new(
        name: impl Into<String>,
        domain: impl Into<String>,
        range: impl Into<String>,
    ) -> Self {
        ObjectPropertyDef {
            name: name.into(),
            domain: domain.into(),
            range: range.into(),
            comment: None,
            see_also: None,
        }
    }
}

/// Reference to a declared concept of any kind.
#[derive(Debug, Clone, Copy)]
pub enum Concept<'a> {
    Class(&'a OntologyClass),
    DataProperty(&'a DataPropertyDef),
    ObjectProperty(&'a ObjectPropertyDef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Class(usize),
    Data(usize),
    Object(usize),
}

/// Immutable ontology. Member lists keep declaration order; equality is
/// structural and ignores order.
#[derive(Debug, Clone)]
pub struct Ontology {
    prefix: String,
    base_uri: String,
    classes: Vec<OntologyClass>,
    data_properties: Vec<DataPropertyDef>,
    object_properties: Vec<ObjectPropertyDef>,
    by_name: HashMap<String, Slot>,
}

impl Ontology {
    pub fn new(
        base_uri: impl Into<String>,
        classes: Vec<OntologyClass>,
        data_properties: Vec<DataPropertyDef>,
        object_properties: Vec<ObjectPropertyDef>,
    ) -> Self {
        Self::with_prefix("sockg", base_uri, classes, data_properties, object_properties)
    }

    pub fn with_prefix(
        prefix: impl Into<String>,
        base_uri: impl Into<String>,
        classes: Vec<OntologyClass>,
        data_properties: Vec<DataPropertyDef>,
        object_properties: Vec<ObjectPropertyDef>,
    ) -> Self {
        // First declaration wins for lookups; duplicates are reported by validation.
        let mut by_name = HashMap::new();
        for (i, c) in classes.iter().enumerate() {
            by_name.entry(c.name.clone()).or_insert(Slot::Class(i));
        }
        for (i, p) in data_properties.iter().enumerate() {
            by_name.entry(p.name.clone()).or_insert(Slot::Data(i));
        }
        for (i, p) in object_properties.iter().enumerate() {
            by_name.entry(p.name.clone()).or_insert(Slot::Object(i));
        }
        Ontology {
            prefix: prefix.into(),
            base_uri: base_uri.into(),
            classes,
            data_properties,
            object_properties,
            by_name,
        }
    }

    /// Parses and validates the vendored published ontology.
    pub fn sockg() -> Self {
        let o = parse_ontology(SOCKG_TTL).expect("vendored ontology parses");
        debug_assert!(validate_ontology(&o).is_empty());
        o
    }

    /// Same declarations under another base URI.
    pub fn with_base_uri(mut self, base_uri: impl Into<String>) -> Self {
        self.base_uri = base_uri.into();
        self
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn base_uri(&self) -> &str {
        &self.base_uri
    }

    pub fn classes(&self) -> &[OntologyClass] {
        &self.classes
    }

    pub fn data_properties(&self) -> &[DataPropertyDef] {
        &self.data_properties
    }

    pub fn object_properties(&self) -> &[ObjectPropertyDef] {
        &self.object_properties
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty() && self.data_properties.is_empty() && self.object_properties.is_empty()
    }

    pub fn concept(&self, name: &str) -> Option<Concept<'_>> {
        Some(match *self.by_name.get(name)? {
            Slot::Class(i) => Concept::Class(&self.classes[i]),
            Slot::Data(i) => Concept::DataProperty(&self.data_properties[i]),
            Slot::Object(i) => Concept::ObjectProperty(&self.object_properties[i]),
        })
    }

    pub fn class(&self, name: &str) -> Option<&OntologyClass> {
        match self.by_name.get(name)? {
            Slot::Class(i) => Some(&self.classes[*i]),
            _ => None,
        }
    }

    pub fn data_property(&self, name: &str) -> Option<&DataPropertyDef> {
        match self.by_name.get(name)? {
            Slot::Data(i) => Some(&self.data_properties[*i]),
            _ => None,
        }
    }

    pub fn object_property(&self, name: &str) -> Option<&ObjectPropertyDef> {
        match self.by_name.get(name)? {
            Slot::Object(i) => Some(&self.object_properties[*i]),
            _ => None,
        }
    }

    /// Data properties whose domain is `class`, sorted by name.
    pub fn data_properties_of(&self, class: &str) -> Vec<&DataPropertyDef> {
        let mut v: Vec<_> = self
            .data_properties
            .iter()
            .filter(|p| p.domain == class)
            .collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    /// Shortest chain of object properties leading from `from` to `to`,
    /// following each property from its domain to its range. Ties are broken
    /// by property name.
    pub fn property_path(&self, from: &str, to: &str) -> Option<Vec<&ObjectPropertyDef>> {
        if from == to {
            return Some(Vec::new());
        }
        let mut ops: Vec<&ObjectPropertyDef> = self.object_properties.iter().collect();
        ops.sort_by(|a, b| a.name.cmp(&b.name));
        let mut prev: HashMap<&str, &ObjectPropertyDef> = HashMap::new();
        let mut frontier = vec![from];
        let mut seen = std::collections::HashSet::from([from]);
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for class in frontier {
                for op in ops.iter().filter(|op| op.domain == class) {
                    if seen.insert(op.range.as_str()) {
                        prev.insert(op.range.as_str(), op);
                        next.push(op.range.as_str());
                    }
                }
            }
            if seen.contains(to) {
                let mut path = Vec::new();
                let mut cur = to;
                while cur != from {
                    let op = prev[cur];
                    path.push(op);
                    cur = op.domain.as_str();
                }
                path.reverse();
                return Some(path);
            }
            frontier = next;
        }
        None
    }
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort();
            v
        }
        self.prefix == other.prefix
            && self.base_uri == other.base_uri
            && sorted(&self.classes) == sorted(&other.classes)
            && sorted(&self.data_properties) == sorted(&other.data_properties)
            && sorted(&self.object_properties) == sorted(&other.object_properties)
    }
}
