use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use super::Ontology;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    InvalidBaseUri,
    ClassName,
    DataPropertyName,
    ObjectPropertyName,
    DuplicateName,
    DanglingDomain,
    DanglingRange,
    InvalidSeeAlso,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub concept: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.concept, self.message)
    }
}

pub(crate) fn is_absolute_uri(s: &str) -> bool {
    url::Url::parse(s).is_ok()
}

pub(crate) fn is_class_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric())
}

pub(crate) fn is_object_property_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_lowercase())
        && name.chars().all(|c| c.is_ascii_alphanumeric())
}

/// Lower camel case head, optionally followed by underscore-separated unit
/// segments (`bulkDensity_g_per_cm_cubed`).
pub(crate) fn is_data_property_name(name: &str) -> bool {
    let mut segments = name.split('_');
    let head = segments.next().unwrap_or_default();
    is_object_property_name(head)
        && segments.all(|s| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric()))
}

/// Checks naming conventions, name uniqueness and domain/range resolution.
/// An empty report means the ontology is valid.
pub fn validate_ontology(o: &Ontology) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, concept: &str, message: String| {
        out.push(Violation {
            kind,
            concept: concept.to_string(),
            message,
        })
    };

    if !is_absolute_uri(o.base_uri()) {
        push(
            ViolationKind::InvalidBaseUri,
            o.base_uri(),
            "base URI is not absolute".into(),
        );
    }

    let mut seen: HashMap<&str, usize> = HashMap::new();
    let names = o
        .classes()
        .iter()
        .map(|c| c.name.as_str())
        .chain(o.data_properties().iter().map(|p| p.name.as_str()))
        .chain(o.object_properties().iter().map(|p| p.name.as_str()));
    for name in names {
        *seen.entry(name).or_default() += 1;
    }
    let mut dups: Vec<_> = seen.iter().filter(|(_, n)| **n > 1).collect();
    dups.sort();
    for (name, n) in dups {
        push(
            ViolationKind::DuplicateName,
            name,
            format!("declared {n} times"),
        );
    }

    let see_also = |concept: &str, uri: &Option<String>, push: &mut dyn FnMut(ViolationKind, &str, String)| {
        if let Some(uri) = uri {
            if !is_absolute_uri(uri) {
                push(
                    ViolationKind::InvalidSeeAlso,
                    concept,
                    format!("see-also `{uri}` is not an absolute URI"),
                );
            }
        }
    };

    for c in o.classes() {
        if !is_class_name(&c.name) {
            push(
                ViolationKind::ClassName,
                &c.name,
                "class names are upper camel case and alphanumeric".into(),
            );
        }
        see_also(&c.name, &c.see_also, &mut push);
    }
    for p in o.data_properties() {
        if !is_data_property_name(&p.name) {
            push(
                ViolationKind::DataPropertyName,
                &p.name,
                "data property names are lower camel case with `_`-separated unit suffixes".into(),
            );
        }
        if o.class(&p.domain).is_none() {
            push(
                ViolationKind::DanglingDomain,
                &p.name,
                format!("domain `{}` is not a declared class", p.domain),
            );
        }
        see_also(&p.name, &p.see_also, &mut push);
    }
    for p in o.object_properties() {
        if !is_object_property_name(&p.name) {
            push(
                ViolationKind::ObjectPropertyName,
                &p.name,
                "object property names are lower camel case and alphanumeric".into(),
            );
        }
        if o.class(&p.domain).is_none() {
            push(
                ViolationKind::DanglingDomain,
                &p.name,
                format!("domain `{}` is not a declared class", p.domain),
            );
        }
        if o.class(&p.range).is_none() {
            push(
                ViolationKind::DanglingRange,
                &p.name,
                format!("range `{}` is not a declared class", p.range),
            );
        }
        see_also(&p.name, &p.see_also, &mut push);
    }
    out
}
