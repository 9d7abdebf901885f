//! Resolvable concept documentation.

use std::fmt::Write as _;

use serde::Serialize;

use super::{Concept, Ontology, OntologyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConceptKind {
    Class,
    ObjectProperty,
    DataProperty,
}

/// A concept connected to the documented one, and how.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelatedConcept {
    pub name: String,
    pub kind: ConceptKind,
    /// `data-property`, `domain-of`, `range-of` for classes; `domain`,
    /// `range` for properties.
    pub role: String,
    pub uri: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConceptDoc {
    pub name: String,
    pub kind: ConceptKind,
    pub uri: String,
    pub comment: Option<String>,
    pub see_also: Option<String>,
    /// Scalar range of a data property.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    pub related: Vec<RelatedConcept>,
}

/// `base + name`. Names are alphanumeric (plus `_`), so no escaping is needed.
pub fn concept_uri(base: &str, name: &str) -> Result<String, OntologyError> {
    if name.is_empty() {
        return Err(OntologyError::EmptyName);
    }
    Ok(format!("{base}{name}"))
}

impl Ontology {
    /// URI of a declared concept.
    pub fn concept_uri(&self, name: &str) -> Result<String, OntologyError> {
        if name.is_empty() {
            return Err(OntologyError::EmptyName);
        }
        if self.concept(name).is_none() {
            return Err(OntologyError::Undeclared(name.to_string()));
        }
        concept_uri(self.base_uri(), name)
    }
}

pub fn concept_doc(o: &Ontology, name: &str) -> Result<ConceptDoc, OntologyError> {
    if name.is_empty() {
        return Err(OntologyError::EmptyName);
    }
    let concept = o
        .concept(name)
        .ok_or_else(|| OntologyError::Undeclared(name.to_string()))?;
    let uri = o.concept_uri(name)?;
    let rel = |name: &str, kind, role: &str| RelatedConcept {
        name: name.to_string(),
        kind,
        role: role.to_string(),
        uri: format!("{}{}", o.base_uri(), name),
    };
    let doc = match concept {
        Concept::Class(c) => {
            let mut related: Vec<RelatedConcept> = o
                .data_properties_of(&c.name)
                .into_iter()
                .map(|p| rel(&p.name, ConceptKind::DataProperty, "data-property"))
                .collect();
            let mut ops: Vec<_> = o.object_properties().iter().collect();
            ops.sort_by(|a, b| a.name.cmp(&b.name));
            for op in ops {
                if op.domain == c.name {
                    related.push(rel(&op.name, ConceptKind::ObjectProperty, "domain-of"));
                }
                if op.range == c.name {
                    related.push(rel(&op.name, ConceptKind::ObjectProperty, "range-of"));
                }
            }
            ConceptDoc {
                name: c.name.clone(),
                kind: ConceptKind::Class,
                uri,
                comment: c.comment.clone(),
                see_also: c.see_also.clone(),
                datatype: None,
                related,
            }
        }
        Concept::DataProperty(p) => ConceptDoc {
            name: p.name.clone(),
            kind: ConceptKind::DataProperty,
            uri,
            comment: p.comment.clone(),
            see_also: p.see_also.clone(),
            datatype: Some(format!("xsd:{}", p.range.xsd_local())),
            related: vec![rel(&p.domain, ConceptKind::Class, "domain")],
        },
        Concept::ObjectProperty(p) => ConceptDoc {
            name: p.name.clone(),
            kind: ConceptKind::ObjectProperty,
            uri,
            comment: p.comment.clone(),
            see_also: p.see_also.clone(),
            datatype: None,
            related: vec![
                rel(&p.domain, ConceptKind::Class, "domain"),
                rel(&p.range, ConceptKind::Class, "range"),
            ],
        },
    };
    Ok(doc)
}

fn html_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

impl ConceptDoc {
    /// Standalone HTML page. Related concepts link to their own pages.
    pub fn to_html(&self) -> String {
        let kind = match self.kind {
            ConceptKind::Class => "Class",
            ConceptKind::ObjectProperty => "Object property",
            ConceptKind::DataProperty => "Data property",
        };
        let name = html_escape(&self.name);
        let mut h = String::new();
        let _ = write!(
            h,
            "<!DOCTYPE html>\n<html lang=\"en\">\n<head><meta charset=\"utf-8\"><title>{name}</title></head>\n<body>\n<h1>{name}</h1>\n<p class=\"kind\">{kind}</p>\n<p class=\"uri\"><code>{}</code></p>\n",
            html_escape(&self.uri)
        );
        if let Some(c) = &self.comment {
            let _ = writeln!(h, "<p class=\"comment\">{}</p>", html_escape(c));
        }
        if let Some(dt) = &self.datatype {
            let _ = writeln!(h, "<p class=\"datatype\">Range: <code>{}</code></p>", html_escape(dt));
        }
        if let Some(s) = &self.see_also {
            let s = html_escape(s);
            let _ = writeln!(h, "<p class=\"see-also\">See also: <a href=\"{s}\">{s}</a></p>");
        }
        if !self.related.is_empty() {
            h.push_str("<h2>Related</h2>\n<ul>\n");
            for r in &self.related {
                let _ = writeln!(
                    h,
                    "<li>{}: <a href=\"{}\">{}</a></li>",
                    html_escape(&r.role),
                    html_escape(&r.name),
                    html_escape(&r.name)
                );
            }
            h.push_str("</ul>\n");
        }
        h.push_str("</body>\n</html>\n");
        h
    }
}
