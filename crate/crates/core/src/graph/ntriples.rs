//! N-Triples and Turtle serialization of instance data.
//!
//! Entity IRIs are `base + Class/uid` with the uid percent-encoded.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};

use super::{Entity, EntityKey, GraphError, KnowledgeGraph, LinkSpec};
use crate::ontology::turtle::{escape_string, write_prefixes, RDF, XSD};
use crate::ontology::{Ontology, Range};
use crate::value::Scalar;

const UID_ENCODE: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

pub fn entity_iri(base: &str, class: &str, uid: &str) -> String {
    format!("{base}{class}/{}", utf8_percent_encode(uid, UID_ENCODE))
}

fn literal(v: &Scalar) -> String {
    let dt = v.range().xsd_local();
    format!("\"{}\"^^<{XSD}{dt}>", escape_string(&v.lexical()))
}

/// One triple per line, sorted. Line count is
/// `n_entities + n_links + n_literal_assertions`.
pub fn export_ntriples(g: &KnowledgeGraph, base: &str) -> String {
    let iri = |e: &Entity| entity_iri(base, &e.class, &e.uid);
    let mut lines = Vec::with_capacity(g.entities.len() * 4 + g.links.len());
    for e in &g.entities {
        let s = iri(e);
        lines.push(format!("<{s}> <{RDF}type> <{base}{}> .", e.class));
        for (p, v) in &e.values {
            lines.push(format!("<{s}> <{base}{p}> {} .", literal(v)));
        }
    }
    for l in &g.links {
        lines.push(format!(
            "<{}> <{base}{}> <{}> .",
            iri(&g.entities[l.subject]),
            l.predicate,
            iri(&g.entities[l.object])
        ));
    }
    lines.sort_unstable();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

/// Turtle rendering of the instance data, one subject block per entity.
pub fn export_turtle(g: &KnowledgeGraph) -> String {
    let o = g.ontology();
    let base = o.base_uri();
    let prefix = o.prefix();
    let mut out = String::new();
    write_prefixes(&mut out, prefix, base);
    for (id, e) in g.entities.iter().enumerate() {
        let _ = write!(out, "\n<{}> a {prefix}:{}", entity_iri(base, &e.class, &e.uid), e.class);
        for (p, v) in &e.values {
            let dt = v.range().xsd_local();
            let _ = write!(out, " ;\n    {prefix}:{p} \"{}\"^^xsd:{dt}", escape_string(&v.lexical()));
        }
        for l in g.outgoing(id) {
            let t = &g.entities[l.object];
            let _ = write!(out, " ;\n    {prefix}:{} <{}>", l.predicate, entity_iri(base, &t.class, &t.uid));
        }
        out.push_str(" .\n");
    }
    out
}

enum Obj {
    Iri(String),
    Lit(String, Option<String>),
}

struct LineParser<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> LineParser<'a> {
    fn err(&self, message: impl Into<String>) -> GraphError {
        GraphError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.s[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn iri(&mut self) -> Result<String, GraphError> {
        self.skip_ws();
        let rest = &self.s[self.pos..];
        if !rest.starts_with('<') {
            return Err(self.err(format!("expected IRI at column {}", self.pos + 1)));
        }
        let end = rest.find('>').ok_or_else(|| self.err("unterminated IRI"))?;
        self.pos += end + 1;
        Ok(rest[1..end].to_string())
    }

    fn object(&mut self) -> Result<Obj, GraphError> {
        self.skip_ws();
        if !self.s[self.pos..].starts_with('"') {
            return self.iri().map(Obj::Iri);
        }
        self.pos += 1;
        let mut text = String::new();
        let mut chars = self.s[self.pos..].char_indices();
        loop {
            let (i, c) = chars.next().ok_or_else(|| self.err("unterminated literal"))?;
            match c {
                '"' => {
                    self.pos += i + 1;
                    break;
                }
                '\\' => {
                    let (_, e) = chars.next().ok_or_else(|| self.err("unterminated escape"))?;
                    text.push(match e {
                        'n' => '\n',
                        'r' => '\r',
                        't' => '\t',
                        '"' => '"',
                        '\\' => '\\',
                        '\'' => '\'',
                        other => return Err(self.err(format!("unknown escape `\\{other}`"))),
                    });
                }
                c => text.push(c),
            }
        }
        let datatype = if self.s[self.pos..].starts_with("^^") {
            self.pos += 2;
            Some(self.iri()?)
        } else {
            None
        };
        Ok(Obj::Lit(text, datatype))
    }

    fn end(&mut self) -> Result<(), GraphError> {
        self.skip_ws();
        if !self.s[self.pos..].starts_with('.') {
            return Err(self.err("expected `.`"));
        }
        self.pos += 1;
        self.skip_ws();
        if self.pos != self.s.len() {
            return Err(self.err("trailing content after `.`"));
        }
        Ok(())
    }
}

fn parse_entity_iri(iri: &str, base: &str) -> Option<EntityKey> {
    let local = iri.strip_prefix(base)?;
    let (class, uid) = local.split_once('/')?;
    let uid = percent_decode_str(uid).decode_utf8().ok()?;
    Some((class.to_string(), uid.into_owned()))
}

/// Reads the exporter's dialect back into a graph. IRIs must live under the
/// ontology's base.
pub fn import_ntriples(text: &str, o: Arc<Ontology>) -> Result<KnowledgeGraph, GraphError> {
    let base = o.base_uri().to_string();
    let mut types: BTreeMap<EntityKey, usize> = BTreeMap::new();
    let mut values: BTreeMap<EntityKey, BTreeMap<String, Scalar>> = BTreeMap::new();
    let mut value_lines: BTreeMap<EntityKey, usize> = BTreeMap::new();
    let mut links = Vec::new();
    let rdf_type = format!("{RDF}type");

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut p = LineParser { s: trimmed, pos: 0, line };
        let s_iri = p.iri()?;
        let pred = p.iri()?;
        let obj = p.object()?;
        p.end()?;
        let typing = |message: String| GraphError::Typing { line, message };

        let subject = parse_entity_iri(&s_iri, &base)
            .ok_or_else(|| typing(format!("`{s_iri}` is not an entity IRI under `{base}`")))?;
        if pred == rdf_type {
            let Obj::Iri(class_iri) = obj else {
                return Err(typing("rdf:type object must be an IRI".into()));
            };
            let class = class_iri.strip_prefix(base.as_str()).unwrap_or_default();
            if class != subject.0 {
                return Err(typing(format!("`{s_iri}` typed as `{class_iri}`")));
            }
            types.insert(subject, line);
            continue;
        }
        let name = pred
            .strip_prefix(base.as_str())
            .ok_or_else(|| typing(format!("predicate `{pred}` is outside `{base}`")))?;
        match obj {
            Obj::Iri(t) => {
                let object = parse_entity_iri(&t, &base)
                    .ok_or_else(|| typing(format!("`{t}` is not an entity IRI under `{base}`")))?;
                if o.object_property(name).is_none() {
                    return Err(typing(format!("`{name}` is not an object property")));
                }
                links.push(LinkSpec {
                    subject,
                    predicate: name.to_string(),
                    object,
                });
            }
            Obj::Lit(text, dt) => {
                let dp = o
                    .data_property(name)
                    .ok_or_else(|| typing(format!("`{name}` is not a data property")))?;
                let range = match dt.as_deref().map(|d| d.strip_prefix(XSD)) {
                    None => Range::String,
                    Some(Some(local)) => Range::from_xsd_local(local)
                        .ok_or_else(|| typing(format!("unsupported datatype xsd:{local}")))?,
                    Some(None) => return Err(typing(format!("unsupported datatype `{}`", dt.unwrap_or_default()))),
                };
                if range != dp.range {
                    return Err(typing(format!("`{name}` expects {}, literal is {range}", dp.range)));
                }
                let v = Scalar::parse(range, &text).map_err(|e| typing(e.to_string()))?;
                value_lines.entry(subject.clone()).or_insert(line);
                if values.entry(subject).or_default().insert(name.to_string(), v).is_some() {
                    return Err(typing(format!("second value for `{name}`")));
                }
            }
        }
    }

    for (key, line) in &value_lines {
        if !types.contains_key(key) {
            return Err(GraphError::Typing {
                line: *line,
                message: format!("{}/{} has values but no rdf:type", key.0, key.1),
            });
        }
    }
    let entities = types
        .into_keys()
        .map(|key| {
            let values = values.remove(&key).unwrap_or_default();
            Entity {
                class: key.0,
                uid: key.1,
                values,
            }
        })
        .collect();
    KnowledgeGraph::assemble(o, entities, links)
}
