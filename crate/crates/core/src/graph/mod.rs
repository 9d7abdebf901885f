//! Immutable in-memory knowledge graph built from normalized records.
//!
//! Entities are stored sorted by `(class, uid)` and addressed by their
//! position ([`EntityId`]). Links are sorted by `(predicate, subject, object)`,
//! so every class and predicate owns a contiguous slice.

mod facets;
mod ntriples;
mod query;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Range as Span;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ingest::{link_direction, LinkDirection, NormalizedRecord};
use crate::ontology::{validate_ontology, Ontology};
use crate::value::Scalar;

pub use facets::{facet_options, filter_treatments, parse_flag, FacetField, FacetValueError, TreatmentFilter, FACET_FIELDS};
pub use ntriples::{entity_iri, export_ntriples, export_turtle, import_ntriples};
pub use query::{all_triples, match_pattern, select, Bindings, Node, QueryError, Term, TriplePattern, RDF_TYPE};

pub type EntityId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entity {
    pub uid: String,
    pub class: String,
    pub values: BTreeMap<String, Scalar>,
}

impl Entity {
    pub fn new(class: impl Into<String>, uid: impl Into<String>) -> Self {
        Entity {
            uid: uid.into(),
            class: class.into(),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, property: &str, value: Scalar) -> Self {
        self.values.insert(property.to_string(), value);
        self
    }

    pub fn get(&self, property: &str) -> Option<&Scalar> {
        self.values.get(property)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub predicate: String,
    pub subject: EntityId,
    pub object: EntityId,
}

/// `(class, uid)` address of an entity before ids are assigned.
pub type EntityKey = (String, String);

/// A link between two entities addressed by key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinkSpec {
    pub subject: EntityKey,
    pub predicate: String,
    pub object: EntityKey,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("ontology has {violations} violations, first: {first}")]
    InvalidOntology { violations: usize, first: String },
    #[error("entity `{uid}`: class `{class}` is not declared")]
    UndeclaredClass { class: String, uid: String },
    #[error("entity {class}/{uid}: `{property}` is not a data property of `{class}`")]
    PropertyDomain {
        class: String,
        uid: String,
        property: String,
    },
    #[error("entity {class}/{uid}: `{property}` expects {expected}, got {found}")]
    PropertyRange {
        class: String,
        uid: String,
        property: String,
        expected: crate::ontology::Range,
        found: crate::ontology::Range,
    },
    #[error("duplicate entity {class}/{uid}")]
    DuplicateEntity { class: String, uid: String },
    #[error("{class}/{uid}: `{predicate}` does not connect `{class}` with `{other}`")]
    LinkMismatch {
        class: String,
        uid: String,
        predicate: String,
        other: String,
    },
    #[error("{subject}: `{predicate}` points to missing {class}/{missing}")]
    DanglingLink {
        subject: String,
        predicate: String,
        class: String,
        missing: String,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Typing { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_classes_used: usize,
    pub n_object_property_types_used: usize,
    pub n_data_property_types_used: usize,
    pub n_entities: usize,
    pub n_links: usize,
    pub n_literal_assertions: usize,
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    ontology: Arc<Ontology>,
    entities: Vec<Entity>,
    links: Vec<Link>,
    class_index: BTreeMap<String, Span<usize>>,
    predicate_index: BTreeMap<String, Span<usize>>,
    property_index: BTreeMap<String, Vec<EntityId>>,
    uid_index: HashMap<String, Vec<EntityId>>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

/// Structural equality: same entities (with values) and same links.
impl PartialEq for KnowledgeGraph {
    fn eq(&self, other: &Self) -> bool {
        self.entities == other.entities && self.links == other.links
    }
}

impl KnowledgeGraph {
    pub fn empty(ontology: Arc<Ontology>) -> Self {
        Self::index(ontology, Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    /// Builds from entities and key-addressed links, checking the ontology
    /// and every typing and referential constraint.
    pub fn assemble(ontology: Arc<Ontology>, entities: Vec<Entity>, links: Vec<LinkSpec>) -> Result<Self, GraphError> {
        let violations = validate_ontology(&ontology);
        if let Some(first) = violations.first() {
            return Err(GraphError::InvalidOntology {
                violations: violations.len(),
                first: first.to_string(),
            });
        }
        Self::index(ontology, entities, links)
    }

    fn index(ontology: Arc<Ontology>, mut entities: Vec<Entity>, links: Vec<LinkSpec>) -> Result<Self, GraphError> {
        let o = &*ontology;
        for e in &entities {
            check_entity(o, e)?;
        }
        entities.sort_by(|a, b| (&a.class, &a.uid).cmp(&(&b.class, &b.uid)));
        for w in entities.windows(2) {
            if w[0].class == w[1].class && w[0].uid == w[1].uid {
                return Err(GraphError::DuplicateEntity {
                    class: w[0].class.clone(),
                    uid: w[0].uid.clone(),
                });
            }
        }

        let mut class_index: BTreeMap<String, Span<usize>> = BTreeMap::new();
        let mut start = 0;
        for i in 1..=entities.len() {
            if i == entities.len() || entities[i].class != entities[start].class {
                class_index.insert(entities[start].class.clone(), start..i);
                start = i;
            }
        }
        let find = |key: &EntityKey| -> Option<EntityId> {
            let span = class_index.get(&key.0)?;
            entities[span.clone()]
                .binary_search_by(|e| e.uid.as_str().cmp(&key.1))
                .ok()
                .map(|i| span.start + i)
        };

        let mut resolved = BTreeSet::new();
        for l in links {
            let op = o.object_property(&l.predicate);
            let fits = op.is_some_and(|op| op.domain == l.subject.0 && op.range == l.object.0);
            if !fits {
                return Err(GraphError::LinkMismatch {
                    class: l.subject.0.clone(),
                    uid: l.subject.1.clone(),
                    predicate: l.predicate.clone(),
                    other: l.object.0.clone(),
                });
            }
            let dangling = |k: &EntityKey, other: &EntityKey| GraphError::DanglingLink {
                subject: format!("{}/{}", other.0, other.1),
                predicate: l.predicate.clone(),
                class: k.0.clone(),
                missing: k.1.clone(),
            };
            let s = find(&l.subject).ok_or_else(|| dangling(&l.subject, &l.object))?;
            let t = find(&l.object).ok_or_else(|| dangling(&l.object, &l.subject))?;
            resolved.insert(Link {
                predicate: l.predicate,
                subject: s,
                object: t,
            });
        }
        let links: Vec<Link> = resolved.into_iter().collect();

        let mut predicate_index: BTreeMap<String, Span<usize>> = BTreeMap::new();
        let mut start = 0;
        for i in 1..=links.len() {
            if i == links.len() || links[i].predicate != links[start].predicate {
                predicate_index.insert(links[start].predicate.clone(), start..i);
                start = i;
            }
        }
        let mut outgoing = vec![Vec::new(); entities.len()];
        let mut incoming = vec![Vec::new(); entities.len()];
        for (i, l) in links.iter().enumerate() {
            outgoing[l.subject].push(i);
            incoming[l.object].push(i);
        }
        let mut property_index: BTreeMap<String, Vec<EntityId>> = BTreeMap::new();
        let mut uid_index: HashMap<String, Vec<EntityId>> = HashMap::new();
        for (id, e) in entities.iter().enumerate() {
            for p in e.values.keys() {
                property_index.entry(p.clone()).or_default().push(id);
            }
            uid_index.entry(e.uid.clone()).or_default().push(id);
        }

        Ok(KnowledgeGraph {
            ontology,
            entities,
            links,
            class_index,
            predicate_index,
            property_index,
            uid_index,
            outgoing,
            incoming,
        })
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn shared_ontology(&self) -> Arc<Ontology> {
        Arc::clone(&self.ontology)
    }

    pub fn entities(&self) -> &[Entity] {
        &self.entities
    }

    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id]
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }

    /// Ids of all entities of `class`, in uid order.
    pub fn ids_of(&self, class: &str) -> Span<EntityId> {
        self.class_index.get(class).cloned().unwrap_or(0..0)
    }

    pub fn entities_of(&self, class: &str) -> &[Entity] {
        &self.entities[self.ids_of(class)]
    }

    pub fn find(&self, class: &str, uid: &str) -> Option<EntityId> {
        let span = self.class_index.get(class)?;
        self.entities[span.clone()]
            .binary_search_by(|e| e.uid.as_str().cmp(uid))
            .ok()
            .map(|i| span.start + i)
    }

    /// Entities of any class carrying `uid`.
    pub fn find_uid(&self, uid: &str) -> &[EntityId] {
        self.uid_index.get(uid).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn links_with(&self, predicate: &str) -> &[Link] {
        match self.predicate_index.get(predicate) {
            Some(span) => &self.links[span.clone()],
            None => &[],
        }
    }

    /// Entities carrying a value for `property`, in id order.
    pub fn having(&self, property: &str) -> &[EntityId] {
        self.property_index.get(property).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn outgoing(&self, id: EntityId) -> impl Iterator<Item = &Link> + '_ {
        self.outgoing[id].iter().map(move |&i| &self.links[i])
    }

    pub fn incoming(&self, id: EntityId) -> impl Iterator<Item = &Link> + '_ {
        self.incoming[id].iter().map(move |&i| &self.links[i])
    }

    /// Objects reached from `id` via `predicate`.
    pub fn objects<'a>(&'a self, id: EntityId, predicate: &'a str) -> impl Iterator<Item = EntityId> + 'a {
        self.outgoing(id).filter(move |l| l.predicate == predicate).map(|l| l.object)
    }

    /// Subjects that reach `id` via `predicate`.
    pub fn subjects<'a>(&'a self, id: EntityId, predicate: &'a str) -> impl Iterator<Item = EntityId> + 'a {
        self.incoming(id).filter(move |l| l.predicate == predicate).map(|l| l.subject)
    }

    /// Entities reached from `id` by following `path` forward.
    pub fn follow(&self, id: EntityId, path: &[String]) -> Vec<EntityId> {
        let mut frontier = vec![id];
        for p in path {
            let mut next: Vec<EntityId> = frontier.iter().flat_map(|&e| self.objects(e, p)).collect();
            next.sort_unstable();
            next.dedup();
            frontier = next;
        }
        frontier
    }

    pub fn stats(&self) -> GraphStats {
        GraphStats {
            n_classes_used: self.class_index.len(),
            n_object_property_types_used: self.predicate_index.len(),
            n_data_property_types_used: self.property_index.len(),
            n_entities: self.entities.len(),
            n_links: self.links.len(),
            n_literal_assertions: self.entities.iter().map(|e| e.values.len()).sum(),
        }
    }
}

fn check_entity(o: &Ontology, e: &Entity) -> Result<(), GraphError> {
    if o.class(&e.class).is_none() {
        return Err(GraphError::UndeclaredClass {
            class: e.class.clone(),
            uid: e.uid.clone(),
        });
    }
    for (p, v) in &e.values {
        let dp = o
            .data_property(p)
            .filter(|dp| dp.domain == e.class)
            .ok_or_else(|| GraphError::PropertyDomain {
                class: e.class.clone(),
                uid: e.uid.clone(),
                property: p.clone(),
            })?;
        if dp.range != v.range() {
            return Err(GraphError::PropertyRange {
                class: e.class.clone(),
                uid: e.uid.clone(),
                property: p.clone(),
                expected: dp.range,
                found: v.range(),
            });
        }
    }
    Ok(())
}

/// Two-phase materialization: every record becomes an entity, then every
/// link entry is resolved, so links may point forward across tabs.
pub fn build_graph(o: Arc<Ontology>, records: &[NormalizedRecord]) -> Result<KnowledgeGraph, GraphError> {
    let mut entities = Vec::with_capacity(records.len());
    let mut links = Vec::new();
    for r in records {
        entities.push(Entity {
            uid: r.uid.clone(),
            class: r.class.clone(),
            values: r.values.clone(),
        });
        for (prop, target) in &r.links {
            let op = o.object_property(prop);
            let other = op.map(|op| if op.domain == r.class { &op.range } else { &op.domain });
            let dir = other.and_then(|other| link_direction(&o, prop, &r.class, other));
            let here = (r.class.clone(), r.uid.clone());
            let spec = match (dir, other) {
                (Some(LinkDirection::Forward), Some(other)) => LinkSpec {
                    subject: here,
                    predicate: prop.clone(),
                    object: (other.clone(), target.clone()),
                },
                (Some(LinkDirection::Inverse), Some(other)) => LinkSpec {
                    subject: (other.clone(), target.clone()),
                    predicate: prop.clone(),
                    object: here,
                },
                _ => {
                    return Err(GraphError::LinkMismatch {
                        class: r.class.clone(),
                        uid: r.uid.clone(),
                        predicate: prop.clone(),
                        other: other.cloned().unwrap_or_default(),
                    })
                }
            };
            links.push(spec);
        }
    }
    KnowledgeGraph::assemble(o, entities, links)
}
