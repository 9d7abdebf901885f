//! Conjunctive basic-graph-pattern matching.
//!
//! The graph is viewed as three kinds of triples: `(entity, rdf:type, Class)`,
//! `(entity, objectProperty, entity)` and `(entity, dataProperty, literal)`.

use std::collections::{BTreeMap, BTreeSet};

use super::{EntityId, KnowledgeGraph};
use crate::value::Scalar;

pub const RDF_TYPE: &str = "rdf:type";

/// A bound graph node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Entity(EntityId),
    /// A class or property name, or `rdf:type`.
    Name(String),
    Literal(Scalar),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Var(String),
    /// Any entity with this uid, whatever its class.
    Uid(String),
    Name(String),
    Literal(Scalar),
    Node(Node),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.trim_start_matches('?').to_string())
    }

    pub fn name(name: &str) -> Term {
        Term::Name(name.to_string())
    }

    pub fn uid(uid: &str) -> Term {
        Term::Uid(uid.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    /// True when nothing is bound and evaluation must scan every triple.
    pub fn is_full_scan(&self) -> bool {
        [&self.subject, &self.predicate, &self.object]
            .iter()
            .all(|t| matches!(t, Term::Var(_)))
    }

    fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(|t| match t {
                Term::Var(v) => Some(v.as_str()),
                _ => None,
            })
    }
}

pub type Bindings = BTreeMap<String, Node>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("variable `?{0}` does not occur in any pattern")]
    UnboundVariable(String),
}

/// Every binding satisfying all patterns, sorted and deduplicated.
pub fn match_pattern(g: &KnowledgeGraph, patterns: &[TriplePattern]) -> Vec<Bindings> {
    let mut rows: Vec<Bindings> = vec![Bindings::new()];
    for p in order_by_selectivity(patterns) {
        let mut next = Vec::new();
        for row in &rows {
            let s = resolve(&p.subject, row);
            let pr = resolve(&p.predicate, row);
            let o = resolve(&p.object, row);
            candidates(g, &s, &pr, &o, &mut |ts, tp, to| {
                let mut b = row.clone();
                if unify(&p.subject, ts, &mut b) && unify(&p.predicate, tp, &mut b) && unify(&p.object, to, &mut b) {
                    next.push(b);
                }
            });
        }
        rows = next;
        if rows.is_empty() {
            break;
        }
    }
    let set: BTreeSet<Bindings> = rows.into_iter().collect();
    set.into_iter().collect()
}

/// [`match_pattern`] projected onto `vars`.
pub fn select(g: &KnowledgeGraph, vars: &[&str], patterns: &[TriplePattern]) -> Result<Vec<Bindings>, QueryError> {
    for v in vars {
        let v = v.trim_start_matches('?');
        if !patterns.iter().any(|p| p.vars().any(|x| x == v)) {
            return Err(QueryError::UnboundVariable(v.to_string()));
        }
    }
    let keep: BTreeSet<&str> = vars.iter().map(|v| v.trim_start_matches('?')).collect();
    let set: BTreeSet<Bindings> = match_pattern(g, patterns)
        .into_iter()
        .map(|b| b.into_iter().filter(|(k, _)| keep.contains(k.as_str())).collect())
        .collect();
    Ok(set.into_iter().collect())
}

fn order_by_selectivity(patterns: &[TriplePattern]) -> Vec<&TriplePattern> {
    let mut v: Vec<&TriplePattern> = patterns.iter().collect();
    v.sort_by_key(|p| p.vars().count());
    v
}

/// A term after substituting the current row.
enum Slot {
    Free,
    Node(Node),
    Uid(String),
}

fn resolve(t: &Term, row: &Bindings) -> Slot {
    match t {
        Term::Var(v) => row.get(v).cloned().map_or(Slot::Free, Slot::Node),
        Term::Uid(u) => Slot::Uid(u.clone()),
        Term::Name(n) => Slot::Node(Node::Name(n.clone())),
        Term::Literal(l) => Slot::Node(Node::Literal(l.clone())),
        Term::Node(n) => Slot::Node(n.clone()),
    }
}

fn unify(t: &Term, value: &Node, row: &mut Bindings) -> bool {
    match t {
        Term::Var(v) => match row.get(v) {
            Some(bound) => bound == value,
            None => {
                row.insert(v.clone(), value.clone());
                true
            }
        },
        _ => true,
    }
}

fn slot_matches(g: &KnowledgeGraph, slot: &Slot, n: &Node) -> bool {
    match slot {
        Slot::Free => true,
        Slot::Node(x) => x == n,
        Slot::Uid(u) => matches!(n, Node::Entity(id) if g.entity(*id).uid == *u),
    }
}

/// Emits every triple of `id` matching `p` and `o`.
fn triples_of(g: &KnowledgeGraph, id: EntityId, p: &Slot, o: &Slot, emit: &mut dyn FnMut(&Node, &Node, &Node)) {
    let s = Node::Entity(id);
    let e = g.entity(id);
    let check = |pn: &Node, on: &Node| slot_matches(g, p, pn) && slot_matches(g, o, on);
    let ty = Node::Name(RDF_TYPE.to_string());
    let class = Node::Name(e.class.clone());
    if check(&ty, &class) {
        emit(&s, &ty, &class);
    }
    for l in g.outgoing(id) {
        let pn = Node::Name(l.predicate.clone());
        let on = Node::Entity(l.object);
        if check(&pn, &on) {
            emit(&s, &pn, &on);
        }
    }
    for (prop, v) in &e.values {
        let pn = Node::Name(prop.clone());
        let on = Node::Literal(v.clone());
        if check(&pn, &on) {
            emit(&s, &pn, &on);
        }
    }
}

fn candidates(g: &KnowledgeGraph, s: &Slot, p: &Slot, o: &Slot, emit: &mut dyn FnMut(&Node, &Node, &Node)) {
    match s {
        Slot::Node(Node::Entity(id)) => return triples_of(g, *id, p, o, emit),
        Slot::Node(_) => return,
        Slot::Uid(u) => {
            for &id in g.find_uid(u) {
                triples_of(g, id, p, o, emit);
            }
            return;
        }
        Slot::Free => {}
    }
    if let Slot::Node(Node::Name(pred)) = p {
        if pred == RDF_TYPE {
            let ty = Node::Name(RDF_TYPE.to_string());
            let ids = match o {
                Slot::Node(Node::Name(class)) => g.ids_of(class),
                Slot::Free => 0..g.entities().len(),
                _ => 0..0,
            };
            for id in ids {
                let class = Node::Name(g.entity(id).class.clone());
                emit(&Node::Entity(id), &ty, &class);
            }
        } else if g.ontology().object_property(pred).is_some() {
            for l in g.links_with(pred) {
                let on = Node::Entity(l.object);
                if slot_matches(g, o, &on) {
                    emit(&Node::Entity(l.subject), p_node(p), &on);
                }
            }
        } else {
            for &id in g.having(pred) {
                let on = Node::Literal(g.entity(id).values[pred].clone());
                if slot_matches(g, o, &on) {
                    emit(&Node::Entity(id), p_node(p), &on);
                }
            }
        }
        return;
    }
    match o {
        Slot::Node(Node::Entity(id)) => {
            for l in g.incoming(*id) {
                let pn = Node::Name(l.predicate.clone());
                if slot_matches(g, p, &pn) {
                    emit(&Node::Entity(l.subject), &pn, &Node::Entity(*id));
                }
            }
        }
        _ => {
            for id in 0..g.entities().len() {
                triples_of(g, id, p, o, emit);
            }
        }
    }
}

fn p_node(p: &Slot) -> &Node {
    match p {
        Slot::Node(n) => n,
        _ => unreachable!("predicate is bound"),
    }
}

/// Every triple in the graph, for brute-force evaluation.
pub fn all_triples(g: &KnowledgeGraph) -> Vec<(Node, Node, Node)> {
    let mut out = Vec::new();
    for id in 0..g.entities().len() {
        triples_of(g, id, &Slot::Free, &Slot::Free, &mut |s, p, o| {
            out.push((s.clone(), p.clone(), o.clone()))
        });
    }
    out
}
