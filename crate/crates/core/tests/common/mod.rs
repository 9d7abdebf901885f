#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use sockg::datagen::{generate, GenConfig, Generated};
use sockg::graph::{build_graph, EntityId, KnowledgeGraph};
use sockg::ingest::ingest;
use sockg::ontology::Ontology;
use sockg::value::Scalar;
use sockg::vocab;

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn graph_of(generated: &Generated) -> KnowledgeGraph {
    let o = Arc::new(Ontology::sockg());
    let ingested = ingest(&generated.tables, &generated.mapping, &o).expect("generated data ingests");
    build_graph(o, &ingested.records).expect("graph builds")
}

pub fn synthetic(cfg: &GenConfig) -> (Generated, KnowledgeGraph) {
    let generated = generate(cfg).unwrap();
    let g = graph_of(&generated);
    (generated, g)
}

fn num(e: &sockg::graph::Entity, p: &str) -> Option<f64> {
    e.get(p).and_then(Scalar::as_f64)
}

/// Window stocks of every profile of `unit` that covers `[top, bottom]`,
/// found by scanning raw links and recomputing from scratch.
pub fn oracle_unit_stocks(g: &KnowledgeGraph, unit: EntityId, top: f64, bottom: f64) -> Vec<f64> {
    type Layer = (f64, f64, f64);
    let collect = |kind: vocab::SampleKind, value: &str| {
        let mut out: BTreeMap<String, Vec<Layer>> = BTreeMap::new();
        for l in g.links().iter().filter(|l| l.predicate == kind.link && l.subject == unit) {
            let e = g.entity(l.object);
            let (Some(d), Some(u), Some(lo), Some(v)) =
                (e.get(kind.date).and_then(Scalar::as_date), num(e, kind.upper), num(e, kind.lower), num(e, value))
            else {
                continue;
            };
            out.entry(d.to_string()).or_default().push((u, lo, v));
        }
        out
    };
    let chem = collect(vocab::CHEMICAL, vocab::ORGANIC_CARBON);
    let phys = collect(vocab::PHYSICAL, vocab::BULK_DENSITY);
    let mut stocks = Vec::new();
    for (date, c) in &chem {
        let Some(p) = phys.get(date) else { continue };
        let layers: Vec<(f64, f64, f64, f64)> = c
            .iter()
            .filter_map(|&(u, l, oc)| p.iter().find(|&&(pu, pl, _)| pu == u && pl == l).map(|&(_, _, bd)| (u, l, oc, bd)))
            .collect();
        if layers.is_empty() {
            continue;
        }
        let deepest = layers.iter().map(|l| l.1).fold(f64::MIN, f64::max);
        let shallowest = layers.iter().map(|l| l.0).fold(f64::MAX, f64::min);
        if deepest < bottom || shallowest > top {
            continue;
        }
        let (mut covered, mut stock) = (0.0, 0.0);
        for &(u, l, oc, bd) in &layers {
            let overlap = (l.min(bottom) - u.max(top)).max(0.0);
            covered += overlap;
            stock += oc * bd * overlap * 100.0;
        }
        if (covered - (bottom - top)).abs() <= 1e-9 {
            stocks.push(stock);
        }
    }
    stocks
}

/// Pooled mean, sample count and unit count over units accepted by `keep`.
pub fn oracle_cell(g: &KnowledgeGraph, top: f64, bottom: f64, keep: impl Fn(EntityId) -> bool) -> (Option<f64>, usize, usize) {
    let (mut sum, mut n, mut units) = (0.0, 0, 0);
    for u in g.ids_of(vocab::EXPERIMENTAL_UNIT) {
        if !keep(u) {
            continue;
        }
        let s = oracle_unit_stocks(g, u, top, bottom);
        if !s.is_empty() {
            units += 1;
            n += s.len();
            sum += s.iter().sum::<f64>();
        }
    }
    ((n > 0).then(|| sum / n as f64), n, units)
}

/// Treatment entities linked from `unit`, by raw link scan.
pub fn treatments_of(g: &KnowledgeGraph, unit: EntityId) -> Vec<EntityId> {
    g.links()
        .iter()
        .filter(|l| l.predicate == vocab::HAS_TREATMENT && l.subject == unit)
        .map(|l| l.object)
        .collect()
}

/// One profile: `(upper, lower, oc, bd)` layers sampled on one date.
pub type ProfileSpec = Vec<(f64, f64, f64, f64)>;

/// A graph with one treatment per `(tillage, irrigated, units)` entry; each
/// unit carries the listed profiles on consecutive dates.
pub fn constructed_graph(treatments: &[(&str, bool, Vec<Vec<ProfileSpec>>)]) -> KnowledgeGraph {
    use sockg::graph::{Entity, LinkSpec};
    let key = |c: &str, u: &str| (c.to_string(), u.to_string());
    let mut entities = Vec::new();
    let mut links = Vec::new();
    for (ti, (tillage, irrigated, units)) in treatments.iter().enumerate() {
        let t = format!("T{ti}");
        entities.push(
            Entity::new(vocab::TREATMENT, &t)
                .with(vocab::treatment::TILLAGE, Scalar::Str(tillage.to_string()))
                .with(vocab::treatment::IRRIGATION, Scalar::Bool(*irrigated)),
        );
        for (ui, profiles) in units.iter().enumerate() {
            let u = format!("{t}U{ui}");
            entities.push(Entity::new(vocab::EXPERIMENTAL_UNIT, &u));
            links.push(LinkSpec {
                subject: key(vocab::EXPERIMENTAL_UNIT, &u),
                predicate: vocab::HAS_TREATMENT.into(),
                object: key(vocab::TREATMENT, &t),
            });
            for (pi, layers) in profiles.iter().enumerate() {
                let date = chrono::NaiveDate::from_ymd_opt(2000 + pi as i32, 6, 1).unwrap();
                for (li, &(upper, lower, oc, bd)) in layers.iter().enumerate() {
                    for (kind, prop, v) in [(vocab::CHEMICAL, vocab::ORGANIC_CARBON, oc), (vocab::PHYSICAL, vocab::BULK_DENSITY, bd)] {
                        let s = format!("{u}-{pi}-{li}");
                        entities.push(
                            Entity::new(kind.class, &s)
                                .with(kind.date, Scalar::Date(date))
                                .with(kind.upper, Scalar::Float(upper))
                                .with(kind.lower, Scalar::Float(lower))
                                .with(prop, Scalar::Float(v)),
                        );
                        links.push(LinkSpec {
                            subject: key(vocab::EXPERIMENTAL_UNIT, &u),
                            predicate: kind.link.into(),
                            object: key(kind.class, &s),
                        });
                    }
                }
            }
        }
    }
    KnowledgeGraph::assemble(Arc::new(Ontology::sockg()), entities, links).expect("constructed graph is valid")
}
