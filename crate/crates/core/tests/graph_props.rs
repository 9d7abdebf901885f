mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use chrono::NaiveDate;
use proptest::prelude::*;
use proptest::sample::Index;

use sockg::datagen::GenConfig;
use sockg::graph::{
    all_triples, export_ntriples, facet_options, filter_treatments, import_ntriples, match_pattern, Bindings, Entity,
    FacetField, KnowledgeGraph, LinkSpec, Node, Term, TreatmentFilter, TriplePattern, FACET_FIELDS, RDF_TYPE,
};
use sockg::ontology::{DataPropertyDef, ObjectPropertyDef, Ontology, OntologyClass, Range};
use sockg::value::Scalar;
use sockg::vocab;

fn test_ontology() -> Arc<Ontology> {
    Arc::new(Ontology::new(
        "https://example.org/t/",
        vec![OntologyClass::new("Plot"), OntologyClass::new("Core")],
        vec![
            DataPropertyDef::new("label", "Plot", Range::String),
            DataPropertyDef::new("score", "Plot", Range::Int),
            DataPropertyDef::new("active", "Plot", Range::Bool),
            DataPropertyDef::new("weight_kg", "Core", Range::Float),
            DataPropertyDef::new("taken", "Core", Range::Date),
        ],
        vec![
            ObjectPropertyDef::new("near", "Plot", "Plot"),
            ObjectPropertyDef::new("hasCore", "Plot", "Core"),
        ],
    ))
}

#[derive(Debug, Clone)]
struct Spec {
    plots: Vec<(String, Option<String>, Option<i64>, Option<bool>)>,
    cores: Vec<(String, Option<f64>, Option<NaiveDate>)>,
    near: Vec<(Index, Index)>,
    has_core: Vec<(Index, Index)>,
}

fn build(spec: &Spec) -> KnowledgeGraph {
    let mut plots: Vec<_> = spec.plots.clone();
    plots.sort_by(|a, b| a.0.cmp(&b.0));
    plots.dedup_by(|a, b| a.0 == b.0);
    let mut cores: Vec<_> = spec.cores.clone();
    cores.sort_by(|a, b| a.0.cmp(&b.0));
    cores.dedup_by(|a, b| a.0 == b.0);
    let mut entities = Vec::new();
    for (uid, label, score, active) in &plots {
        let mut e = Entity::new("Plot", uid);
        if let Some(l) = label {
            e = e.with("label", Scalar::Str(l.clone()));
        }
        if let Some(s) = score {
            e = e.with("score", Scalar::Int(*s));
        }
        if let Some(a) = active {
            e = e.with("active", Scalar::Bool(*a));
        }
        entities.push(e);
    }
    for (uid, w, d) in &cores {
        let mut e = Entity::new("Core", uid);
        if let Some(w) = w {
            e = e.with("weight_kg", Scalar::Float(*w));
        }
        if let Some(d) = d {
            e = e.with("taken", Scalar::Date(*d));
        }
        entities.push(e);
    }
    let key = |c: &str, u: &str| (c.to_string(), u.to_string());
    let mut links = BTreeSet::new();
    for (a, b) in &spec.near {
        links.insert(LinkSpec {
            subject: key("Plot", &plots[a.index(plots.len())].0),
            predicate: "near".into(),
            object: key("Plot", &plots[b.index(plots.len())].0),
        });
    }
    if !cores.is_empty() {
        for (a, b) in &spec.has_core {
            links.insert(LinkSpec {
                subject: key("Plot", &plots[a.index(plots.len())].0),
                predicate: "hasCore".into(),
                object: key("Core", &cores[b.index(cores.len())].0),
            });
        }
    }
    KnowledgeGraph::assemble(test_ontology(), entities, links.into_iter().collect()).unwrap()
}

fn date() -> impl Strategy<Value = NaiveDate> {
    (1990i32..2030, 1u32..13, 1u32..29).prop_map(|(y, m, d)| NaiveDate::from_ymd_opt(y, m, d).unwrap())
}

fn small_spec() -> impl Strategy<Value = Spec> {
    let uid = "u[0-7]";
    (
        prop::collection::vec(
            (uid, prop::option::of("(red|green|blue)"), prop::option::of(0i64..3), prop::option::of(any::<bool>())),
            1..8,
        ),
        prop::collection::vec((uid, prop::option::of(prop::sample::select(vec![0.5, 1.0, 2.5])), prop::option::of(date())), 0..7),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..10),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..10),
    )
        .prop_map(|(plots, cores, near, has_core)| Spec { plots, cores, near, has_core })
}

/// Triples listed straight from entities and links.
fn listed_triples(g: &KnowledgeGraph) -> Vec<(Node, Node, Node)> {
    let mut out = Vec::new();
    for (id, e) in g.entities().iter().enumerate() {
        out.push((Node::Entity(id), Node::Name(RDF_TYPE.into()), Node::Name(e.class.clone())));
        for (p, v) in &e.values {
            out.push((Node::Entity(id), Node::Name(p.clone()), Node::Literal(v.clone())));
        }
    }
    for l in g.links() {
        out.push((Node::Entity(l.subject), Node::Name(l.predicate.clone()), Node::Entity(l.object)));
    }
    out
}

fn unify(g: &KnowledgeGraph, t: &Term, n: &Node, b: &mut Bindings) -> bool {
    match t {
        Term::Var(v) => match b.get(v) {
            Some(x) => x == n,
            None => {
                b.insert(v.clone(), n.clone());
                true
            }
        },
        Term::Uid(u) => matches!(n, Node::Entity(id) if &g.entity(*id).uid == u),
        Term::Name(x) => matches!(n, Node::Name(y) if x == y),
        Term::Literal(x) => matches!(n, Node::Literal(y) if x == y),
        Term::Node(x) => x == n,
    }
}

fn brute_force(g: &KnowledgeGraph, patterns: &[TriplePattern]) -> Vec<Bindings> {
    let triples = listed_triples(g);
    let mut rows = vec![Bindings::new()];
    for p in patterns {
        let mut next = Vec::new();
        for row in &rows {
            for (s, pr, o) in &triples {
                let mut b = row.clone();
                if unify(g, &p.subject, s, &mut b) && unify(g, &p.predicate, pr, &mut b) && unify(g, &p.object, o, &mut b) {
                    next.push(b);
                }
            }
        }
        rows = next;
    }
    let set: BTreeSet<Bindings> = rows.into_iter().collect();
    set.into_iter().collect()
}

#[derive(Debug, Clone)]
enum Pick {
    Var(u8),
    Uid(Index),
    Name(Index),
    Literal(Index),
    Absent,
}

fn pick(vars: u8) -> impl Strategy<Value = Pick> {
    prop_oneof![
        4 => (0..vars).prop_map(Pick::Var),
        2 => any::<Index>().prop_map(Pick::Uid),
        3 => any::<Index>().prop_map(Pick::Name),
        2 => any::<Index>().prop_map(Pick::Literal),
        1 => Just(Pick::Absent),
    ]
}

fn term(g: &KnowledgeGraph, p: &Pick, predicate: bool) -> Term {
    let triples = listed_triples(g);
    match p {
        Pick::Var(v) => Term::Var(if predicate { format!("p{v}") } else { format!("v{v}") }),
        Pick::Uid(i) => Term::Uid(g.entities()[i.index(g.entities().len())].uid.clone()),
        Pick::Name(i) => {
            let names: Vec<String> = triples
                .iter()
                .flat_map(|(_, p, o)| [p, o])
                .filter_map(|n| match n {
                    Node::Name(x) => Some(x.clone()),
                    _ => None,
                })
                .collect();
            Term::Name(names[i.index(names.len())].clone())
        }
        Pick::Literal(i) => {
            let lits: Vec<Scalar> = triples
                .iter()
                .filter_map(|(_, _, o)| match o {
                    Node::Literal(x) => Some(x.clone()),
                    _ => None,
                })
                .collect();
            if lits.is_empty() {
                Term::Literal(Scalar::Int(99))
            } else {
                Term::Literal(lits[i.index(lits.len())].clone())
            }
        }
        Pick::Absent => Term::Name("nothingHere".into()),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn match_pattern_equals_nested_loop_join(
        spec in small_spec(),
        picks in prop::collection::vec((pick(3), pick(2), pick(3)), 1..4),
    ) {
        let g = build(&spec);
        let triples = listed_triples(&g);
        prop_assert!(triples.len() <= 200);
        let mut all: Vec<_> = all_triples(&g);
        let mut listed = triples.clone();
        all.sort();
        listed.sort();
        prop_assert_eq!(&all, &listed);

        let patterns: Vec<TriplePattern> = picks
            .iter()
            .map(|(s, p, o)| TriplePattern::new(term(&g, s, false), term(&g, p, true), term(&g, o, false)))
            .collect();
        prop_assert_eq!(match_pattern(&g, &patterns), brute_force(&g, &patterns));
    }
}

fn odd_text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z ]{0,6}",
        "[\\PC\"\\\\\t\n\r]{0,12}",
        Just("None".to_string()),
        Just(String::new()),
    ]
}

fn odd_uid() -> impl Strategy<Value = String> {
    prop_oneof!["[a-z0-9]{1,4}", "[\\PC%/ #<>]{1,8}"]
}

fn export_spec() -> impl Strategy<Value = Spec> {
    (
        prop::collection::vec(
            (odd_uid(), prop::option::of(odd_text()), prop::option::of(any::<i64>()), prop::option::of(any::<bool>())),
            1..12,
        ),
        prop::collection::vec(
            (
                odd_uid(),
                prop::option::of(prop_oneof![
                    any::<f64>().prop_filter("finite", |v| v.is_finite()),
                    Just(0.1),
                    Just(-0.0),
                    Just(1e-300),
                    Just(f64::MAX),
                ]),
                prop::option::of(date()),
            ),
            0..12,
        ),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..20),
        prop::collection::vec((any::<Index>(), any::<Index>()), 0..20),
    )
        .prop_map(|(plots, cores, near, has_core)| Spec { plots, cores, near, has_core })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn export_import_round_trip(spec in export_spec()) {
        let g = build(&spec);
        let text = export_ntriples(&g, g.ontology().base_uri());
        let s = g.stats();
        prop_assert_eq!(text.lines().count(), s.n_entities + s.n_links + s.n_literal_assertions);
        let back = import_ntriples(&text, g.shared_ontology()).unwrap();
        prop_assert_eq!(&back, &g);
        for (a, b) in back.entities().iter().zip(g.entities()) {
            for (p, v) in &a.values {
                if let (Scalar::Float(x), Some(Scalar::Float(y))) = (v, b.values.get(p)) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
        prop_assert_eq!(export_ntriples(&back, back.ontology().base_uri()), text);
    }
}

fn facet_values(g: &KnowledgeGraph, field: FacetField) -> Vec<String> {
    let set: BTreeSet<String> = g
        .entities_of(vocab::TREATMENT)
        .iter()
        .filter_map(|e| e.get(field.property()).map(Scalar::lexical))
        .collect();
    set.into_iter().collect()
}

fn brute_filter(g: &KnowledgeGraph, f: &TreatmentFilter) -> Vec<usize> {
    let text = |id: usize, p: &str| g.entity(id).get(p).and_then(Scalar::as_str).map(str::to_ascii_lowercase);
    let eq = |id: usize, p: &str, want: &Option<String>| {
        want.as_ref().is_none_or(|w| text(id, p).as_deref() == Some(w.to_ascii_lowercase().as_str()))
    };
    g.ids_of(vocab::TREATMENT)
        .filter(|&t| {
            eq(t, "crop", &f.crop)
                && eq(t, "fertilizerClass", &f.fertilizer_class)
                && eq(t, "residueRemoval", &f.residue_removal)
                && eq(t, "tillageDescriptor", &f.tillage)
                && eq(t, "nitrogenLevel", &f.nitrogen_level)
                && eq(t, "rotationDescriptor", &f.rotation)
                && f.irrigation.is_none_or(|w| g.entity(t).get("irrigation").and_then(Scalar::as_bool) == Some(w))
        })
        .collect()
}

fn facet_graph() -> &'static KnowledgeGraph {
    static G: std::sync::OnceLock<KnowledgeGraph> = std::sync::OnceLock::new();
    G.get_or_init(|| {
        common::synthetic(&GenConfig {
            n_treatments: 40,
            missing_fraction: 0.05,
            ..GenConfig::default()
        })
        .1
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn facets_sound_and_filters_monotone(
        choices in prop::collection::vec(prop::option::of(any::<Index>()), FACET_FIELDS.len()),
        extra in any::<(Index, Index)>(),
    ) {
        let g = facet_graph();
        let mut f = TreatmentFilter::default();
        for (field, c) in FACET_FIELDS.iter().zip(&choices) {
            let values = facet_values(g, *field);
            if let (Some(i), false) = (c, values.is_empty()) {
                let v = &values[i.index(values.len())];
                f.set(*field, &v.to_ascii_uppercase()).or_else(|_| f.set(*field, v)).unwrap();
            }
        }
        let result = filter_treatments(g, &f);
        prop_assert_eq!(&result, &brute_filter(g, &f));

        for (field, offered) in facet_options(g, &f) {
            for v in offered {
                let narrowed = f.clone().with(field, &v).unwrap();
                prop_assert!(!filter_treatments(g, &narrowed).is_empty(), "{:?}={} offered but empty", field, v);
            }
        }

        let field = FACET_FIELDS[extra.0.index(FACET_FIELDS.len())];
        let values = facet_values(g, field);
        if !f.is_set(field) && !values.is_empty() {
            let narrowed = f.clone().with(field, &values[extra.1.index(values.len())]).unwrap();
            let smaller: BTreeSet<usize> = filter_treatments(g, &narrowed).into_iter().collect();
            let larger: BTreeSet<usize> = result.iter().copied().collect();
            prop_assert!(smaller.is_subset(&larger));
        }
    }
}
