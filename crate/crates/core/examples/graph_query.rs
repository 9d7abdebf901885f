//! Basic graph patterns over a synthetic graph: every irrigated treatment's
//! units and the chemical samples taken on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use sockg::datagen::{generate, GenConfig};
use sockg::graph::{build_graph, match_pattern, Node, Term, TriplePattern};
use sockg::ingest::ingest;
use sockg::ontology::Ontology;
use sockg::value::Scalar;
use sockg::vocab;

fn main() {
    let generated = generate(&GenConfig::default()).unwrap();
    let o = Arc::new(Ontology::sockg());
    let records = ingest(&generated.tables, &generated.mapping, &o).unwrap().records;
    let g = build_graph(o, &records).unwrap();

    let rows = match_pattern(
        &g,
        &[
            TriplePattern::new(Term::var("t"), Term::name(vocab::treatment::IRRIGATION), Term::Literal(Scalar::Bool(true))),
            TriplePattern::new(Term::var("u"), Term::name(vocab::HAS_TREATMENT), Term::var("t")),
            TriplePattern::new(Term::var("u"), Term::name(vocab::CHEMICAL.link), Term::var("s")),
        ],
    );

    let mut per_treatment: BTreeMap<String, usize> = BTreeMap::new();
    for b in &rows {
        if let Node::Entity(t) = b["t"] {
            *per_treatment.entry(g.entity(t).uid.clone()).or_default() += 1;
        }
    }
    println!("{} (treatment, unit, sample) bindings", rows.len());
    for (t, n) in per_treatment {
        println!("  {t}: {n} chemical samples");
    }
}
