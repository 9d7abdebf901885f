//! Narrow treatments facet by facet and show which values remain on offer.

use std::sync::Arc;

use sockg::datagen::{generate, GenConfig};
use sockg::graph::{build_graph, facet_options, filter_treatments, FacetField, TreatmentFilter};
use sockg::ingest::ingest;
use sockg::ontology::Ontology;

fn main() {
    let generated = generate(&GenConfig { n_treatments: 30, ..GenConfig::default() }).unwrap();
    let o = Arc::new(Ontology::sockg());
    let records = ingest(&generated.tables, &generated.mapping, &o).unwrap().records;
    let g = build_graph(o, &records).unwrap();

    let mut f = TreatmentFilter::default();
    for (field, value) in [(FacetField::Crop, "corn"), (FacetField::FertilizerClass, "Synthetic")] {
        f.set(field, value).unwrap();
        let hits = filter_treatments(&g, &f);
        println!("{} = {value}: {} treatments", field.key(), hits.len());
        for (other, values) in facet_options(&g, &f) {
            println!("  {:<16} {}", other.key(), values.join(", "));
        }
    }
    for t in filter_treatments(&g, &f) {
        println!("{}", g.entity(t).uid);
    }
}
