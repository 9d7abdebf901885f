//! Inspect the bundled ontology: counts, a class's properties, a concept page
//! and the shortest object-property path between two classes.

use sockg::ontology::{concept_doc, serialize_ontology, Ontology};

fn main() {
    let o = Ontology::sockg();
    println!(
        "{} classes, {} object properties, {} data properties under {}",
        o.classes().len(),
        o.object_properties().len(),
        o.data_properties().len(),
        o.base_uri()
    );

    println!("\nTreatment data properties:");
    for p in o.data_properties_of("Treatment").iter().take(8) {
        println!("  {:<32} {:?}", p.name, p.range);
    }

    let doc = concept_doc(&o, "ExperimentalUnit").expect("declared class");
    println!("\n{} <{}>", doc.name, doc.uri);
    if let Some(c) = &doc.comment {
        println!("  {c}");
    }
    println!("  {} related concepts", doc.related.len());

    match o.property_path("Site", "ExperimentalUnit") {
        Some(path) => {
            let names: Vec<&str> = path.iter().map(|p| p.name.as_str()).collect();
            println!("\nSite -> ExperimentalUnit via {}", names.join(" / "));
        }
        None => println!("\nno path from Site to ExperimentalUnit"),
    }

    let ttl = serialize_ontology(&o).expect("serializes");
    println!("\nTurtle export: {} lines", ttl.lines().count());
}
