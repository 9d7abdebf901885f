//! Round trip a workbook through disk: write CSV tabs, read them back with the
//! mapping dictionary, build the graph and export N-Triples.

use std::sync::Arc;

use sockg::datagen::{generate, GenConfig};
use sockg::graph::{build_graph, export_ntriples};
use sockg::ingest::{ingest, read_mapping, read_tables};
use sockg::ontology::Ontology;

fn main() {
    let dir = std::env::temp_dir().join(format!("sockg-ingest-{}", std::process::id()));
    generate(&GenConfig::default()).unwrap().write(&dir).unwrap();

    let tables = read_tables(&dir).unwrap();
    let mapping = read_mapping(&dir.join("mapping.json")).unwrap();
    let o = Arc::new(Ontology::sockg());
    let ingested = match ingest(&tables, &mapping, &o) {
        Ok(i) => i,
        Err(report) => {
            for e in &report.errors {
                eprintln!("{e}");
            }
            std::process::exit(2);
        }
    };
    for (tab, r) in &ingested.report.tabs {
        println!(
            "{tab:<12} rows {:>5}  missing {:>3}  None {:>3} (dropped {})",
            r.rows, r.missing_cells, r.empty_cells, r.empty_non_string_cells
        );
    }

    let g = build_graph(o.clone(), &ingested.records).unwrap();
    let nt = export_ntriples(&g, o.base_uri());
    println!("\n{:?}", g.stats());
    println!("{} triples; first:\n  {}", nt.lines().count(), nt.lines().next().unwrap_or(""));
    std::fs::remove_dir_all(&dir).ok();
}
