//! Precompute the default cube, compare a lookup with live evaluation, and
//! round trip the store through disk.

use std::sync::Arc;
use std::time::Instant;

use sockg::cube::{evaluate_live, load_store, lookup, precompute, save_store, Combination, CubeSpec, ANY};
use sockg::datagen::{generate, GenConfig};
use sockg::graph::build_graph;
use sockg::ingest::ingest;
use sockg::ontology::Ontology;

fn main() {
    let generated = generate(&GenConfig::default()).unwrap();
    let o = Arc::new(Ontology::sockg());
    let records = ingest(&generated.tables, &generated.mapping, &o).unwrap().records;
    let g = build_graph(o, &records).unwrap();

    let spec = CubeSpec::default_spec();
    let start = Instant::now();
    let store = precompute(&g, &spec).unwrap();
    println!("{} cells in {:?}", store.cells.len(), start.elapsed());

    for pairs in [
        vec![("irrigation", "applied")],
        vec![("tillage", "none"), ("fertilizer_class", "organic")],
        vec![("tillage", ANY)],
    ] {
        let c = Combination::from_pairs(&spec, pairs.iter().copied()).unwrap();
        let t = Instant::now();
        let cell = lookup(&store, &c).unwrap();
        let fast = t.elapsed();
        let t = Instant::now();
        let live = evaluate_live(&g, &spec, &c).unwrap();
        let slow = t.elapsed();
        assert_eq!(cell, live);
        println!(
            "{:<40} {:>10.1} kgC/ha  n={:<4} lookup {fast:?} live {slow:?}",
            c.key(&spec),
            cell.mean_stock_kgc_per_ha.unwrap_or(f64::NAN),
            cell.n_samples
        );
    }

    let path = std::env::temp_dir().join(format!("sockg-cube-{}.store", std::process::id()));
    save_store(&store, &path).unwrap();
    let back = load_store(&path).unwrap();
    println!("store reloads equal: {}, matches graph: {}", back == store, back.matches_graph(&g));
    std::fs::remove_file(&path).ok();
}
