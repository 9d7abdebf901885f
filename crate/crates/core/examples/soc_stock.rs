//! SOC stock for a hand-built profile, then grouped means over synthetic data.

use chrono::NaiveDate;
use sockg::datagen::{generate, GenConfig};
use sockg::graph::build_graph;
use sockg::ingest::ingest;
use sockg::ontology::Ontology;
use sockg::soc::{grouped_mean_stock, profile_stock, DepthProfile, DepthWindow, GroupBy, SoilLayer};

fn main() {
    let profile = DepthProfile::new(
        "demo",
        NaiveDate::from_ymd_opt(2020, 4, 1).unwrap(),
        vec![
            SoilLayer::new(0.0, 10.0, 12.0, 1.1),
            SoilLayer::new(10.0, 15.0, 9.0, 1.3),
            SoilLayer::new(15.0, 40.0, 6.0, 1.4),
        ],
    );
    for (top, bottom) in [(0.0, 30.0), (0.0, 10.0), (10.0, 40.0), (0.0, 60.0)] {
        match profile_stock(&profile, top, bottom) {
            Ok(s) => println!("{top:>4}-{bottom:<4} cm  {:>9.1} kgC/ha", s.stock_kgc_per_ha),
            Err(e) => println!("{top:>4}-{bottom:<4} cm  rejected: {e}"),
        }
    }

    let generated = generate(&GenConfig::default()).unwrap();
    let o = std::sync::Arc::new(Ontology::sockg());
    let records = ingest(&generated.tables, &generated.mapping, &o).unwrap().records;
    let g = build_graph(o, &records).unwrap();
    let window = DepthWindow::new(0.0, 30.0).unwrap();
    println!("\nmean stock by site, 0-30 cm:");
    for (site, agg) in grouped_mean_stock(&g, GroupBy::Site, window).unwrap() {
        println!("  {site}: {:.1} kgC/ha ({} samples, {} units)", agg.mean_stock_kgc_per_ha, agg.n_samples, agg.n_units);
    }
}
