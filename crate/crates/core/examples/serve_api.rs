//! Serve the HTTP API over a synthetic graph.
//!
//! `cargo run --example serve_api -- [port]`, then for example
//! `curl 'localhost:8080/api/v1/cube/soc-stock?irrigation=applied'`.

use std::sync::Arc;

use sockg::cube::CubeSpec;
use sockg::datagen::{generate, GenConfig};
use sockg::graph::build_graph;
use sockg::ingest::ingest;
use sockg::ontology::Ontology;
use sockg::service::{router, serve, AppState, ServiceConfig};

#[tokio::main]
async fn main() {
    let port: u16 = std::env::args().nth(1).map(|p| p.parse().expect("port")).unwrap_or(8080);
    let generated = generate(&GenConfig::default()).unwrap();
    let o = Arc::new(Ontology::sockg());
    let records = ingest(&generated.tables, &generated.mapping, &o).unwrap().records;
    let g = build_graph(o, &records).unwrap();

    let state = AppState::precomputed(g, &CubeSpec::default_spec()).unwrap();
    let app = router(Arc::new(state), &ServiceConfig { cors_origin: Some("*".into()) });
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await.unwrap();
    println!("listening on http://{}", listener.local_addr().unwrap());
    serve(listener, app, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
    .unwrap();
}
