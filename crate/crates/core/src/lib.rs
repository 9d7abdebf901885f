pub mod cli;
pub mod cube;
pub mod datagen;
pub mod graph;
pub mod ingest;
pub mod ontology;
pub mod service;
pub mod soc;
pub mod value;
pub mod vocab;
