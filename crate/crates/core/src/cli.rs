//! The `sockg` command line: generate, ingest, inspect, export, precompute, serve.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 I/O.

use std::ffi::OsString;
use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::cube::{load_store, precompute, save_store, CubeError, CubeSpec};
use crate::datagen::{generate, GenConfig, GenError};
use crate::graph::{build_graph, export_ntriples, export_turtle, import_ntriples, GraphStats, KnowledgeGraph};
use crate::ingest::{ingest, read_mapping, read_tables, IngestError, IngestReport};
use crate::ontology::{parse_ontology, validate_ontology, Ontology};
use crate::service::{router, serve, AppState, ServiceConfig, StateError};

#[derive(Debug, Parser)]
#[command(name = "sockg", version, about = "Soil organic carbon knowledge graph toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct OntologyArgs {
    /// Ontology in Turtle; the bundled ontology when omitted.
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Overrides the ontology's base URI.
    #[arg(long)]
    pub base_uri: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset, its mapping and a ground-truth ledger.
    Gen {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Normalize CSV tabs into an N-Triples graph.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to `<input>/mapping.json`.
        #[arg(long)]
        mapping: Option<PathBuf>,
        #[command(flatten)]
        ontology: OntologyArgs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print graph statistics as JSON.
    Stats {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ontology: OntologyArgs,
    },
    /// Re-serialize a graph.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ontology: OntologyArgs,
        #[arg(long, value_enum, default_value_t = Format::Ntriples)]
        format: Format,
        /// Standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Data cube operations.
    Cube {
        #[command(subcommand)]
        command: CubeCommand,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ontology: OntologyArgs,
        /// Precomputed store; built in memory from `--spec` when omitted.
        #[arg(long)]
        cube: Option<PathBuf>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CubeCommand {
    /// Evaluate every cell of a cube spec and persist the store.
    Precompute {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        ontology: OntologyArgs,
        /// The bundled spec when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Turtle,
    Ntriples,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation { message: String, details: Option<serde_json::Value> },
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation { .. } => 2,
            CliError::Io(_) => 3,
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        CliError::Validation {
            message: message.into(),
            details: None,
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Validation { message, details } => {
                json!({ "error": "validation", "message": message, "details": details })
            }
            CliError::Io(m) => json!({ "error": "io", "message": m }),
        }
    }
}

fn io(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { path, message } => CliError::Io(format!("{path}: {message}")),
            other => CliError::Validation {
                message: other.to_string(),
                details: serde_json::to_value(&other).ok(),
            },
        }
    }
}

impl From<CubeError> for CliError {
    fn from(e: CubeError) -> Self {
        match e {
            CubeError::Io { path, message } => CliError::Io(format!("{path}: {message}")),
            other => CliError::validation(other.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::Io(e) => e.into(),
            other => CliError::validation(other.to_string()),
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

pub fn load_ontology(args: &OntologyArgs) -> Result<Arc<Ontology>, CliError> {
    let o = match &args.ontology {
        None => Ontology::sockg(),
        Some(path) => {
            let o = parse_ontology(&read_text(path)?)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            let violations = validate_ontology(&o);
            if !violations.is_empty() {
                return Err(CliError::Validation {
                    message: format!("{}: {} ontology violations", path.display(), violations.len()),
                    details: Some(json!(violations.iter().map(|v| v.to_string()).collect::<Vec<_>>())),
                });
            }
            o
        }
    };
    Ok(Arc::new(match &args.base_uri {
        Some(base) => o.with_base_uri(base.clone()),
        None => o,
    }))
}

pub fn load_graph(path: &Path, o: Arc<Ontology>) -> Result<KnowledgeGraph, CliError> {
    import_ntriples(&read_text(path)?, o).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))
}

fn load_spec(path: Option<&Path>) -> Result<CubeSpec, CliError> {
    match path {
        None => Ok(CubeSpec::default_spec()),
        Some(p) => CubeSpec::from_json(&read_text(p)?).map_err(|e| CliError::validation(format!("{}: {e}", p.display()))),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct IngestSummary<'a> {
    ok: bool,
    #[serde(flatten)]
    report: &'a IngestReport,
    graph_errors: Vec<String>,
    stats: Option<GraphStats>,
}

fn run_ingest(
    input: &Path,
    mapping: Option<&Path>,
    ontology: &OntologyArgs,
    out: &Path,
    report_path: Option<&Path>,
) -> Result<(), CliError> {
    let o = load_ontology(ontology)?;
    let mapping_path = mapping.map(Path::to_path_buf).unwrap_or_else(|| input.join("mapping.json"));
    let mapping = read_mapping(&mapping_path)?;
    let tables = read_tables(input)?;
    let write_report = |s: &IngestSummary| match report_path {
        Some(p) => write_text(p, &to_json(s)),
        None => Ok(()),
    };
    let ingested = match ingest(&tables, &mapping, &o) {
        Ok(i) => i,
        Err(report) => {
            let summary = IngestSummary {
                ok: false,
                report: &report,
                graph_errors: Vec::new(),
                stats: None,
            };
            write_report(&summary)?;
            return Err(CliError::Validation {
                message: format!("{} ingest errors", report.errors.len()),
                details: serde_json::to_value(&report.errors).ok(),
            });
        }
    };
    let g = match build_graph(o.clone(), &ingested.records) {
        Ok(g) => g,
        Err(e) => {
            let summary = IngestSummary {
                ok: false,
                report: &ingested.report,
                graph_errors: vec![e.to_string()],
                stats: None,
            };
            write_report(&summary)?;
            return Err(CliError::validation(e.to_string()));
        }
    };
    write_text(out, &export_ntriples(&g, o.base_uri()))?;
    write_report(&IngestSummary {
        ok: true,
        report: &ingested.report,
        graph_errors: Vec::new(),
        stats: Some(g.stats()),
    })
}

async fn shutdown_signal() {
    let _ = tokio::signal::ctrl_c().await;
    tracing::info!("shutting down");
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { config, seed, out } => {
            let mut cfg = match &config {
                None => GenConfig::default(),
                Some(p) => serde_json::from_str(&read_text(p)?)
                    .map_err(|e| CliError::validation(format!("{}: {e}", p.display())))?,
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let generated = generate(&cfg)?;
            generated.write(&out)?;
            tracing::info!(dir = %out.display(), entities = generated.ledger.stats.n_entities, "dataset written");
            Ok(())
        }
        Command::Ingest {
            input,
            mapping,
            ontology,
            out,
            report,
        } => run_ingest(&input, mapping.as_deref(), &ontology, &out, report.as_deref()),
        Command::Stats { graph, ontology } => {
            let g = load_graph(&graph, load_ontology(&ontology)?)?;
            print!("{}", to_json(&g.stats()));
            Ok(())
        }
        Command::Export {
            graph,
            ontology,
            format,
            out,
        } => {
            let g = load_graph(&graph, load_ontology(&ontology)?)?;
            let text = match format {
                Format::Ntriples => export_ntriples(&g, g.ontology().base_uri()),
                Format::Turtle => export_turtle(&g),
            };
            match out {
                Some(p) => write_text(&p, &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Cube {
            command: CubeCommand::Precompute {
                graph,
                ontology,
                spec,
                out,
            },
        } => {
            let g = load_graph(&graph, load_ontology(&ontology)?)?;
            let spec = load_spec(spec.as_deref())?;
            let store = precompute(&g, &spec)?;
            save_store(&store, &out)?;
            tracing::info!(cells = store.cells.len(), path = %out.display(), "cube written");
            Ok(())
        }
        Command::Serve {
            graph,
            ontology,
            cube,
            spec,
            host,
            port,
            cors_origin,
        } => {
            let g = load_graph(&graph, load_ontology(&ontology)?)?;
            let state = match &cube {
                Some(p) => AppState::new(g, load_store(p)?),
                None => AppState::precomputed(g, &load_spec(spec.as_deref())?),
            }
            .map_err(|e| match e {
                StateError::Cube(c) => c.into(),
                stale => CliError::validation(stale.to_string()),
            })?;
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .map_err(|e| CliError::Usage(format!("bad address `{host}:{port}`: {e}")))?;
            let app = router(Arc::new(state), &ServiceConfig { cors_origin });
            let rt = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| CliError::Io(e.to_string()))?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(addr)
                    .await
                    .map_err(|e| CliError::Io(format!("{addr}: {e}")))?;
                let bound = listener.local_addr().map_err(|e| CliError::Io(e.to_string()))?;
                tracing::info!(addr = %bound, "listening");
                serve(listener, app, shutdown_signal())
                    .await
                    .map_err(|e| CliError::Io(e.to_string()))
            })
        }
    }
}

/// Parses `args`, runs, reports any error as JSON on stderr; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
