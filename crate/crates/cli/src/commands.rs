use std::collections::BTreeMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use mariner_core::mapping::{apply_mapping, parse_mapping, MappingSpec, MintPolicy, RecordBundle};
use mariner_core::query::{evaluate, parse_query, EntailmentMode};
use mariner_core::turtle::{has_errors, parse_turtle, serialize_turtle};
use mariner_core::{Graph, OntologySchema, Severity, Violation};
use mariner_facet::{AppState, FacetModel, Snapshot};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0} ERROR violation(s)")]
    Violations(usize),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Violations(_) => 1,
            CliError::Io { .. } | CliError::Input(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_kb(path: &Path) -> Result<Graph, CliError> {
    let text = read(path)?;
    let (graph, diagnostics) = parse_turtle(&text);
    for d in &diagnostics {
        eprintln!("{}:{d}", path.display());
    }
    if has_errors(&diagnostics) {
        return Err(CliError::Input(format!("{}: not valid Turtle", path.display())));
    }
    Ok(graph)
}

fn report(violations: &[Violation]) -> usize {
    for v in violations {
        eprintln!("{v}");
    }
    violations.iter().filter(|v| v.severity == Severity::Error).count()
}

pub fn ingest(mappings: &[PathBuf], records: &[PathBuf], out: &Path, strict: bool) -> Result<(), CliError> {
    let schema = OntologySchema::load_builtin();
    let mut specs: BTreeMap<String, MappingSpec> = BTreeMap::new();
    for path in mappings {
        let spec = parse_mapping(&read(path)?, &schema)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        if specs.contains_key(&spec.template_id) {
            return Err(CliError::Input(format!(
                "{}: a mapping for template {:?} was already given",
                path.display(),
                spec.template_id
            )));
        }
        specs.insert(spec.template_id.clone(), spec);
    }
    let policy = MintPolicy::default();
    let mut kb = Graph::new();
    for dir in records {
        let bundle = RecordBundle::load(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        let spec = specs.get(&bundle.template_id).ok_or_else(|| {
            CliError::Input(format!(
                "{}: no mapping for template {:?}",
                dir.display(),
                bundle.template_id
            ))
        })?;
        let (graph, _) = apply_mapping(spec, &bundle, &schema, &policy)
            .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        kb.merge(&graph);
    }
    let errors = report(&schema.validate(&kb));
    if strict && errors > 0 {
        return Err(CliError::Violations(errors));
    }
    write(out, &serialize_turtle(&kb))?;
    eprintln!("wrote {} triples to {}", kb.len(), out.display());
    Ok(())
}

pub fn query(kb: &Path, query: &Path, mode: EntailmentMode, json: bool) -> Result<(), CliError> {
    let text = read(query)?;
    let q = parse_query(&text).map_err(|e| CliError::Input(format!("{}:{e}", query.display())))?;
    let graph = load_kb(kb)?;
    let table = evaluate(&q, &graph, &OntologySchema::load_builtin(), mode);
    let out = if json {
        let mut s = serde_json::to_string_pretty(&table.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        table.to_csv()
    };
    print(&out)
}

pub fn validate(kb: &Path, strict: bool) -> Result<(), CliError> {
    let graph = load_kb(kb)?;
    let violations = OntologySchema::load_builtin().validate(&graph);
    let mut out = String::from("severity\tkind\tmessage\ttriple\n");
    for v in &violations {
        out.push_str(&format!("{v}\n"));
    }
    print(&out)?;
    let errors = violations.iter().filter(|v| v.severity == Severity::Error).count();
    eprintln!("{errors} error(s), {} warning(s)", violations.len() - errors);
    if strict && errors > 0 {
        return Err(CliError::Violations(errors));
    }
    Ok(())
}

pub fn stats(kb: &Path) -> Result<(), CliError> {
    let graph = load_kb(kb)?;
    let s = mariner_facet::stats(&Snapshot::new(graph, OntologySchema::load_builtin()));
    print(&format!(
        "triples={}\nships={}\npersons={}\nlegalBodies={}\nlocations={}\n",
        s.triples, s.ships, s.persons, s.legal_bodies, s.locations
    ))
}

pub fn serve(kb: &Path, connections: Option<&Path>, port: Option<u16>) -> Result<(), CliError> {
    let schema = OntologySchema::load_builtin();
    let model = match connections {
        Some(path) => FacetModel::from_toml(&read(path)?, &schema)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => FacetModel::builtin(&schema),
    };
    let port = match port {
        Some(p) => p,
        None => match std::env::var("PORT") {
            Ok(p) => p
                .parse()
                .map_err(|_| CliError::Input(format!("PORT={p:?} is not a port number")))?,
            Err(_) => 8080,
        },
    };
    let graph = load_kb(kb)?;
    let state = AppState {
        model,
        snapshot: Snapshot::new(graph, schema),
    };
    let addr = SocketAddr::from(([0, 0, 0, 0], port));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Input(e.to_string()))?;
    eprintln!("listening on http://{addr}");
    runtime
        .block_on(mariner_facet::serve(state, addr))
        .map_err(|e| CliError::Input(format!("serve on port {port}: {e}")))
}

pub fn export_ontology(out: Option<&Path>) -> Result<(), CliError> {
    let text = serialize_turtle(&OntologySchema::load_builtin().to_graph());
    match out {
        Some(path) => write(path, &text),
        None => print(&text),
    }
}

fn print(text: &str) -> Result<(), CliError> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|_| stdout.flush())
        .map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}
