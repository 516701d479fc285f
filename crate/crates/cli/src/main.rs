mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mariner_core::query::EntailmentMode;

#[derive(Parser)]
#[command(name = "mariner", version, about = "Maritime-history knowledge graph pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Rdfs,
    None,
}

impl From<Mode> for EntailmentMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rdfs => EntailmentMode::Rdfs,
            Mode::None => EntailmentMode::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Map record bundles to triples and write the union as Turtle.
    Ingest {
        #[arg(long = "mapping", num_args = 1..)]
        mappings: Vec<PathBuf>,
        #[arg(long = "records", num_args = 1..)]
        records: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Fail (exit 1) when the mapped graph has ERROR violations.
        #[arg(long)]
        strict: bool,
    },
    /// Evaluate a query file against a knowledge graph.
    Query {
        #[arg(long)]
        kb: PathBuf,
        #[arg(long)]
        query: PathBuf,
        #[arg(long, value_enum, default_value = "rdfs")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Check a knowledge graph against the ontology's domains and ranges.
    Validate {
        #[arg(long)]
        kb: PathBuf,
        /// Exit 1 when there are ERROR violations.
        #[arg(long)]
        strict: bool,
    },
    /// Triple and entity counts.
    Stats {
        #[arg(long)]
        kb: PathBuf,
    },
    /// Run the faceted-search HTTP API.
    Serve {
        #[arg(long)]
        kb: PathBuf,
        /// Connection definitions; the shipped set is used when omitted.
        #[arg(long)]
        connections: Option<PathBuf>,
        /// Defaults to $PORT, then 8080.
        #[arg(long)]
        port: Option<u16>,
    },
    /// Ontology utilities.
    Ontology {
        #[command(subcommand)]
        command: OntologyCommand,
    },
}

#[derive(Subcommand)]
enum OntologyCommand {
    /// Write the embedded schema as RDFS Turtle.
    Export {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Ingest {
            mappings,
            records,
            out,
            strict,
        } => commands::ingest(&mappings, &records, &out, strict),
        Command::Query {
            kb,
            query,
            mode,
            format,
        } => commands::query(&kb, &query, mode.into(), matches!(format, Format::Json)),
        Command::Validate { kb, strict } => commands::validate(&kb, strict),
        Command::Stats { kb } => commands::stats(&kb),
        Command::Serve { kb, connections, port } => commands::serve(&kb, connections.as_deref(), port),
        Command::Ontology {
            command: OntologyCommand::Export { out },
        } => commands::export_ontology(out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mariner: {e}");
            ExitCode::from(e.code())
        }
    }
}
