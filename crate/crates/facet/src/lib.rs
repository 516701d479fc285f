//! Faceted query building over a knowledge-graph snapshot: a fixed set of
//! search categories, configurable connections between them, compilation
//! of user-built states into queries, and a JSON API.

mod compile;
mod http;
mod registry;
mod run;

use thiserror::Error;

pub use compile::{compile, Clause, QueryState, COUNT_VAR, GROUP_LABEL_VAR, GROUP_VAR};
pub use http::{router, serve, AppState, DEFAULT_INSTANCE_LIMIT};
pub use registry::{ConnectionDef, Direction, FacetCategory, FacetModel, Step, DEFAULT_CONNECTIONS};
pub use run::{list_instances, run, stats, AggregationResult, Bucket, Instance, RunResult, Snapshot, Stats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FacetError {
    #[error("unknown category {0:?}")]
    UnknownCategory(String),
    #[error("unknown connection {0:?}")]
    UnknownConnection(String),
    #[error("connection {connection} step {step}: {message}")]
    PathType {
        connection: String,
        step: usize,
        message: String,
    },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid query state: {0}")]
    InvalidState(String),
    #[error("connection config: {0}")]
    Config(String),
}
