//! Ontology-backed knowledge graph engine for maritime-history records.
//!
//! The crate bundles an in-memory triple store ([`Graph`]), the embedded
//! ontology ([`OntologySchema`]), a Turtle reader/writer ([`turtle`]), a
//! declarative table-to-graph mapper ([`mapping`]) and a SPARQL-subset
//! evaluator with optional RDFS entailment ([`query`]).

pub mod error;
pub mod graph;
pub mod mapping;
pub mod ontology;
pub mod query;
pub mod term;
pub mod turtle;
pub mod vocab;

pub use error::{ResolveError, TermError};
pub use graph::Graph;
pub use ontology::{OntologySchema, Severity, Violation, ViolationKind};
pub use term::{Iri, Literal, Term, Triple};
