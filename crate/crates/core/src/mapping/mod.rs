//! Declarative mapping of tabular record transcripts to graph triples.
//!
//! A mapping file (`.map`) describes, for one record template, which table
//! columns name entities, which ontology class and IRI category they get, and
//! how entities link to each other or to literal columns. See
//! `docs/mapping-format.md` for the full format.

mod apply;
mod bundle;
mod mint;
mod parse;

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::term::Iri;

pub use apply::apply_mapping;
pub use bundle::{RecordBundle, Table};
pub use mint::{normalize_label, slug, MintPolicy};
pub use parse::parse_mapping;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingSpec {
    pub template_id: String,
    pub prefixes: BTreeMap<String, Iri>,
    pub entities: Vec<EntityRule>,
    pub links: Vec<LinkRule>,
    pub attrs: Vec<AttrRule>,
    pub consts: Vec<ConstRule>,
}

/// `entity <name> from <table>.<col>[+<col>...] as <class> category <cat>`.
/// The label of the entity is the non-empty key cells joined by a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntityRule {
    pub name: String,
    pub table: String,
    pub columns: Vec<String>,
    pub class: Iri,
    pub category: String,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Emit nothing when the target cell is empty.
    #[default]
    Skip,
    /// Link to the category's `unknown` placeholder node.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkTarget {
    Entity(String),
    Literal {
        table: String,
        column: String,
        datatype: Option<Iri>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkRule {
    /// Name used by `attr` rules; defaults to `<source>.<property local name>`.
    pub name: String,
    pub source: String,
    pub property: Iri,
    pub target: LinkTarget,
    pub missing: MissingPolicy,
    pub line: usize,
}

/// A property-of-property value attached to every instance of a link, which
/// makes the link reified through its property class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttrRule {
    pub link: String,
    pub attribute: Iri,
    pub table: String,
    pub column: String,
    pub category: String,
    pub line: usize,
}

/// `const <entity> -<property>-> <iri>`: the same object for every instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstRule {
    pub entity: String,
    pub property: Iri,
    pub value: Iri,
    pub line: usize,
}

#[derive(Debug, Error)]
pub enum MappingError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown property {property}")]
    UnknownProperty { line: usize, property: Iri },
    #[error("line {line}: unknown class {class}")]
    UnknownClass { line: usize, class: Iri },
    #[error("line {line}: domain/range incompatible: {message}")]
    Incompatible { line: usize, message: String },
    #[error("mapping is for template {expected:?} but the record uses {found:?}")]
    TemplateMismatch { expected: String, found: String },
    #[error("table {table:?} not found in record bundle{}", expected_file(origin, table))]
    MissingTable { table: String, origin: Option<PathBuf> },
    #[error("table {table:?} has no column {column:?}")]
    MissingColumn { table: String, column: String },
    #[error("table {table:?}, row {row}: {message}")]
    MalformedRow { table: String, row: usize, message: String },
    #[error("link {link:?} joins tables {left:?} and {right:?}, which both have several rows")]
    AmbiguousJoin { link: String, left: String, right: String },
    #[error("empty label for category {category:?}")]
    EmptyLabel { category: String },
    #[error("{path}: {message}")]
    Bundle { path: PathBuf, message: String },
}

fn expected_file(origin: &Option<PathBuf>, table: &str) -> String {
    match origin {
        Some(dir) => format!(" (expected file {})", dir.join(format!("{table}.csv")).display()),
        None => String::new(),
    }
}
