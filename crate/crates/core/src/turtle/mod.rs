//! Reader and writer for the Turtle subset used by the knowledge base.
//!
//! Supported: `@prefix`, absolute IRIs, prefixed names, `a`, predicate lists
//! (`;`), object lists (`,`), single-line string literals with escapes,
//! language tags and `^^` datatypes, and `#` comments. Blank nodes,
//! collections, numeric/boolean shorthand, `@base`/relative IRIs and long
//! strings are rejected with a diagnostic.

mod parser;
mod serializer;

use std::fmt;

use serde::Serialize;

use crate::graph::Graph;
pub use crate::ontology::Severity;
pub use serializer::serialize_turtle;

/// A located problem found while reading Turtle. Lines and columns are
/// 1-based and count characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Parses Turtle text. Never fails: on a syntax error the offending
/// statement is skipped and reading resumes after the next `.`, so the
/// returned graph holds every triple read before and after the error.
pub fn parse_turtle(text: &str) -> (Graph, Vec<ParseDiagnostic>) {
    parser::parse(text)
}

/// Like [`parse_turtle`], but the input must first be valid UTF-8.
pub fn parse_turtle_bytes(bytes: &[u8]) -> Result<(Graph, Vec<ParseDiagnostic>), std::str::Utf8Error> {
    Ok(parse_turtle(std::str::from_utf8(bytes)?))
}

/// True if any diagnostic is an error.
pub fn has_errors(diagnostics: &[ParseDiagnostic]) -> bool {
    diagnostics.iter().any(|d| d.severity == Severity::Error)
}
