//! A SPARQL subset: `PREFIX`, `SELECT [DISTINCT]` with variables and
//! `COUNT`, a basic graph pattern, `GROUP BY`, `ORDER BY` and `LIMIT`,
//! evaluated with or without RDFS entailment.

mod entail;
mod eval;
mod parser;
mod results;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::term::{escape_string, Iri, Literal};

pub use entail::{entailed_closure, rewrite, Expansion};
pub use eval::evaluate;
pub use parser::parse_query;
pub use results::{compare_terms, BindingsTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Hash)]
pub enum EntailmentMode {
    /// Asserted triples only.
    None,
    /// Subclass, subproperty, inverse and symmetric entailment.
    #[default]
    Rdfs,
}

impl std::str::FromStr for EntailmentMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(EntailmentMode::None),
            "rdfs" => Ok(EntailmentMode::Rdfs),
            other => Err(format!("unknown entailment mode {other:?} (expected none or rdfs)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(String),
    Iri(Iri),
    Literal(Literal),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl From<Iri> for PatternTerm {
    fn from(i: Iri) -> Self {
        PatternTerm::Iri(i)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        [&self.subject, &self.predicate, &self.object]
            .into_iter()
            .filter_map(PatternTerm::var)
    }
}

/// Shorthand for a variable pattern term.
pub fn var(name: &str) -> PatternTerm {
    PatternTerm::Var(name.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CountTarget {
    Var(String),
    /// `COUNT(*)`
    All,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Projection {
    Var(String),
    Count {
        target: CountTarget,
        distinct: bool,
        alias: String,
    },
}

impl Projection {
    pub fn name(&self) -> &str {
        match self {
            Projection::Var(v) => v,
            Projection::Count { alias, .. } => alias,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderKey {
    pub var: String,
    pub descending: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Query {
    pub prefixes: BTreeMap<String, Iri>,
    pub distinct: bool,
    /// Empty means `SELECT *`: every pattern variable in order of appearance.
    pub projection: Vec<Projection>,
    pub patterns: Vec<TriplePattern>,
    pub group_by: Vec<String>,
    pub order_by: Vec<OrderKey>,
    pub limit: Option<usize>,
}

impl Query {
    /// Variables of the basic graph pattern in order of first appearance.
    pub fn pattern_vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for v in self.patterns.iter().flat_map(TriplePattern::vars) {
            if !out.iter().any(|o| o == v) {
                out.push(v.to_string());
            }
        }
        out
    }

    pub fn is_aggregate(&self) -> bool {
        !self.group_by.is_empty()
            || self
                .projection
                .iter()
                .any(|p| matches!(p, Projection::Count { .. }))
    }

    /// Result column names.
    pub fn columns(&self) -> Vec<String> {
        if self.projection.is_empty() {
            self.pattern_vars()
        } else {
            self.projection.iter().map(|p| p.name().to_string()).collect()
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:{column}: unknown prefix {prefix:?}")]
    UnknownPrefix {
        line: usize,
        column: usize,
        prefix: String,
    },
}

impl QueryError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            QueryError::Syntax { line, column, .. } | QueryError::UnknownPrefix { line, column, .. } => {
                (*line, *column)
            }
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(i) => write!(f, "{i}"),
            PatternTerm::Literal(l) => {
                write!(f, "\"{}\"", escape_string(l.lexical()))?;
                if let Some(lang) = l.language() {
                    write!(f, "@{lang}")
                } else if let Some(dt) = l.datatype() {
                    write!(f, "^^{dt}")
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Renders the query as text that parses back to the same AST. Terms are
/// written as full IRIs; the prefix declarations are kept.
impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, ns) in &self.prefixes {
            writeln!(f, "PREFIX {p}: {ns}")?;
        }
        write!(f, "SELECT ")?;
        if self.distinct {
            write!(f, "DISTINCT ")?;
        }
        if self.projection.is_empty() {
            write!(f, "*")?;
        }
        for (i, p) in self.projection.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            match p {
                Projection::Var(v) => write!(f, "?{v}")?,
                Projection::Count {
                    target,
                    distinct,
                    alias,
                } => {
                    let d = if *distinct { "DISTINCT " } else { "" };
                    match target {
                        CountTarget::Var(v) => write!(f, "(COUNT({d}?{v}) AS ?{alias})")?,
                        CountTarget::All => write!(f, "(COUNT({d}*) AS ?{alias})")?,
                    }
                }
            }
        }
        writeln!(f, " WHERE {{")?;
        for t in &self.patterns {
            writeln!(f, "  {} {} {} .", t.subject, t.predicate, t.object)?;
        }
        write!(f, "}}")?;
        if !self.group_by.is_empty() {
            write!(f, " GROUP BY")?;
            for g in &self.group_by {
                write!(f, " ?{g}")?;
            }
        }
        if !self.order_by.is_empty() {
            write!(f, " ORDER BY")?;
            for k in &self.order_by {
                if k.descending {
                    write!(f, " DESC(?{})", k.var)?;
                } else {
                    write!(f, " ?{}", k.var)?;
                }
            }
        }
        if let Some(n) = self.limit {
            write!(f, " LIMIT {n}")?;
        }
        writeln!(f)
    }
}
