use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("empty IRI")]
    EmptyIri,
    #[error("IRI {iri:?} contains forbidden character {found:?}")]
    InvalidIriChar { iri: String, found: char },
    #[error("IRI {0:?} has no scheme")]
    MissingScheme(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("malformed triple: literal in subject position")]
    LiteralSubject,
    #[error("malformed triple: literal in predicate position")]
    LiteralPredicate,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResolveError {
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("not a prefixed name or bracketed IRI: {0:?}")]
    NotACurie(String),
    #[error(transparent)]
    Term(#[from] TermError),
}
