//! IRIs, literals and triples.

use std::fmt;
use std::sync::Arc;

use crate::error::TermError;

/// An absolute IRI.
///
/// Cloning is cheap: the string is reference counted so the same IRI can sit
/// in all three graph indexes without copying.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, TermError> {
        let value = value.as_ref();
        if value.is_empty() {
            return Err(TermError::EmptyIri);
        }
        if let Some(c) = value.chars().find(|c| c.is_whitespace() || is_forbidden_iri_char(*c)) {
            return Err(TermError::InvalidIriChar {
                iri: value.to_string(),
                found: c,
            });
        }
        if !has_scheme(value) {
            return Err(TermError::MissingScheme(value.to_string()));
        }
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The part after the last `/` or `#`, used as a display fallback.
    pub fn local_name(&self) -> &str {
        let s = self.as_str();
        match s.rfind(['/', '#']) {
            Some(i) if i + 1 < s.len() => &s[i + 1..],
            _ => s,
        }
    }
}

fn is_forbidden_iri_char(c: char) -> bool {
    matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') || c.is_control()
}

fn has_scheme(value: &str) -> bool {
    let Some(colon) = value.find(':') else {
        return false;
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

/// A literal value. Datatype and language tag are mutually exclusive.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    lexical: String,
    datatype: Option<Iri>,
    language: Option<String>,
}

impl Literal {
    pub fn plain(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Some(datatype),
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Result<Self, TermError> {
        let language = language.into();
        if !is_language_tag(&language) {
            return Err(TermError::InvalidLanguageTag(language));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: None,
            language: Some(language),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Option<&Iri> {
        self.datatype.as_ref()
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// The integer value when typed as `xsd:integer` (or one of its common
    /// derived types) and lexically valid.
    pub fn as_integer(&self) -> Option<i64> {
        let dt = self.datatype.as_ref()?;
        let local = dt.as_str().strip_prefix(crate::vocab::XSD)?;
        match local {
            "integer" | "int" | "long" | "short" | "nonNegativeInteger" | "positiveInteger" => {
                self.lexical.trim().parse().ok()
            }
            _ => None,
        }
    }
}

pub(crate) fn is_language_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let Some(first) = parts.next() else {
        return false;
    };
    if first.is_empty() || first.len() > 8 || !first.chars().all(|c| c.is_ascii_alphabetic()) {
        return false;
    }
    parts.all(|p| !p.is_empty() && p.len() <= 8 && p.chars().all(|c| c.is_ascii_alphanumeric()))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", escape_string(&self.lexical))?;
        if let Some(lang) = &self.language {
            write!(f, "@{lang}")
        } else if let Some(dt) = &self.datatype {
            write!(f, "^^{dt}")
        } else {
            Ok(())
        }
    }
}

/// Escapes a string for a double-quoted Turtle/SPARQL literal.
pub fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

/// Object position of a triple. IRIs order before literals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(i) => Some(i),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            Term::Iri(_) => None,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// Plain string form: the IRI itself or the literal's lexical form.
    pub fn lexical(&self) -> &str {
        match self {
            Term::Iri(i) => i.as_str(),
            Term::Literal(l) => l.lexical(),
        }
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(i) => i.fmt(f),
            Term::Literal(l) => l.fmt(f),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: Iri, predicate: Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject,
            predicate,
            object: object.into(),
        }
    }

    /// Builds a triple from terms, rejecting literals in subject or predicate
    /// position.
    pub fn from_terms(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        let Term::Iri(subject) = subject else {
            return Err(TermError::LiteralSubject);
        };
        let Term::Iri(predicate) = predicate else {
            return Err(TermError::LiteralPredicate);
        };
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://a/b").is_ok());
        assert!(Iri::new("urn:x:y").is_ok());
        assert!(matches!(Iri::new("SHIP-URI"), Err(TermError::MissingScheme(_))));
        assert!(matches!(Iri::new(""), Err(TermError::EmptyIri)));
        assert!(matches!(Iri::new("http://a b"), Err(TermError::InvalidIriChar { .. })));
        assert!(Iri::new("1http://x").is_err());
    }

    #[test]
    fn local_name_takes_last_segment() {
        let i = Iri::new("https://rs.sealitproject.eu/kb/location/Marseille").unwrap();
        assert_eq!(i.local_name(), "Marseille");
        let i = Iri::new("http://www.w3.org/2000/01/rdf-schema#label").unwrap();
        assert_eq!(i.local_name(), "label");
    }

    #[test]
    fn literal_from_terms_rejected_in_subject() {
        let p = Term::Iri(Iri::new("http://x/p").unwrap());
        let l = Term::Literal(Literal::plain("x"));
        assert!(matches!(
            Triple::from_terms(l.clone(), p.clone(), l.clone()),
            Err(TermError::LiteralSubject)
        ));
        assert!(matches!(
            Triple::from_terms(p.clone(), l.clone(), l),
            Err(TermError::LiteralPredicate)
        ));
    }

    #[test]
    fn language_tags() {
        assert!(Literal::lang("x", "en").is_ok());
        assert!(Literal::lang("x", "en-GB").is_ok());
        assert!(Literal::lang("x", "").is_err());
        assert!(Literal::lang("x", "e n").is_err());
    }

    #[test]
    fn integer_literals() {
        let xsd_int = Iri::new(format!("{}integer", crate::vocab::XSD)).unwrap();
        assert_eq!(Literal::typed("12", xsd_int.clone()).as_integer(), Some(12));
        assert_eq!(Literal::typed("x", xsd_int).as_integer(), None);
        assert_eq!(Literal::plain("12").as_integer(), None);
    }
}
