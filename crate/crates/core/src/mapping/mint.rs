use std::fmt::Write;

use super::MappingError;
use crate::term::Iri;
use crate::vocab;

/// How node IRIs are minted: `base + category + "/" + slug(label)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MintPolicy {
    pub base: Iri,
}

impl Default for MintPolicy {
    fn default() -> Self {
        MintPolicy {
            base: Iri::new(vocab::KB).expect("valid base"),
        }
    }
}

/// Trims the label and collapses internal whitespace runs to one space.
/// Labels equal after normalization denote the same node.
pub fn normalize_label(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Case-preserving slug: whitespace runs become `_`, ASCII letters, digits
/// and `-` `.` `~` are kept, everything else (including a literal `_`) is
/// percent-encoded as UTF-8, so distinct normalized labels give distinct
/// slugs.
pub fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for (i, word) in label.split_whitespace().enumerate() {
        if i > 0 {
            out.push('_');
        }
        for b in word.bytes() {
            if b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'~') {
                out.push(b as char);
            } else {
                let _ = write!(out, "%{b:02X}");
            }
        }
    }
    out
}

impl MintPolicy {
    pub fn new(base: Iri) -> Self {
        MintPolicy { base }
    }

    pub fn mint(&self, category: &str, label: &str) -> Result<Iri, MappingError> {
        let mut slug = slug(label);
        if slug == "unknown" {
            // Keep real values named "unknown" apart from the placeholder.
            slug = "%75nknown".to_string();
        }
        if slug.is_empty() {
            return Err(MappingError::EmptyLabel {
                category: category.to_string(),
            });
        }
        Ok(self.join(&format!("{category}/{slug}")))
    }

    /// The single placeholder standing for a missing value in a category.
    pub fn unknown(&self, category: &str) -> Iri {
        self.join(&format!("{category}/unknown"))
    }

    pub fn is_unknown(&self, iri: &Iri) -> bool {
        iri.as_str()
            .strip_prefix(self.base.as_str())
            .and_then(|rest| rest.split_once('/'))
            .is_some_and(|(cat, tail)| tail == "unknown" && !cat.contains('/'))
    }

    /// Path of `iri` below the base, or its local name if it lies elsewhere.
    pub(crate) fn tail<'a>(&self, iri: &'a Iri) -> &'a str {
        iri.as_str()
            .strip_prefix(self.base.as_str())
            .unwrap_or_else(|| iri.local_name())
    }

    fn join(&self, path: &str) -> Iri {
        Iri::new(format!("{}{}", self.base.as_str(), path)).expect("slug characters are IRI-safe")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marseille() {
        let p = MintPolicy::default();
        let a = p.mint("location", "Marseille").unwrap();
        assert_eq!(a.as_str(), "https://rs.sealitproject.eu/kb/location/Marseille");
        assert_eq!(a, p.mint("location", "Marseille").unwrap());
    }

    #[test]
    fn slug_rules() {
        assert_eq!(slug("  Santa   Margherita\tLigure "), "Santa_Margherita_Ligure");
        assert_eq!(slug("José Álvarez"), "Jos%C3%A9_%C3%81lvarez");
        assert_eq!(slug("a_b"), "a%5Fb");
        assert_eq!(slug("G. Schiaffino"), "G._Schiaffino");
        assert_eq!(slug("50/50"), "50%2F50");
        assert_ne!(slug("a b"), slug("a_b"));
    }

    #[test]
    fn empty_label_is_an_error() {
        let p = MintPolicy::default();
        assert!(matches!(p.mint("ship", "  \t"), Err(MappingError::EmptyLabel { .. })));
    }

    #[test]
    fn unknown_placeholder() {
        let p = MintPolicy::default();
        let u = p.unknown("location");
        assert_eq!(u.as_str(), "https://rs.sealitproject.eu/kb/location/unknown");
        assert!(p.is_unknown(&u));
        assert!(!p.is_unknown(&p.mint("location", "Marseille").unwrap()));
        let named = p.mint("location", "unknown").unwrap();
        assert_ne!(named, u);
        assert!(!p.is_unknown(&named));
    }
}
