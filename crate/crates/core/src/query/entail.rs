use std::collections::BTreeSet;

use super::{PatternTerm, Query, TriplePattern};
use crate::graph::Graph;
use crate::ontology::{Entailed, OntologySchema};
use crate::term::{Iri, Term, Triple};
use crate::vocab;

/// How one triple pattern is answered under RDFS entailment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// Union of concrete patterns over the asserted triples. Each entry is
    /// the pattern to match and whether its subject and object are swapped
    /// with respect to the original pattern.
    Alternatives(Vec<(TriplePattern, bool)>),
    /// Variable predicate, or `rdf:type` with a variable class: every
    /// candidate triple is closed individually and filtered.
    Closure(TriplePattern),
}

/// Rewrites each pattern of the query into its entailment expansion.
pub fn rewrite(query: &Query, schema: &OntologySchema) -> Vec<Expansion> {
    query.patterns.iter().map(|p| expand(p, schema)).collect()
}

fn entailing(schema: &OntologySchema, p: &Iri) -> Vec<Entailed> {
    match schema.entailing(p) {
        Some(set) => set.iter().cloned().collect(),
        None => vec![Entailed {
            property: p.clone(),
            flipped: false,
        }],
    }
}

fn with_subclasses(schema: &OntologySchema, c: &Iri) -> Vec<Iri> {
    let mut out = vec![c.clone()];
    if let Ok(subs) = schema.subclasses(c) {
        out.extend(subs.iter().cloned());
    }
    out
}

pub(crate) fn expand(pattern: &TriplePattern, schema: &OntologySchema) -> Expansion {
    let rdf_type = vocab::rdf_type();
    match (&pattern.predicate, &pattern.object) {
        (PatternTerm::Iri(p), PatternTerm::Iri(c)) if *p == rdf_type => Expansion::Alternatives(
            with_subclasses(schema, c)
                .into_iter()
                .map(|c| {
                    let t = TriplePattern::new(pattern.subject.clone(), p.clone(), c);
                    (t, false)
                })
                .collect(),
        ),
        (PatternTerm::Iri(p), _) if *p != rdf_type => Expansion::Alternatives(
            entailing(schema, p)
                .into_iter()
                .filter(|e| !(e.flipped && matches!(pattern.object, PatternTerm::Literal(_))))
                .map(|e| {
                    let q = PatternTerm::Iri(e.property);
                    let t = if e.flipped {
                        TriplePattern::new(pattern.object.clone(), q, pattern.subject.clone())
                    } else {
                        TriplePattern::new(pattern.subject.clone(), q, pattern.object.clone())
                    };
                    (t, e.flipped)
                })
                .collect(),
        ),
        _ => Expansion::Closure(pattern.clone()),
    }
}

/// Everything a single asserted triple entails, itself included.
pub fn entailed_closure(t: &Triple, schema: &OntologySchema) -> BTreeSet<Triple> {
    let mut out = BTreeSet::new();
    out.insert(t.clone());
    if t.predicate == vocab::rdf_type() {
        if let Term::Iri(c) = &t.object {
            if let Ok(supers) = schema.superclasses(c) {
                for d in supers {
                    out.insert(Triple::new(t.subject.clone(), t.predicate.clone(), d.clone()));
                }
            }
        }
        return out;
    }
    if let Some(targets) = schema.entailments_of(&t.predicate) {
        for e in targets {
            if !e.flipped {
                out.insert(Triple::new(t.subject.clone(), e.property.clone(), t.object.clone()));
            } else if let Term::Iri(o) = &t.object {
                out.insert(Triple::new(o.clone(), e.property.clone(), t.subject.clone()));
            }
        }
    }
    out
}

/// Asserted or entailed triples matching the bound positions. Each entailed
/// triple is reported once, however many asserted triples entail it.
pub(crate) fn entailed_matches(
    g: &Graph,
    schema: &OntologySchema,
    s: Option<&Iri>,
    p: Option<&Iri>,
    o: Option<&Term>,
) -> BTreeSet<Triple> {
    let mut out = BTreeSet::new();
    let rdf_type = vocab::rdf_type();
    let object_iri = |o: Option<&Term>| -> Option<Option<Iri>> {
        match o {
            Some(Term::Iri(i)) => Some(Some(i.clone())),
            Some(Term::Literal(_)) => None,
            None => Some(None),
        }
    };
    match p {
        Some(p) if *p == rdf_type => match o {
            Some(Term::Iri(c)) => {
                for sub in with_subclasses(schema, c) {
                    g.for_each_match(s, Some(p), Some(&Term::Iri(sub)), |t| {
                        out.insert(Triple::new(t.subject.clone(), p.clone(), c.clone()));
                    });
                }
            }
            _ => {
                g.for_each_match(s, Some(p), o, |t| {
                    for e in entailed_closure(&t.clone(), schema) {
                        if o.is_none_or(|o| *o == e.object) {
                            out.insert(e);
                        }
                    }
                });
            }
        },
        Some(p) => {
            for e in entailing(schema, p) {
                if !e.flipped {
                    g.for_each_match(s, Some(&e.property), o, |t| {
                        out.insert(Triple::new(t.subject.clone(), p.clone(), t.object.clone()));
                    });
                } else if let Some(oi) = object_iri(o) {
                    let s_term = s.map(|s| Term::Iri(s.clone()));
                    g.for_each_match(oi.as_ref(), Some(&e.property), s_term.as_ref(), |t| {
                        if let Term::Iri(y) = &t.object {
                            out.insert(Triple::new(y.clone(), p.clone(), t.subject.clone()));
                        }
                    });
                }
            }
        }
        None => {
            let mut candidates = g.match_pattern(s, None, o);
            if let Some(oi) = object_iri(o) {
                let s_term = s.map(|s| Term::Iri(s.clone()));
                candidates.extend(g.match_pattern(oi.as_ref(), None, s_term.as_ref()));
            }
            for t in candidates {
                for e in entailed_closure(&t, schema) {
                    if s.is_none_or(|s| *s == e.subject) && o.is_none_or(|o| *o == e.object) {
                        out.insert(e);
                    }
                }
            }
        }
    }
    out
}
