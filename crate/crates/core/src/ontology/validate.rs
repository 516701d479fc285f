use std::fmt;

use serde::Serialize;

use super::{OntologySchema, Range};
use crate::graph::Graph;
use crate::term::{Iri, Term, Triple};
use crate::vocab;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Subject has types, none of which falls under the declared domain.
    Domain,
    /// Object has types, none of which falls under the declared range.
    Range,
    /// Literal-ranged property with an IRI object.
    LiteralExpected,
    /// Class-ranged property with a literal object.
    IriExpected,
    /// Subject or object carries no `rdf:type`, so it cannot be checked.
    Untypable,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub triple: Triple,
    pub kind: ViolationKind,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        };
        write!(f, "{sev}\t{:?}\t{}\t{}", self.kind, self.message, self.triple)
    }
}

impl OntologySchema {
    /// Checks every triple with a known property (or property-of-property
    /// attribute) against its declared domain and range, using the subclass
    /// closure of the asserted `rdf:type`s. Unknown predicates are ignored.
    pub fn validate(&self, graph: &Graph) -> Vec<Violation> {
        let mut out = Vec::new();
        let ty = vocab::rdf_type();
        for t in graph.triples() {
            if t.predicate == ty {
                continue;
            }
            if let Some(def) = self.property(&t.predicate) {
                self.check_node(graph, &t, &t.subject, std::slice::from_ref(&def.domain), true, &mut out);
                match (&def.range, &t.object) {
                    (Range::Literal(_), Term::Literal(_)) => {}
                    (Range::Literal(c), Term::Iri(_)) => out.push(Violation {
                        triple: t.clone(),
                        kind: ViolationKind::LiteralExpected,
                        severity: Severity::Error,
                        message: format!("range is a literal ({})", c.local_name()),
                    }),
                    (Range::Class(c), Term::Literal(_)) => out.push(Violation {
                        triple: t.clone(),
                        kind: ViolationKind::IriExpected,
                        severity: Severity::Error,
                        message: format!("range is class {}", c.local_name()),
                    }),
                    (Range::Class(c), Term::Iri(o)) => {
                        self.check_node(graph, &t, o, std::slice::from_ref(c), false, &mut out)
                    }
                }
            } else if let Some(owners) = self.attribute_owners(&t.predicate) {
                let owners: Vec<Iri> = owners.iter().cloned().collect();
                self.check_node(graph, &t, &t.subject, &owners, true, &mut out);
                let range = self
                    .property_classes()
                    .flat_map(|pc| pc.attributes.iter())
                    .find(|a| a.id == t.predicate)
                    .map(|a| a.range.clone())
                    .expect("attribute has an owner");
                match &t.object {
                    Term::Iri(o) => {
                        self.check_node(graph, &t, o, std::slice::from_ref(&range), false, &mut out)
                    }
                    Term::Literal(_) => out.push(Violation {
                        triple: t.clone(),
                        kind: ViolationKind::IriExpected,
                        severity: Severity::Error,
                        message: format!("range is class {}", range.local_name()),
                    }),
                }
            }
        }
        out
    }

    fn check_node(
        &self,
        graph: &Graph,
        t: &Triple,
        node: &Iri,
        expected: &[Iri],
        is_subject: bool,
        out: &mut Vec<Violation>,
    ) {
        let role = if is_subject { "subject" } else { "object" };
        let types: Vec<&Iri> = graph.types_of(node).collect();
        if types.is_empty() {
            out.push(Violation {
                triple: t.clone(),
                kind: ViolationKind::Untypable,
                severity: Severity::Warning,
                message: format!("{role} {node} has no rdf:type"),
            });
            return;
        }
        let ok = types
            .iter()
            .any(|ty| expected.iter().any(|e| self.is_subclass_of(ty, e)));
        if !ok {
            let want: Vec<&str> = expected.iter().map(|e| e.local_name()).collect();
            let got: Vec<&str> = types.iter().map(|e| e.local_name()).collect();
            out.push(Violation {
                triple: t.clone(),
                kind: if is_subject {
                    ViolationKind::Domain
                } else {
                    ViolationKind::Range
                },
                severity: Severity::Error,
                message: format!(
                    "{role} typed {} is not a {}",
                    got.join("/"),
                    want.join(" or ")
                ),
            });
        }
    }
}
