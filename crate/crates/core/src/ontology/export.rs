use super::{Direction, OntologySchema, Range, VERSION};
use crate::graph::Graph;
use crate::term::{Iri, Literal, Triple};
use crate::vocab::{self, owl, rdf_type, rdfs};

impl OntologySchema {
    /// RDFS rendering of the schema, with `owl:inverseOf` links, the
    /// symmetric property typed `owl:SymmetricProperty`, and the ontology
    /// version as `owl:versionInfo`.
    pub fn to_graph(&self) -> Graph {
        let mut g = Graph::new();
        let ontology = Iri::new(vocab::SEALIT).expect("valid namespace");
        g.insert(Triple::new(ontology.clone(), rdf_type(), owl("Ontology")));
        g.insert(Triple::new(ontology, owl("versionInfo"), Literal::plain(VERSION)));

        for c in self.classes() {
            g.insert(Triple::new(c.id.clone(), rdf_type(), rdfs("Class")));
            g.insert(Triple::new(c.id.clone(), rdfs("label"), Literal::plain(&c.label)));
            for s in &c.direct_superclasses {
                g.insert(Triple::new(c.id.clone(), rdfs("subClassOf"), s.clone()));
            }
        }
        for p in self.properties() {
            let id = &p.id;
            g.insert(Triple::new(id.clone(), rdf_type(), vocab::rdf("Property")));
            g.insert(Triple::new(id.clone(), rdfs("label"), Literal::plain(&p.label)));
            g.insert(Triple::new(id.clone(), rdfs("domain"), p.domain.clone()));
            let range = match &p.range {
                Range::Class(c) => c.clone(),
                Range::Literal(_) => rdfs("Literal"),
            };
            g.insert(Triple::new(id.clone(), rdfs("range"), range));
            for s in &p.direct_superproperties {
                g.insert(Triple::new(id.clone(), rdfs("subPropertyOf"), s.clone()));
            }
            if let (Some(inv), Direction::Forward) = (&p.inverse, p.direction) {
                g.insert(Triple::new(id.clone(), owl("inverseOf"), inv.clone()));
            }
            if p.symmetric {
                g.insert(Triple::new(id.clone(), rdf_type(), owl("SymmetricProperty")));
            }
        }
        for pc in self.property_classes() {
            for a in &pc.attributes {
                g.insert(Triple::new(a.id.clone(), rdf_type(), vocab::rdf("Property")));
                g.insert(Triple::new(a.id.clone(), rdfs("label"), Literal::plain(&a.label)));
                g.insert(Triple::new(a.id.clone(), rdfs("domain"), pc.id.clone()));
                g.insert(Triple::new(a.id.clone(), rdfs("range"), a.range.clone()));
            }
        }
        g
    }
}
