use std::collections::{BTreeMap, BTreeSet};

use super::{OntologySchema, SchemaError};
use crate::term::{Iri, Term, Triple};
use crate::vocab;

impl OntologySchema {
    /// Encodes one instance of `base_property` together with its
    /// properties-of-properties through the property class of the base
    /// property:
    ///
    /// ```text
    /// node  rdf:type        PC_<base>
    /// node  P01_has_domain  subject
    /// node  P02_has_range   object
    /// node  <attribute>     value        (one per attribute)
    /// subject  <base>       object       (the direct statement is kept)
    /// ```
    pub fn reify(
        &self,
        subject: &Iri,
        base_property: &Iri,
        object: &Iri,
        attributes: &BTreeMap<Iri, Term>,
        node_id: &Iri,
    ) -> Result<BTreeSet<Triple>, SchemaError> {
        let pc = self
            .property_class_for(base_property)
            .ok_or_else(|| SchemaError::UnknownPropertyClass(base_property.clone()))?;
        for attr in attributes.keys() {
            if !pc.attributes.iter().any(|a| &a.id == attr) {
                return Err(SchemaError::UnknownAttribute {
                    property: base_property.clone(),
                    attribute: attr.clone(),
                });
            }
        }
        let mut out = BTreeSet::new();
        out.insert(Triple::new(node_id.clone(), vocab::rdf_type(), pc.id.clone()));
        out.insert(Triple::new(
            node_id.clone(),
            vocab::crm("P01_has_domain"),
            subject.clone(),
        ));
        out.insert(Triple::new(
            node_id.clone(),
            vocab::crm("P02_has_range"),
            object.clone(),
        ));
        for (attr, value) in attributes {
            out.insert(Triple::new(node_id.clone(), attr.clone(), value.clone()));
        }
        out.insert(Triple::new(
            subject.clone(),
            base_property.clone(),
            object.clone(),
        ));
        Ok(out)
    }
}
