//! Namespaces and well-known IRIs.

use crate::term::Iri;

pub const SEALIT: &str = "http://www.sealitproject.eu/ontology/";
pub const CRM: &str = "http://www.cidoc-crm.org/cidoc-crm/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

/// Default base for minted instance IRIs.
pub const KB: &str = "https://rs.sealitproject.eu/kb/";

/// Prefixes every graph starts with.
pub const DEFAULT_PREFIXES: [(&str, &str); 6] = [
    ("crm", CRM),
    ("owl", OWL),
    ("rdf", RDF),
    ("rdfs", RDFS),
    ("sealit", SEALIT),
    ("xsd", XSD),
];

fn iri(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are valid")
}

pub fn sealit(local: &str) -> Iri {
    iri(SEALIT, local)
}

pub fn crm(local: &str) -> Iri {
    iri(CRM, local)
}

pub fn rdf(local: &str) -> Iri {
    iri(RDF, local)
}

pub fn rdfs(local: &str) -> Iri {
    iri(RDFS, local)
}

pub fn xsd(local: &str) -> Iri {
    iri(XSD, local)
}

pub fn owl(local: &str) -> Iri {
    iri(OWL, local)
}

pub fn rdf_type() -> Iri {
    rdf("type")
}

pub fn rdfs_label() -> Iri {
    rdfs("label")
}
