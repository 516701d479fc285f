use std::collections::BTreeMap;

use mariner_core::graph::resolve_with;
use mariner_core::ontology::{OntologySchema, Range};
use mariner_core::vocab::{self, crm, sealit};
use mariner_core::Iri;
use serde::{Deserialize, Serialize};

use crate::FacetError;

/// The connection inventory shipped with the service.
pub const DEFAULT_CONNECTIONS: &str = include_str!("../connections.toml");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FacetCategory {
    pub id: String,
    pub label: String,
    #[serde(skip)]
    pub classes: Vec<Iri>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub property: Iri,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionDef {
    pub id: String,
    pub label: String,
    pub source: String,
    pub target: String,
    pub path: Vec<Step>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    prefix: BTreeMap<String, String>,
    #[serde(default)]
    connection: Vec<ConnectionEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionEntry {
    id: String,
    label: String,
    source: String,
    target: String,
    path: Vec<String>,
}

fn builtin_categories() -> Vec<FacetCategory> {
    let cat = |id: &str, label: &str, class: Iri| FacetCategory {
        id: id.into(),
        label: label.into(),
        classes: vec![class],
    };
    vec![
        cat("ship", "Ship", sealit("Ship")),
        cat("person", "Person", crm("E21_Person")),
        cat("legal_body", "Legal Body", crm("E74_Group")),
        cat("crew_payment", "Crew Payment", sealit("Crew_Payment")),
        cat("place", "Place", crm("E53_Place")),
        cat("voyage", "Voyage", sealit("Voyage")),
        cat("course", "Course", sealit("Course")),
        cat("record", "Record", crm("E31_Document")),
        cat("source", "Source", crm("E78_Curated_Holding")),
    ]
}

/// Categories plus the connections between them, type-checked against the
/// schema when built.
#[derive(Clone, Debug)]
pub struct FacetModel {
    categories: Vec<FacetCategory>,
    connections: Vec<ConnectionDef>,
}

impl FacetModel {
    pub fn from_toml(text: &str, schema: &OntologySchema) -> Result<Self, FacetError> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| FacetError::Config(e.to_string()))?;
        let mut prefixes: BTreeMap<String, Iri> = vocab::DEFAULT_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), Iri::new(ns).expect("valid namespace")))
            .collect();
        for (p, ns) in file.prefix {
            let ns = Iri::new(ns).map_err(|e| FacetError::Config(format!("prefix {p}: {e}")))?;
            prefixes.insert(p, ns);
        }
        let mut connections = Vec::new();
        for c in file.connection {
            let path = c
                .path
                .iter()
                .map(|s| {
                    let (direction, curie) = match s.strip_prefix('^') {
                        Some(rest) => (Direction::Inverse, rest),
                        None => (Direction::Forward, s.as_str()),
                    };
                    let property = resolve_with(&prefixes, curie)
                        .map_err(|e| FacetError::Config(format!("connection {}: {e}", c.id)))?;
                    Ok(Step { property, direction })
                })
                .collect::<Result<Vec<_>, FacetError>>()?;
            connections.push(ConnectionDef {
                id: c.id,
                label: c.label,
                source: c.source,
                target: c.target,
                path,
            });
        }
        Self::new(connections, schema)
    }

    pub fn builtin(schema: &OntologySchema) -> Self {
        Self::from_toml(DEFAULT_CONNECTIONS, schema).expect("shipped connections type-check")
    }

    /// Checks every connection: ids are unique, both categories exist, the
    /// path is non-empty and each step's domain (or range, walking
    /// backwards) overlaps the classes reached so far.
    pub fn new(connections: Vec<ConnectionDef>, schema: &OntologySchema) -> Result<Self, FacetError> {
        let model = FacetModel {
            categories: builtin_categories(),
            connections: Vec::new(),
        };
        let mut checked: Vec<ConnectionDef> = Vec::new();
        for c in connections {
            if checked.iter().any(|d| d.id == c.id) {
                return Err(FacetError::Config(format!("connection {:?} declared twice", c.id)));
            }
            let source = model.category(&c.source)?;
            let target = model.category(&c.target)?;
            if c.path.is_empty() {
                return Err(path_error(&c, 0, "empty path"));
            }
            let mut here: Vec<Iri> = source.classes.clone();
            for (i, step) in c.path.iter().enumerate() {
                let def = schema
                    .property(&step.property)
                    .ok_or_else(|| path_error(&c, i, format!("unknown property {}", step.property)))?;
                let Range::Class(range) = &def.range else {
                    return Err(path_error(&c, i, format!("{} has a literal range", step.property.local_name())));
                };
                let (from, to) = match step.direction {
                    Direction::Forward => (&def.domain, range),
                    Direction::Inverse => (range, &def.domain),
                };
                if !overlaps(schema, &here, from) {
                    return Err(path_error(
                        &c,
                        i,
                        format!("{} expects {}, reached {}", step.property.local_name(), from.local_name(), names(&here)),
                    ));
                }
                here = vec![to.clone()];
            }
            if !target.classes.iter().any(|t| overlaps(schema, &here, t)) {
                return Err(path_error(
                    &c,
                    c.path.len() - 1,
                    format!("path ends at {}, not category {}", names(&here), target.id),
                ));
            }
            checked.push(c);
        }
        Ok(FacetModel {
            connections: checked,
            ..model
        })
    }

    pub fn categories(&self) -> &[FacetCategory] {
        &self.categories
    }

    pub fn category(&self, id: &str) -> Result<&FacetCategory, FacetError> {
        self.categories
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| FacetError::UnknownCategory(id.to_string()))
    }

    pub fn connections(&self) -> &[ConnectionDef] {
        &self.connections
    }

    pub fn connection(&self, id: &str) -> Result<&ConnectionDef, FacetError> {
        self.connections
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| FacetError::UnknownConnection(id.to_string()))
    }

    /// Connections leaving a category.
    pub fn connections_from<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a ConnectionDef> + 'a {
        self.connections.iter().filter(move |c| c.source == category)
    }
}

fn overlaps(schema: &OntologySchema, here: &[Iri], class: &Iri) -> bool {
    here.iter()
        .any(|h| schema.is_subclass_of(h, class) || schema.is_subclass_of(class, h))
}

fn names(classes: &[Iri]) -> String {
    classes.iter().map(|c| c.local_name()).collect::<Vec<_>>().join("/")
}

fn path_error(c: &ConnectionDef, step: usize, message: impl Into<String>) -> FacetError {
    FacetError::PathType {
        connection: c.id.clone(),
        step,
        message: message.into(),
    }
}
