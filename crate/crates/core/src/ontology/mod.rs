//! The embedded maritime-history ontology: a CIDOC-CRM extension with class
//! and property hierarchies, domains and ranges, inverse and symmetric
//! properties, and property classes for properties of properties.
//!
//! The schema is loaded once from tables compiled into the binary and is
//! immutable afterwards. Transitive closures are computed at load time so
//! that hierarchy lookups and query rewriting never walk the hierarchy.

mod builtin;
mod export;
mod reify;
mod validate;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::term::Iri;

pub use validate::{Severity, Violation, ViolationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Sealit,
    Crm,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDef {
    pub id: Iri,
    pub label: String,
    pub direct_superclasses: BTreeSet<Iri>,
    pub origin: Origin,
    /// Set for property classes: the property whose instances this class
    /// reifies.
    pub reifies: Option<Iri>,
}

/// Range of a property: a class, or a literal standing for a CRM primitive
/// class (E60 Number, E62 String).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Range {
    Class(Iri),
    Literal(Iri),
}

impl Range {
    pub fn is_literal(&self) -> bool {
        matches!(self, Range::Literal(_))
    }

    /// The class the range refers to, including the primitive class for
    /// literal ranges.
    pub fn class(&self) -> &Iri {
        match self {
            Range::Class(c) | Range::Literal(c) => c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Declared in the property listing.
    Forward,
    /// The inverse of a declared property.
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyDef {
    pub id: Iri,
    pub label: String,
    pub domain: Iri,
    pub range: Range,
    pub direct_superproperties: BTreeSet<Iri>,
    pub inverse: Option<Iri>,
    pub symmetric: bool,
    pub origin: Origin,
    pub direction: Direction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDef {
    pub id: Iri,
    pub label: String,
    pub range: Iri,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyClassDef {
    pub id: Iri,
    pub reifies: Iri,
    pub attributes: Vec<AttributeDef>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("unknown class {0}")]
    UnknownClass(Iri),
    #[error("unknown property {0}")]
    UnknownProperty(Iri),
    #[error("no property class reifies {0}")]
    UnknownPropertyClass(Iri),
    #[error("{attribute} is not an attribute of the property class for {property}")]
    UnknownAttribute { property: Iri, attribute: Iri },
    #[error("schema table line {line}: {message}")]
    Table { line: usize, message: String },
    #[error("schema invariant violated: {0}")]
    Invariant(String),
}

/// One entailment step target: an asserted `(s, q, o)` entails `(s, p, o)`,
/// or `(o, p, s)` when `flipped`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Entailed {
    pub property: Iri,
    pub flipped: bool,
}

#[derive(Clone, Debug)]
pub struct OntologySchema {
    classes: BTreeMap<Iri, ClassDef>,
    properties: BTreeMap<Iri, PropertyDef>,
    /// Keyed by the reified base property.
    property_classes: BTreeMap<Iri, PropertyClassDef>,
    class_supers: BTreeMap<Iri, BTreeSet<Iri>>,
    class_subs: BTreeMap<Iri, BTreeSet<Iri>>,
    prop_supers: BTreeMap<Iri, BTreeSet<Iri>>,
    prop_subs: BTreeMap<Iri, BTreeSet<Iri>>,
    /// For each property q: everything a single `(s, q, o)` triple entails.
    entails: BTreeMap<Iri, BTreeSet<Entailed>>,
    /// For each property p: every `(q, flipped)` whose triples entail p.
    entailed_by: BTreeMap<Iri, BTreeSet<Entailed>>,
    /// Attribute IRI to the property classes that declare it.
    attribute_owners: BTreeMap<Iri, BTreeSet<Iri>>,
}

pub const VERSION: &str = "1.1";

impl OntologySchema {
    /// Loads the embedded ontology.
    pub fn load_builtin() -> OntologySchema {
        builtin::load().expect("embedded ontology tables are consistent")
    }

    pub(crate) fn from_parts(
        classes: BTreeMap<Iri, ClassDef>,
        properties: BTreeMap<Iri, PropertyDef>,
        property_classes: BTreeMap<Iri, PropertyClassDef>,
    ) -> Result<OntologySchema, SchemaError> {
        let class_parents: BTreeMap<Iri, BTreeSet<Iri>> = classes
            .values()
            .map(|c| (c.id.clone(), c.direct_superclasses.clone()))
            .collect();
        let prop_parents: BTreeMap<Iri, BTreeSet<Iri>> = properties
            .values()
            .map(|p| (p.id.clone(), p.direct_superproperties.clone()))
            .collect();
        let class_supers = closure(&class_parents, "class")?;
        let prop_supers = closure(&prop_parents, "property")?;
        let class_subs = invert(&class_supers);
        let prop_subs = invert(&prop_supers);

        let mut attribute_owners: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
        for pc in property_classes.values() {
            for a in &pc.attributes {
                attribute_owners.entry(a.id.clone()).or_default().insert(pc.id.clone());
            }
        }

        let mut schema = OntologySchema {
            classes,
            properties,
            property_classes,
            class_supers,
            class_subs,
            prop_supers,
            prop_subs,
            entails: BTreeMap::new(),
            entailed_by: BTreeMap::new(),
            attribute_owners,
        };
        schema.compute_entailment_tables();
        Ok(schema)
    }

    /// For every property, the fixpoint of subproperty, inverse and symmetric
    /// steps starting from `(q, not flipped)`.
    fn compute_entailment_tables(&mut self) {
        let mut entails = BTreeMap::new();
        for q in self.properties.keys() {
            let mut seen: BTreeSet<Entailed> = BTreeSet::new();
            let mut stack = vec![Entailed {
                property: q.clone(),
                flipped: false,
            }];
            while let Some(e) = stack.pop() {
                if !seen.insert(e.clone()) {
                    continue;
                }
                let def = &self.properties[&e.property];
                for sup in &self.prop_supers[&e.property] {
                    stack.push(Entailed {
                        property: sup.clone(),
                        flipped: e.flipped,
                    });
                }
                if let Some(inv) = &def.inverse {
                    stack.push(Entailed {
                        property: inv.clone(),
                        flipped: !e.flipped,
                    });
                }
                if def.symmetric {
                    stack.push(Entailed {
                        property: e.property.clone(),
                        flipped: !e.flipped,
                    });
                }
            }
            entails.insert(q.clone(), seen);
        }
        let mut entailed_by: BTreeMap<Iri, BTreeSet<Entailed>> = BTreeMap::new();
        for (q, targets) in &entails {
            for t in targets {
                entailed_by.entry(t.property.clone()).or_default().insert(Entailed {
                    property: q.clone(),
                    flipped: t.flipped,
                });
            }
        }
        self.entails = entails;
        self.entailed_by = entailed_by;
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes.values()
    }

    pub fn properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties.values()
    }

    pub fn property_classes(&self) -> impl Iterator<Item = &PropertyClassDef> {
        self.property_classes.values()
    }

    pub fn class(&self, c: &Iri) -> Option<&ClassDef> {
        self.classes.get(c)
    }

    pub fn property(&self, p: &Iri) -> Option<&PropertyDef> {
        self.properties.get(p)
    }

    pub fn property_class_for(&self, base: &Iri) -> Option<&PropertyClassDef> {
        self.property_classes.get(base)
    }

    pub fn is_attribute(&self, a: &Iri) -> bool {
        self.attribute_owners.contains_key(a)
    }

    /// Property classes that declare attribute `a`.
    pub fn attribute_owners(&self, a: &Iri) -> Option<&BTreeSet<Iri>> {
        self.attribute_owners.get(a)
    }

    /// Strict transitive superclasses of `c`.
    pub fn superclasses(&self, c: &Iri) -> Result<&BTreeSet<Iri>, SchemaError> {
        self.class_supers
            .get(c)
            .ok_or_else(|| SchemaError::UnknownClass(c.clone()))
    }

    /// Strict transitive subclasses of `c`.
    pub fn subclasses(&self, c: &Iri) -> Result<&BTreeSet<Iri>, SchemaError> {
        self.class_subs
            .get(c)
            .ok_or_else(|| SchemaError::UnknownClass(c.clone()))
    }

    pub fn superproperties(&self, p: &Iri) -> Result<&BTreeSet<Iri>, SchemaError> {
        self.prop_supers
            .get(p)
            .ok_or_else(|| SchemaError::UnknownProperty(p.clone()))
    }

    pub fn subproperties(&self, p: &Iri) -> Result<&BTreeSet<Iri>, SchemaError> {
        self.prop_subs
            .get(p)
            .ok_or_else(|| SchemaError::UnknownProperty(p.clone()))
    }

    /// `sub` equals `sup` or is one of its transitive subclasses. Unknown
    /// classes are only subclasses of themselves.
    pub fn is_subclass_of(&self, sub: &Iri, sup: &Iri) -> bool {
        sub == sup || self.class_supers.get(sub).is_some_and(|s| s.contains(sup))
    }

    /// Everything one `(s, q, o)` triple entails, including `(q, unflipped)`
    /// itself. Empty for properties outside the schema.
    pub fn entailments_of(&self, q: &Iri) -> Option<&BTreeSet<Entailed>> {
        self.entails.get(q)
    }

    /// Every `(q, flipped)` whose triples entail `p`, including `p` itself.
    pub fn entailing(&self, p: &Iri) -> Option<&BTreeSet<Entailed>> {
        self.entailed_by.get(p)
    }

    /// Forward-declared SEALIT properties.
    pub fn sealit_properties(&self) -> impl Iterator<Item = &PropertyDef> {
        self.properties
            .values()
            .filter(|p| p.origin == Origin::Sealit && p.direction == Direction::Forward)
    }

    /// SEALIT classes, property classes excluded.
    pub fn sealit_classes(&self) -> impl Iterator<Item = &ClassDef> {
        self.classes
            .values()
            .filter(|c| c.origin == Origin::Sealit && c.reifies.is_none())
    }

    /// Number of (property class, attribute) registrations.
    pub fn attribute_count(&self) -> usize {
        self.property_classes.values().map(|pc| pc.attributes.len()).sum()
    }

    /// Checks the structural invariants of the schema and returns every
    /// problem found.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let crm_root = crate::vocab::crm("E1_CRM_Entity");
        for c in self.classes.values() {
            for s in &c.direct_superclasses {
                if !self.classes.contains_key(s) {
                    problems.push(format!("{}: unresolved superclass {}", c.id, s));
                }
            }
            if c.origin == Origin::Sealit {
                let has_crm = self.class_supers[&c.id]
                    .iter()
                    .any(|s| self.classes.get(s).is_some_and(|d| d.origin == Origin::Crm));
                if !has_crm {
                    problems.push(format!("{}: no CIDOC-CRM ancestor", c.id));
                }
            }
        }
        if !self.classes.contains_key(&crm_root) {
            problems.push("E1 CRM Entity missing".into());
        }
        for p in self.properties.values() {
            if !self.classes.contains_key(&p.domain) {
                problems.push(format!("{}: unresolved domain {}", p.id, p.domain));
            }
            if !self.classes.contains_key(p.range.class()) {
                problems.push(format!("{}: unresolved range {}", p.id, p.range.class()));
            }
            for s in &p.direct_superproperties {
                if !self.properties.contains_key(s) {
                    problems.push(format!("{}: unresolved superproperty {}", p.id, s));
                }
            }
            if let Some(inv) = &p.inverse {
                match self.properties.get(inv) {
                    None => problems.push(format!("{}: unresolved inverse {}", p.id, inv)),
                    Some(q) => {
                        if q.inverse.as_ref() != Some(&p.id) {
                            problems.push(format!("{}: inverse is not an involution", p.id));
                        }
                        if q.domain != *p.range.class() || *q.range.class() != p.domain {
                            problems.push(format!("{}: domain/range not swapped in inverse", p.id));
                        }
                    }
                }
            }
            if p.symmetric && p.domain != *p.range.class() {
                problems.push(format!("{}: symmetric with domain != range", p.id));
            }
        }
        for pc in self.property_classes.values() {
            if !self.properties.contains_key(&pc.reifies) {
                problems.push(format!("{}: reifies unknown property", pc.id));
            }
            if !self.classes.contains_key(&pc.id) {
                problems.push(format!("{}: property class not registered as class", pc.id));
            }
        }
        let counts = [
            ("SEALIT classes", self.sealit_classes().count(), 46),
            ("SEALIT properties", self.sealit_properties().count(), 79),
            (
                "literal-ranged SEALIT properties",
                self.sealit_properties().filter(|p| p.range.is_literal()).count(),
                7,
            ),
            (
                "symmetric SEALIT properties",
                self.sealit_properties().filter(|p| p.symmetric).count(),
                1,
            ),
            ("property-of-property attributes", self.attribute_count(), 4),
        ];
        for (what, got, want) in counts {
            if got != want {
                problems.push(format!("expected {want} {what}, found {got}"));
            }
        }
        problems
    }
}

/// Strict transitive closure of a parent relation; fails on cycles.
fn closure(
    parents: &BTreeMap<Iri, BTreeSet<Iri>>,
    what: &str,
) -> Result<BTreeMap<Iri, BTreeSet<Iri>>, SchemaError> {
    // Kahn's algorithm over child -> parent edges yields parents before
    // children once reversed; any leftover node sits on a cycle.
    let mut indegree: BTreeMap<&Iri, usize> = parents.keys().map(|k| (k, 0)).collect();
    let mut children: BTreeMap<&Iri, Vec<&Iri>> = BTreeMap::new();
    for (child, ps) in parents {
        for p in ps {
            if !parents.contains_key(p) {
                continue;
            }
            *indegree.get_mut(child).expect("present") += 1;
            children.entry(p).or_default().push(child);
        }
    }
    let mut queue: Vec<&Iri> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(k, _)| *k)
        .collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(n) = queue.pop() {
        order.push(n);
        for c in children.get(n).into_iter().flatten() {
            let d = indegree.get_mut(c).expect("present");
            *d -= 1;
            if *d == 0 {
                queue.push(c);
            }
        }
    }
    if order.len() != parents.len() {
        let stuck = indegree
            .iter()
            .find(|(_, d)| **d > 0)
            .map(|(k, _)| k.to_string())
            .unwrap_or_default();
        return Err(SchemaError::Invariant(format!("{what} hierarchy has a cycle through {stuck}")));
    }
    let mut result: BTreeMap<Iri, BTreeSet<Iri>> = BTreeMap::new();
    for n in order {
        let mut acc = BTreeSet::new();
        for p in &parents[n] {
            acc.insert(p.clone());
            if let Some(up) = result.get(p) {
                acc.extend(up.iter().cloned());
            }
        }
        result.insert(n.clone(), acc);
    }
    Ok(result)
}

fn invert(supers: &BTreeMap<Iri, BTreeSet<Iri>>) -> BTreeMap<Iri, BTreeSet<Iri>> {
    let mut subs: BTreeMap<Iri, BTreeSet<Iri>> =
        supers.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for (c, ss) in supers {
        for s in ss {
            subs.entry(s.clone()).or_default().insert(c.clone());
        }
    }
    subs
}
