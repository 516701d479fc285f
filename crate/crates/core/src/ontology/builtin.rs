use std::collections::{BTreeMap, BTreeSet};

use super::{
    AttributeDef, ClassDef, Direction, OntologySchema, Origin, PropertyClassDef, PropertyDef,
    Range, SchemaError,
};
use crate::term::Iri;
use crate::vocab;

const CLASSES: &str = include_str!("data/classes.txt");
const PROPERTIES: &str = include_str!("data/properties.txt");

/// Classes whose instances are literal values in RDF.
const LITERAL_CLASSES: [&str; 2] = ["E60 Number", "E62 String"];

pub(super) fn load() -> Result<OntologySchema, SchemaError> {
    let (mut classes, by_label) = parse_classes(CLASSES)?;
    let (properties, property_classes, pc_classes) =
        parse_properties(PROPERTIES, &by_label)?;
    for c in pc_classes {
        classes.insert(c.id.clone(), c);
    }
    let schema = OntologySchema::from_parts(classes, properties, property_classes)?;
    let problems = schema.check_invariants();
    if let Some(first) = problems.into_iter().next() {
        return Err(SchemaError::Invariant(first));
    }
    Ok(schema)
}

/// CRM labels start with a code such as "E21" or "P107i".
fn crm_code(label: &str) -> Option<&str> {
    let code = label.split_whitespace().next()?;
    let mut chars = code.chars();
    let head = chars.next()?;
    if !matches!(head, 'E' | 'P') {
        return None;
    }
    let rest: &str = &code[1..];
    let digits = rest.trim_end_matches('i');
    (!digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())).then_some(code)
}

fn underscored(label: &str) -> String {
    label.split_whitespace().collect::<Vec<_>>().join("_")
}

fn class_iri(label: &str) -> (Iri, Origin) {
    match crm_code(label) {
        Some(_) => (vocab::crm(&underscored(label)), Origin::Crm),
        None => (vocab::sealit(&underscored(label)), Origin::Sealit),
    }
}

fn property_iri(label: &str) -> (Iri, Origin) {
    class_iri(label)
}

/// IRI for the inverse of a forward property labelled `forward`.
fn inverse_iri(forward: &str, inverse_label: &str) -> Iri {
    match crm_code(forward) {
        Some(code) => {
            let inv_code = match code.strip_suffix('i') {
                Some(base) => base.to_string(),
                None => format!("{code}i"),
            };
            vocab::crm(&format!("{inv_code}_{}", underscored(inverse_label)))
        }
        None => vocab::sealit(&underscored(inverse_label)),
    }
}

fn table_err(line: usize, message: impl Into<String>) -> SchemaError {
    SchemaError::Table {
        line,
        message: message.into(),
    }
}

type ClassTable = (BTreeMap<Iri, ClassDef>, BTreeMap<String, Iri>);

fn parse_classes(text: &str) -> Result<ClassTable, SchemaError> {
    let mut classes: BTreeMap<Iri, ClassDef> = BTreeMap::new();
    let mut by_label: BTreeMap<String, Iri> = BTreeMap::new();
    let mut stack: Vec<Iri> = Vec::new();
    let mut pending_extra: Vec<(usize, String, Vec<String>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("@extra ") {
            let (label, parents) = match rest.split_once(" < ") {
                Some((l, ps)) => (l.trim(), ps.split(',').map(|p| p.trim().to_string()).collect()),
                None => (rest.trim(), Vec::new()),
            };
            pending_extra.push((line_no, label.to_string(), parents));
            continue;
        }
        let mut depth = 0;
        let mut rest = line;
        while let Some(r) = rest.strip_prefix("- ") {
            depth += 1;
            rest = r;
        }
        let label = rest.trim();
        if depth > stack.len() {
            return Err(table_err(line_no, format!("{label}: nesting skips a level")));
        }
        stack.truncate(depth);
        let (id, origin) = class_iri(label);
        let mut direct = BTreeSet::new();
        if let Some(parent) = stack.last() {
            direct.insert(parent.clone());
        }
        if classes.contains_key(&id) {
            return Err(table_err(line_no, format!("duplicate class {label}")));
        }
        by_label.insert(label.to_string(), id.clone());
        classes.insert(
            id.clone(),
            ClassDef {
                id: id.clone(),
                label: label.to_string(),
                direct_superclasses: direct,
                origin,
                reifies: None,
            },
        );
        stack.push(id);
    }

    for (line_no, label, _) in &pending_extra {
        let (id, origin) = class_iri(label);
        if classes.contains_key(&id) {
            continue;
        }
        if origin != Origin::Crm {
            return Err(table_err(*line_no, format!("extra class {label} must be CIDOC-CRM")));
        }
        by_label.insert(label.clone(), id.clone());
        classes.insert(
            id.clone(),
            ClassDef {
                id,
                label: label.clone(),
                direct_superclasses: BTreeSet::new(),
                origin,
                reifies: None,
            },
        );
    }
    for (line_no, label, parents) in pending_extra {
        let id = by_label[&label].clone();
        for p in parents {
            let pid = by_label
                .get(&p)
                .ok_or_else(|| table_err(line_no, format!("unknown parent class {p}")))?
                .clone();
            classes
                .get_mut(&id)
                .expect("registered above")
                .direct_superclasses
                .insert(pid);
        }
    }
    Ok((classes, by_label))
}

struct Row {
    line: usize,
    depth: usize,
    label: String,
    inverse: Option<String>,
    domain: String,
    range: String,
    symmetric: bool,
}

type PropertyTable = (
    BTreeMap<Iri, PropertyDef>,
    BTreeMap<Iri, PropertyClassDef>,
    Vec<ClassDef>,
);

fn parse_properties(
    text: &str,
    classes: &BTreeMap<String, Iri>,
) -> Result<PropertyTable, SchemaError> {
    let mut rows = Vec::new();
    let mut pcs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("@pc ") {
            let cols: Vec<&str> = rest.split('|').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(table_err(line, "property class rows need 3 columns"));
            }
            pcs.push((line, cols[0].to_string(), cols[1].to_string(), cols[2].to_string()));
            continue;
        }
        let cols: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        if !(5..=6).contains(&cols.len()) {
            return Err(table_err(line, "property rows need 5 or 6 columns"));
        }
        let depth = cols[0]
            .parse()
            .map_err(|_| table_err(line, format!("bad depth {:?}", cols[0])))?;
        let symmetric = match cols.get(5) {
            None => false,
            Some(&"symmetric") => true,
            Some(other) => return Err(table_err(line, format!("unknown flag {other}"))),
        };
        rows.push(Row {
            line,
            depth,
            label: cols[1].to_string(),
            inverse: (cols[2] != "-").then(|| cols[2].to_string()),
            domain: cols[3].to_string(),
            range: cols[4].to_string(),
            symmetric,
        });
    }

    let class = |line: usize, label: &str| -> Result<Iri, SchemaError> {
        classes
            .get(label)
            .cloned()
            .ok_or_else(|| table_err(line, format!("unknown class {label}")))
    };

    let mut props: BTreeMap<Iri, PropertyDef> = BTreeMap::new();
    let mut stack: Vec<Iri> = Vec::new();
    for row in &rows {
        if row.depth > stack.len() {
            return Err(table_err(row.line, format!("{}: nesting skips a level", row.label)));
        }
        stack.truncate(row.depth);
        let (id, origin) = property_iri(&row.label);
        let domain = class(row.line, &row.domain)?;
        let range_class = class(row.line, &row.range)?;
        let range = if LITERAL_CLASSES.contains(&row.range.as_str()) {
            Range::Literal(range_class)
        } else {
            Range::Class(range_class)
        };
        let inverse = row
            .inverse
            .as_ref()
            .map(|inv| inverse_iri(&row.label, inv));
        let mut direct = BTreeSet::new();
        if let Some(parent) = stack.last() {
            direct.insert(parent.clone());
        }
        let def = PropertyDef {
            id: id.clone(),
            label: row.label.clone(),
            domain,
            range,
            direct_superproperties: direct,
            inverse,
            symmetric: row.symmetric,
            origin,
            direction: Direction::Forward,
        };
        match props.get(&id) {
            Some(existing) if *existing == def => {}
            Some(_) => {
                return Err(table_err(
                    row.line,
                    format!("conflicting duplicate of {}", row.label),
                ))
            }
            None => {
                props.insert(id.clone(), def);
            }
        }
        stack.push(id);
    }

    // Inverse forms, with the hierarchy mirrored from the forward side.
    let mut inverses = Vec::new();
    for (fwd, def) in &props {
        let Some(inv_id) = &def.inverse else { continue };
        if def.range.is_literal() {
            return Err(SchemaError::Invariant(format!("{fwd}: literal-ranged property has an inverse")));
        }
        let row = rows
            .iter()
            .find(|r| property_iri(&r.label).0 == *fwd)
            .expect("every property comes from a row");
        let supers = def
            .direct_superproperties
            .iter()
            .filter_map(|s| props[s].inverse.clone())
            .collect();
        inverses.push(PropertyDef {
            id: inv_id.clone(),
            label: row.inverse.clone().unwrap_or_default(),
            domain: def.range.class().clone(),
            range: Range::Class(def.domain.clone()),
            direct_superproperties: supers,
            inverse: Some(fwd.clone()),
            symmetric: false,
            origin: def.origin,
            direction: Direction::Inverse,
        });
    }
    for inv in inverses {
        if props.contains_key(&inv.id) {
            return Err(SchemaError::Invariant(format!(
                "inverse IRI {} collides with another property",
                inv.id
            )));
        }
        props.insert(inv.id.clone(), inv);
    }

    let mut property_classes: BTreeMap<Iri, PropertyClassDef> = BTreeMap::new();
    let mut pc_classes = Vec::new();
    for (line, base_label, attr_label, range_label) in pcs {
        let (base, _) = property_iri(&base_label);
        if !props.contains_key(&base) {
            return Err(table_err(line, format!("unknown base property {base_label}")));
        }
        let range = class(line, &range_label)?;
        let pc_label = format!("PC {base_label}");
        let pc_id = vocab::sealit(&underscored(&pc_label));
        let attr = AttributeDef {
            id: vocab::sealit(&underscored(&attr_label)),
            label: attr_label,
            range,
        };
        let entry = property_classes
            .entry(base.clone())
            .or_insert_with(|| PropertyClassDef {
                id: pc_id.clone(),
                reifies: base.clone(),
                attributes: Vec::new(),
            });
        if entry.attributes.iter().any(|a| a.id == attr.id) {
            return Err(table_err(line, "duplicate attribute"));
        }
        entry.attributes.push(attr);
        if !pc_classes.iter().any(|c: &ClassDef| c.id == pc_id) {
            pc_classes.push(ClassDef {
                id: pc_id,
                label: pc_label,
                direct_superclasses: [vocab::crm("E1_CRM_Entity")].into_iter().collect(),
                origin: Origin::Sealit,
                reifies: Some(base),
            });
        }
    }
    Ok((props, property_classes, pc_classes))
}
