use std::collections::BTreeMap;

use super::{
    normalize_label, AttrRule, EntityRule, LinkTarget, MappingError, MappingSpec, MintPolicy,
    MissingPolicy, RecordBundle, Table,
};
use crate::graph::Graph;
use crate::ontology::{OntologySchema, Violation};
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab::{crm, rdf_type, rdfs_label};

fn table<'a>(bundle: &'a RecordBundle, name: &str) -> Result<&'a Table, MappingError> {
    bundle.tables.get(name).ok_or_else(|| MappingError::MissingTable {
        table: name.to_string(),
        origin: bundle.origin.clone(),
    })
}

fn column(t: &Table, table: &str, col: &str) -> Result<usize, MappingError> {
    t.column(col).ok_or_else(|| MappingError::MissingColumn {
        table: table.to_string(),
        column: col.to_string(),
    })
}

struct Emitter<'a> {
    graph: Graph,
    policy: &'a MintPolicy,
    record: Iri,
}

impl Emitter<'_> {
    fn add(&mut self, s: &Iri, p: Iri, o: impl Into<Term>) {
        self.graph.insert(Triple::new(s.clone(), p, o));
    }

    /// Type, label and provenance of a minted node.
    fn node(&mut self, category: &str, label: &str, class: &Iri) -> Result<Iri, MappingError> {
        let label = normalize_label(label);
        let iri = self.policy.mint(category, &label)?;
        self.add(&iri, rdf_type(), class.clone());
        self.add(&iri, rdfs_label(), Literal::plain(label));
        let record = self.record.clone();
        self.add(&iri, crm("P70i_is_documented_in"), record);
        Ok(iri)
    }

    fn unknown(&mut self, category: &str, class: &Iri) -> Iri {
        let iri = self.policy.unknown(category);
        self.add(&iri, rdf_type(), class.clone());
        self.add(&iri, rdfs_label(), Literal::plain("unknown"));
        iri
    }
}

/// Row pairs joined by a link: the same row when both ends come from one
/// table, otherwise every combination, which is only allowed when one side
/// is a single-row (record-level) table.
fn row_pairs(
    link: &str,
    left: (&str, usize),
    right: (&str, usize),
) -> Result<Vec<(usize, usize)>, MappingError> {
    if left.0 == right.0 {
        return Ok((0..left.1).map(|i| (i, i)).collect());
    }
    if left.1 > 1 && right.1 > 1 {
        return Err(MappingError::AmbiguousJoin {
            link: link.to_string(),
            left: left.0.to_string(),
            right: right.0.to_string(),
        });
    }
    Ok((0..left.1)
        .flat_map(|i| (0..right.1).map(move |j| (i, j)))
        .collect())
}

/// Maps one record bundle to triples and validates the result against the
/// schema. Every minted entity is typed, labelled and documented in a Record
/// node for the bundle, which is in turn carried by a Source node.
pub fn apply_mapping(
    spec: &MappingSpec,
    bundle: &RecordBundle,
    schema: &OntologySchema,
    policy: &MintPolicy,
) -> Result<(Graph, Vec<Violation>), MappingError> {
    if spec.template_id != bundle.template_id {
        return Err(MappingError::TemplateMismatch {
            expected: spec.template_id.clone(),
            found: bundle.template_id.clone(),
        });
    }
    let record = policy.mint("record", &bundle.record_id)?;
    let source = policy.mint("source", &bundle.source_label)?;
    let mut em = Emitter {
        graph: Graph::new(),
        policy,
        record: record.clone(),
    };
    em.add(&record, rdf_type(), crm("E31_Document"));
    em.add(&record, rdfs_label(), Literal::plain(normalize_label(&bundle.record_id)));
    em.add(&record, crm("P128i_is_carried_by"), source.clone());
    em.add(&source, rdf_type(), crm("E78_Curated_Holding"));
    em.add(&source, rdfs_label(), Literal::plain(normalize_label(&bundle.source_label)));

    // Entity instances per row.
    let mut instances: BTreeMap<&str, Vec<Option<Iri>>> = BTreeMap::new();
    let rule_of = |name: &str| -> &EntityRule {
        spec.entities
            .iter()
            .find(|e| e.name == name)
            .expect("entity names checked at parse time")
    };
    for rule in &spec.entities {
        let t = table(bundle, &rule.table)?;
        let cols = rule
            .columns
            .iter()
            .map(|c| column(t, &rule.table, c))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::with_capacity(t.rows().len());
        for row in t.rows() {
            let parts: Vec<&str> = cols.iter().filter_map(|&c| row[c].as_deref()).collect();
            let label = normalize_label(&parts.join(" "));
            out.push(if label.is_empty() {
                None
            } else {
                Some(em.node(&rule.category, &label, &rule.class)?)
            });
        }
        instances.insert(&rule.name, out);
    }

    for link in &spec.links {
        let src = rule_of(&link.source);
        let src_rows = table(bundle, &src.table)?.rows().len();
        let (ttable, trows) = match &link.target {
            LinkTarget::Entity(t) => {
                let r = rule_of(t);
                (r.table.as_str(), table(bundle, &r.table)?.rows().len())
            }
            LinkTarget::Literal { table: tn, .. } => (tn.as_str(), table(bundle, tn)?.rows().len()),
        };
        let literal_col = match &link.target {
            LinkTarget::Literal { table: tn, column: c, .. } => {
                let t = table(bundle, tn)?;
                Some((t, column(t, tn, c)?))
            }
            LinkTarget::Entity(_) => None,
        };
        let attrs: Vec<(&AttrRule, &Table, usize)> = spec
            .attrs
            .iter()
            .filter(|a| a.link == link.name)
            .map(|a| {
                let t = table(bundle, &a.table)?;
                Ok((a, t, column(t, &a.table, &a.column)?))
            })
            .collect::<Result<_, MappingError>>()?;
        let attr_range = |a: &AttrRule| {
            schema
                .property_class_for(&link.property)
                .and_then(|pc| pc.attributes.iter().find(|x| x.id == a.attribute))
                .map(|x| x.range.clone())
                .expect("attribute checked at parse time")
        };

        for (i, j) in row_pairs(&link.name, (&src.table, src_rows), (ttable, trows))? {
            let Some(subject) = instances[src.name.as_str()][i].clone() else {
                continue;
            };
            let object: Term = match (&link.target, &literal_col) {
                (LinkTarget::Entity(t), _) => match &instances[t.as_str()][j] {
                    Some(o) => Term::Iri(o.clone()),
                    None if link.missing == MissingPolicy::Unknown => {
                        let r = rule_of(t);
                        Term::Iri(em.unknown(&r.category, &r.class))
                    }
                    None => continue,
                },
                (LinkTarget::Literal { datatype, .. }, Some((t, c))) => match &t.rows()[j][*c] {
                    Some(v) => {
                        let v = v.trim();
                        Term::Literal(match datatype {
                            Some(dt) => Literal::typed(v, dt.clone()),
                            None => Literal::plain(v),
                        })
                    }
                    None => continue,
                },
                (LinkTarget::Literal { .. }, None) => unreachable!("literal column resolved above"),
            };

            let mut values = BTreeMap::new();
            for (a, t, c) in &attrs {
                let row = if a.table == src.table { i } else { j };
                if let Some(v) = &t.rows()[row][*c] {
                    let iri = em.node(&a.category, v, &attr_range(a))?;
                    values.insert(a.attribute.clone(), Term::Iri(iri));
                }
            }
            match (&object, values.is_empty()) {
                (Term::Iri(o), false) => {
                    let node = Iri::new(format!(
                        "{}pc_{}/{}--{}",
                        policy.base.as_str(),
                        link.property.local_name(),
                        policy.tail(&subject),
                        policy.tail(o)
                    ))
                    .expect("built from valid IRIs");
                    let triples = schema
                        .reify(&subject, &link.property, o, &values, &node)
                        .map_err(|e| MappingError::Incompatible {
                            line: link.line,
                            message: e.to_string(),
                        })?;
                    em.graph.extend(triples);
                    em.add(&node, crm("P70i_is_documented_in"), record.clone());
                }
                _ => em.add(&subject, link.property.clone(), object),
            }
        }
    }

    for c in &spec.consts {
        for iri in instances[c.entity.as_str()].iter().flatten().cloned().collect::<Vec<_>>() {
            em.add(&iri, c.property.clone(), c.value.clone());
        }
    }

    let violations = schema.validate(&em.graph);
    Ok((em.graph, violations))
}
