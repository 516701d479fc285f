use std::collections::{BTreeMap, BTreeSet};

use mariner_core::mapping::MintPolicy;
use mariner_core::query::{evaluate, EntailmentMode};
use mariner_core::vocab::{crm, rdf_type, sealit};
use mariner_core::{Graph, Iri, OntologySchema, Term};
use serde::Serialize;

use crate::compile::{compile, QueryState};
use crate::registry::FacetModel;
use crate::FacetError;

/// The knowledge graph a service answers from, with the schema used for
/// entailment. Built once and shared read-only.
pub struct Snapshot {
    pub graph: Graph,
    pub schema: OntologySchema,
}

impl Snapshot {
    pub fn new(graph: Graph, schema: OntologySchema) -> Self {
        Snapshot { graph, schema }
    }

    /// `rdfs:label`, or the last path segment when there is none.
    pub fn display_label(&self, iri: &Iri) -> String {
        match self.graph.label(iri) {
            Some(l) => l.lexical().to_string(),
            None => iri.local_name().to_string(),
        }
    }

    /// Distinct instances of `class` or any of its subclasses, without the
    /// per-category unknown placeholders.
    pub fn instances_of(&self, class: &Iri) -> BTreeSet<Iri> {
        let mut classes = vec![class.clone()];
        if let Ok(subs) = self.schema.subclasses(class) {
            classes.extend(subs.iter().cloned());
        }
        let policy = MintPolicy::default();
        let ty = rdf_type();
        classes
            .iter()
            .flat_map(|c| self.graph.subjects(&ty, &Term::Iri(c.clone())).cloned().collect::<Vec<_>>())
            .filter(|i| !policy.is_unknown(i))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub iri: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bucket {
    pub label: String,
    pub iri: String,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AggregationResult {
    pub buckets: Vec<Bucket>,
    pub total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum RunResult {
    Rows { columns: Vec<String>, rows: Vec<Instance> },
    Aggregation(AggregationResult),
}

/// Compiles and evaluates a state. Grouped results fold the unknown
/// placeholders into one trailing "unknown" bucket; labels shared by
/// different group values get the value's IRI appended.
pub fn run(
    state: &QueryState,
    model: &FacetModel,
    snapshot: &Snapshot,
    mode: EntailmentMode,
) -> Result<RunResult, FacetError> {
    let query = compile(state, model)?;
    let table = evaluate(&query, &snapshot.graph, &snapshot.schema, mode);
    if state.group_by.is_none() {
        let rows = table
            .rows
            .iter()
            .filter_map(|r| match &r[0] {
                Some(Term::Iri(i)) => Some(Instance {
                    iri: i.as_str().to_string(),
                    label: snapshot.display_label(i),
                }),
                _ => None,
            })
            .collect();
        return Ok(RunResult::Rows {
            columns: vec!["iri".into(), "label".into()],
            rows,
        });
    }

    let policy = MintPolicy::default();
    let mut buckets: Vec<(Iri, String, u64)> = Vec::new();
    let mut unknown: Option<(Iri, u64)> = None;
    for row in &table.rows {
        let (Some(Term::Iri(g)), Some(Term::Literal(label)), Some(Term::Literal(n))) = (&row[0], &row[1], &row[2])
        else {
            continue;
        };
        let n: u64 = n.lexical().parse().expect("counts are integers");
        if policy.is_unknown(g) {
            let slot = unknown.get_or_insert_with(|| (g.clone(), 0));
            slot.1 += n;
        } else {
            buckets.push((g.clone(), label.lexical().to_string(), n));
        }
    }
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for (_, label, _) in &buckets {
        *seen.entry(label.clone()).or_default() += 1;
    }
    if unknown.is_some() {
        *seen.entry("unknown".into()).or_default() += 1;
    }
    let mut out: Vec<Bucket> = buckets
        .into_iter()
        .map(|(iri, label, count)| Bucket {
            label: if seen[&label] > 1 { format!("{label} {iri}") } else { label },
            iri: iri.as_str().to_string(),
            count,
        })
        .collect();
    if let Some((iri, count)) = unknown {
        out.push(Bucket {
            label: "unknown".into(),
            iri: iri.as_str().to_string(),
            count,
        });
    }
    let total = out.iter().map(|b| b.count).sum();
    Ok(RunResult::Aggregation(AggregationResult { buckets: out, total }))
}

/// Instances of a category whose display label starts with `prefix`
/// (case-insensitively), ordered by label then IRI.
pub fn list_instances(
    model: &FacetModel,
    snapshot: &Snapshot,
    category: &str,
    prefix: &str,
    limit: usize,
) -> Result<Vec<Instance>, FacetError> {
    let cat = model.category(category)?;
    let prefix = prefix.to_lowercase();
    let mut out: Vec<Instance> = cat
        .classes
        .iter()
        .flat_map(|c| snapshot.instances_of(c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|iri| Instance {
            label: snapshot.display_label(&iri),
            iri: iri.as_str().to_string(),
        })
        .filter(|i| i.label.to_lowercase().starts_with(&prefix))
        .collect();
    out.sort_by(|a, b| (&a.label, &a.iri).cmp(&(&b.label, &b.iri)));
    out.truncate(limit);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Stats {
    pub triples: usize,
    pub ships: usize,
    pub persons: usize,
    pub legal_bodies: usize,
    pub locations: usize,
}

pub fn stats(snapshot: &Snapshot) -> Stats {
    Stats {
        triples: snapshot.graph.len(),
        ships: snapshot.instances_of(&sealit("Ship")).len(),
        persons: snapshot.instances_of(&crm("E21_Person")).len(),
        legal_bodies: snapshot.instances_of(&crm("E74_Group")).len(),
        locations: snapshot.instances_of(&crm("E53_Place")).len(),
    }
}
