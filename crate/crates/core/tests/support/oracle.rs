//! Reference implementations used only by tests: a brute-force nested-loop
//! BGP evaluator and a naive forward-chaining materializer. Neither uses
//! the graph indexes nor the schema's precomputed closures.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use mariner_core::ontology::Range;
use mariner_core::query::{PatternTerm, TriplePattern};
use mariner_core::vocab;
use mariner_core::{Graph, Iri, OntologySchema, Term, Triple};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Solution = BTreeMap<String, Term>;

fn unify(pt: &PatternTerm, value: &Term, sol: &mut Solution) -> bool {
    match pt {
        PatternTerm::Iri(i) => matches!(value, Term::Iri(v) if v == i),
        PatternTerm::Literal(l) => matches!(value, Term::Literal(v) if v == l),
        PatternTerm::Var(name) => match sol.get(name) {
            Some(bound) => bound == value,
            None => {
                sol.insert(name.clone(), value.clone());
                true
            }
        },
    }
}

/// Every solution of the patterns over `triples`, patterns joined in the
/// order given, each level scanning the triples that match its constants.
pub fn nested_loop(patterns: &[TriplePattern], triples: &[Triple]) -> Vec<Solution> {
    let candidates: Vec<Vec<&Triple>> = patterns
        .iter()
        .map(|p| {
            triples
                .iter()
                .filter(|t| {
                    let mut scratch = Solution::new();
                    unify(&p.subject, &Term::Iri(t.subject.clone()), &mut scratch)
                        && unify(&p.predicate, &Term::Iri(t.predicate.clone()), &mut scratch)
                        && unify(&p.object, &t.object, &mut scratch)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    walk(patterns, &candidates, 0, Solution::new(), &mut out);
    out
}

fn walk(
    patterns: &[TriplePattern],
    candidates: &[Vec<&Triple>],
    depth: usize,
    sol: Solution,
    out: &mut Vec<Solution>,
) {
    if depth == patterns.len() {
        out.push(sol);
        return;
    }
    let p = &patterns[depth];
    for t in &candidates[depth] {
        let mut next = sol.clone();
        if unify(&p.subject, &Term::Iri(t.subject.clone()), &mut next)
            && unify(&p.predicate, &Term::Iri(t.predicate.clone()), &mut next)
            && unify(&p.object, &t.object, &mut next)
        {
            walk(patterns, candidates, depth + 1, next, out);
        }
    }
}

/// Closure of the graph under: direct subClassOf on rdf:type, direct
/// subPropertyOf, inverseOf and symmetry, iterated to a fixpoint.
pub fn materialize(graph: &Graph, schema: &OntologySchema) -> BTreeSet<Triple> {
    let rdf_type = vocab::rdf_type();
    let mut all: BTreeSet<Triple> = graph.triples().collect();
    loop {
        let mut new = Vec::new();
        for t in &all {
            if t.predicate == rdf_type {
                if let Term::Iri(c) = &t.object {
                    if let Some(def) = schema.class(c) {
                        for d in &def.direct_superclasses {
                            new.push(Triple::new(t.subject.clone(), rdf_type.clone(), d.clone()));
                        }
                    }
                }
                continue;
            }
            let Some(def) = schema.property(&t.predicate) else {
                continue;
            };
            for q in &def.direct_superproperties {
                new.push(Triple::new(t.subject.clone(), q.clone(), t.object.clone()));
            }
            if let Term::Iri(o) = &t.object {
                if let Some(inv) = &def.inverse {
                    new.push(Triple::new(o.clone(), inv.clone(), t.subject.clone()));
                }
                if def.symmetric {
                    new.push(Triple::new(o.clone(), t.predicate.clone(), t.subject.clone()));
                }
            }
        }
        let before = all.len();
        all.extend(new);
        if all.len() == before {
            return all;
        }
    }
}

/// Solutions projected onto `vars` (unbound as None), sorted, as a multiset.
pub fn project(solutions: &[Solution], vars: &[String]) -> Vec<Vec<Option<Term>>> {
    let mut rows: Vec<Vec<Option<Term>>> = solutions
        .iter()
        .map(|s| vars.iter().map(|v| s.get(v).cloned()).collect())
        .collect();
    rows.sort();
    rows
}

/// Vocabulary random graphs and queries draw from: properties with sub-,
/// super- and inverse relations, the symmetric property, rdf:type with
/// classes from one hierarchy, and literal-valued properties.
pub struct Vocabulary {
    pub nodes: Vec<Iri>,
    pub properties: Vec<Iri>,
    pub classes: Vec<Iri>,
    pub literal_properties: Vec<Iri>,
    pub literals: Vec<Term>,
}

impl Vocabulary {
    pub fn new(schema: &OntologySchema, nodes: usize) -> Self {
        let s = vocab::sealit;
        let c = vocab::crm;
        let mut properties = vec![
            c("P9_consists_of"),
            c("P9i_forms_part_of"),
            s("consists_of_leaving"),
            s("consists_of_arrival"),
            s("consists_of_passing"),
            s("leaving_is_part_of"),
            c("P14_carried_out_by"),
            c("P14i_performed"),
            c("P11_had_participant"),
            s("navigated_by_captain"),
            s("voyages"),
            s("voyage_of"),
            s("related_to"),
            s("has_owner"),
            s("has_shareholder"),
            s("works_at"),
            c("P107i_is_current_or_former_member_of"),
            c("P107_has_current_or_former_member"),
            s("finally_arriving_at"),
            c("P74_has_current_or_former_residence"),
            Iri::new("http://example.org/unrelated").unwrap(),
        ];
        properties.retain(|p| p.as_str().starts_with("http://example.org/") || schema.property(p).is_some());
        assert!(properties.len() >= 20, "vocabulary properties missing from schema");
        let classes = vec![
            c("E1_CRM_Entity"),
            c("E4_Period"),
            c("E7_Activity"),
            s("Voyage"),
            s("Leaving"),
            s("Money_for_Service"),
            s("Money_for_Labour"),
            s("Crew_Payment"),
            c("E39_Actor"),
            c("E21_Person"),
            c("E74_Group"),
            s("Ship"),
        ];
        for cl in &classes {
            assert!(schema.class(cl).is_some(), "{cl} missing");
        }
        let literal_properties = vec![s("has_first_name"), s("has_current_age")];
        let literals = vec![
            Term::Literal(mariner_core::Literal::plain("Giovanni")),
            Term::Literal(mariner_core::Literal::plain("Maria")),
            Term::Literal(mariner_core::Literal::typed("31", vocab::xsd("integer"))),
            Term::Literal(mariner_core::Literal::lang("Genova", "it").unwrap()),
        ];
        let nodes = (0..nodes)
            .map(|i| Iri::new(format!("https://rs.sealitproject.eu/kb/n/{i}")).unwrap())
            .collect();
        for p in &literal_properties {
            assert!(matches!(schema.property(p).map(|d| &d.range), Some(Range::Literal(_))));
        }
        Vocabulary {
            nodes,
            properties,
            classes,
            literal_properties,
            literals,
        }
    }

    pub fn random_triple(&self, rng: &mut impl Rng) -> Triple {
        let s = self.nodes.choose(rng).unwrap().clone();
        match rng.gen_range(0..10) {
            0 | 1 => Triple::new(s, vocab::rdf_type(), self.classes.choose(rng).unwrap().clone()),
            2 => Triple::new(
                s,
                self.literal_properties.choose(rng).unwrap().clone(),
                self.literals.choose(rng).unwrap().clone(),
            ),
            _ => Triple::new(
                s,
                self.properties.choose(rng).unwrap().clone(),
                self.nodes.choose(rng).unwrap().clone(),
            ),
        }
    }

    pub fn random_graph(&self, rng: &mut impl Rng, size: usize) -> Graph {
        let mut g = Graph::new();
        for _ in 0..size {
            g.insert(self.random_triple(rng));
        }
        g
    }

    /// A basic graph pattern of 1..=max patterns over variables ?a..?d. At
    /// most one pattern has a variable predicate; every pattern after the
    /// first shares a variable with an earlier one so joins stay bounded.
    pub fn random_bgp(&self, rng: &mut impl Rng, max: usize) -> Vec<TriplePattern> {
        const VARS: [&str; 4] = ["a", "b", "c", "d"];
        let n = rng.gen_range(1..=max);
        let mut used: Vec<&str> = Vec::new();
        let mut var_pred_used = false;
        let mut out = Vec::new();
        for i in 0..n {
            let pick_var = |rng: &mut dyn rand::RngCore, used: &mut Vec<&'static str>| {
                let v = VARS[rng.gen_range(0..VARS.len())];
                if !used.contains(&v) {
                    used.push(v);
                }
                PatternTerm::Var(v.to_string())
            };
            let shared = if i == 0 {
                None
            } else {
                used.choose(rng).map(|v| PatternTerm::Var(v.to_string()))
            };
            let subject = match rng.gen_range(0..10) {
                0 => PatternTerm::Iri(self.nodes.choose(rng).unwrap().clone()),
                _ => pick_var(rng, &mut used),
            };
            let (predicate, literal_pred) = match rng.gen_range(0..20) {
                0..=1 if !var_pred_used => {
                    var_pred_used = true;
                    (pick_var(rng, &mut used), false)
                }
                2..=4 => (PatternTerm::Iri(vocab::rdf_type()), false),
                5 => (PatternTerm::Iri(self.literal_properties.choose(rng).unwrap().clone()), true),
                _ => (PatternTerm::Iri(self.properties.choose(rng).unwrap().clone()), false),
            };
            let is_type = predicate == PatternTerm::Iri(vocab::rdf_type());
            let object = match rng.gen_range(0..10) {
                0..=1 if is_type => PatternTerm::Iri(self.classes.choose(rng).unwrap().clone()),
                0 if literal_pred => match self.literals.choose(rng).unwrap() {
                    Term::Literal(l) => PatternTerm::Literal(l.clone()),
                    Term::Iri(i) => PatternTerm::Iri(i.clone()),
                },
                0 => PatternTerm::Iri(self.nodes.choose(rng).unwrap().clone()),
                _ => pick_var(rng, &mut used),
            };
            let mut p = TriplePattern {
                subject,
                predicate,
                object,
            };
            if let Some(shared) = shared {
                if !p.vars().any(|v| Some(v) == shared.var()) {
                    if rng.gen_bool(0.5) || matches!(p.object, PatternTerm::Literal(_)) {
                        p.subject = shared;
                    } else {
                        p.object = shared;
                    }
                }
            }
            for v in p.vars() {
                if let Some(v) = VARS.iter().find(|x| **x == v) {
                    if !used.contains(v) {
                        used.push(v);
                    }
                }
            }
            out.push(p);
        }
        out
    }
}
