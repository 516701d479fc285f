//! Hand-picked checks of the embedded ontology against the published class
//! and property hierarchy tables.

use std::collections::BTreeSet;

use mariner_core::ontology::{OntologySchema, Range};
use mariner_core::vocab::{crm, sealit};
use mariner_core::Iri;

fn c(label: &str) -> Iri {
    let local = label.split_whitespace().collect::<Vec<_>>().join("_");
    let is_crm = label
        .split_whitespace()
        .next()
        .is_some_and(|w| w.len() > 1 && w.starts_with(['E', 'P']) && w[1..].trim_end_matches('i').chars().all(|c| c.is_ascii_digit()));
    if is_crm {
        crm(&local)
    } else {
        sealit(&local)
    }
}

fn schema() -> OntologySchema {
    OntologySchema::load_builtin()
}

/// Each row: a class followed by its full chain of ancestors up to the root.
const CHAINS: &[&[&str]] = &[
    &["Ship", "E22 Human-Made Object", "E24 Physical Human-Made Thing", "E71 Human-Made Thing", "E70 Thing", "E77 Persistent Item", "E1 CRM Entity"],
    &["Crew Payment", "Money for Labour", "Money for Service", "E7 Activity", "E5 Event", "E4 Period", "E2 Temporal Entity", "E1 CRM Entity"],
    &["Voyage", "E7 Activity", "E5 Event", "E4 Period", "E2 Temporal Entity", "E1 CRM Entity"],
    &["Ship ID", "E42 Identifier", "E41 Appellation", "E90 Symbolic Object", "E72 Legal Object", "E70 Thing", "E77 Persistent Item", "E1 CRM Entity"],
    &["Port of Registry", "E74 Group", "E39 Actor", "E77 Persistent Item", "E1 CRM Entity"],
    &["Tonnage", "E54 Dimension", "E1 CRM Entity"],
    &["Country", "E53 Place", "E1 CRM Entity"],
    &["Shareholding", "Ship Ownership Phase", "Legal Object Relationship", "E1 CRM Entity"],
    &["Labour Contract", "E29 Design or Procedure", "E73 Information Object", "E90 Symbolic Object", "E72 Legal Object", "E70 Thing", "E77 Persistent Item", "E1 CRM Entity"],
    &["Profession", "E55 Type", "E28 Conceptual Object", "E71 Human-Made Thing", "E70 Thing", "E77 Persistent Item", "E1 CRM Entity"],
];

#[test]
fn superclass_chains() {
    let s = schema();
    for chain in CHAINS {
        let class = c(chain[0]);
        let want: BTreeSet<Iri> = chain[1..].iter().map(|l| c(l)).collect();
        let got = s.superclasses(&class).unwrap_or_else(|e| panic!("{}: {e}", chain[0]));
        // The published tree shows one parent per class; CIDOC-CRM classes
        // such as E24 have further parents, so the chain is a lower bound.
        assert!(got.is_superset(&want), "ancestors of {}: {got:?}", chain[0]);
        for (i, sup) in chain.iter().enumerate() {
            assert!(s.is_subclass_of(&class, &c(sup)), "{} under {}", chain[0], sup);
            if i > 0 {
                assert!(!s.is_subclass_of(&c(sup), &class), "{} is not under {}", sup, chain[0]);
            }
        }
    }
}

#[test]
fn unrelated_classes_stay_apart() {
    let s = schema();
    assert!(!s.is_subclass_of(&sealit("Ship"), &crm("E7_Activity")));
    assert!(!s.is_subclass_of(&sealit("Voyage"), &crm("E77_Persistent_Item")));
    assert!(!s.is_subclass_of(&sealit("Money_for_Things"), &sealit("Money_for_Labour")));
    assert!(!s.is_subclass_of(&sealit("Leaving"), &sealit("Arrival")));
}

/// Property label, domain label, range label (`None` for a literal range).
const DOMAIN_RANGE: &[(&str, &str, Option<&str>)] = &[
    ("has ship ID", "Ship", Some("Ship ID")),
    ("consists of leaving", "Voyage", Some("Leaving")),
    ("navigated by captain", "Voyage", Some("E39 Actor")),
    ("voyage of", "Voyage", Some("Ship")),
    ("for voyage", "Crew Payment", Some("Voyage")),
    ("works at", "E21 Person", Some("E74 Group")),
    ("has crew number capacity", "Ship", None),
    ("ownership is terminated by", "Ship Ownership Phase", Some("De-flagging")),
    ("from place", "Leaving", Some("E53 Place")),
    ("for employment", "Money for Labour", Some("Employment")),
];

#[test]
fn domains_and_ranges() {
    let s = schema();
    for (p, dom, range) in DOMAIN_RANGE {
        let def = s.property(&c(p)).unwrap_or_else(|| panic!("missing property {p}"));
        assert_eq!(def.domain, c(dom), "domain of {p}");
        match (range, &def.range) {
            (Some(r), Range::Class(got)) => assert_eq!(got, &c(r), "range of {p}"),
            (None, Range::Literal(_)) => {}
            (want, got) => panic!("range of {p}: expected {want:?}, got {got:?}"),
        }
    }
}

#[test]
fn subproperty_chains() {
    let s = schema();
    let supers = s.superproperties(&sealit("navigated_by_captain")).unwrap();
    assert!(supers.contains(&crm("P14_carried_out_by")));
    assert!(supers.contains(&crm("P11_had_participant")));
    assert!(supers.contains(&crm("P12_occurred_in_the_presence_of")));
    let subs = s.subproperties(&crm("P9_consists_of")).unwrap();
    for p in ["leaving", "arrival", "passing", "loading", "unloading"] {
        assert!(subs.contains(&sealit(&format!("consists_of_{p}"))));
    }
}

#[test]
fn literal_ranged_properties() {
    let s = schema();
    let mut literal: Vec<&str> = s
        .sealit_properties()
        .filter(|p| p.range.is_literal())
        .map(|p| p.id.local_name())
        .collect();
    literal.sort();
    assert_eq!(literal.len(), 7, "{literal:?}");
    assert!(literal.contains(&"has_first_name"));
    assert!(literal.contains(&"has_crew_number_capacity"));
}
