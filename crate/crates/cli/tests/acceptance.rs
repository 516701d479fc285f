//! Acceptance checks, one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mariner_core::mapping::{apply_mapping, parse_mapping, MintPolicy, RecordBundle};
use mariner_core::ontology::{OntologySchema, Range};
use mariner_core::query::{evaluate, parse_query, BindingsTable, EntailmentMode, Query};
use mariner_core::turtle::{parse_turtle, parse_turtle_bytes, serialize_turtle};
use mariner_core::vocab::{crm, rdf_type, sealit};
use mariner_core::{Graph, Iri, Term, Triple};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

const BUNDLES: [(&str, &str); 3] = [
    ("crew_list.map", "crew_list_aurora"),
    ("payroll.map", "payroll_stella"),
    ("naval_ship_register.map", "register_fortuna"),
];

fn fixture_kb(schema: &OntologySchema) -> Graph {
    let mut g = Graph::new();
    for (map, dir) in BUNDLES {
        let text = std::fs::read_to_string(fixtures().join("mappings").join(map)).unwrap();
        let spec = parse_mapping(&text, schema).unwrap();
        let bundle = RecordBundle::load(&fixtures().join("records").join(dir)).unwrap();
        g.merge(&apply_mapping(&spec, &bundle, schema, &MintPolicy::default()).unwrap().0);
    }
    g
}

fn listing(name: &str) -> Query {
    parse_query(&std::fs::read_to_string(fixtures().join("queries").join(name)).unwrap()).unwrap()
}

fn label(s: &str) -> Iri {
    let local = s.split_whitespace().collect::<Vec<_>>().join("_");
    let code = s.split_whitespace().next().unwrap_or("");
    let is_crm = code.len() > 1
        && (code.starts_with('E') || code.starts_with('P'))
        && code[1..].trim_end_matches('i').chars().all(|c| c.is_ascii_digit());
    if is_crm {
        crm(&local)
    } else {
        sealit(&local)
    }
}

fn ontology_counts() -> Outcome {
    let start = Instant::now();
    let s = OntologySchema::load_builtin();
    let classes = s.sealit_classes().count();
    let props = s.sealit_properties().count();
    let literal = s.sealit_properties().filter(|p| p.range.is_literal()).count();
    let symmetric = s.sealit_properties().filter(|p| p.symmetric).count();
    let attrs = s.attribute_count();
    let elapsed = start.elapsed();
    let got = (classes, props, literal, symmetric, attrs);
    ensure!(got == (46, 79, 7, 1, 4), "counts (classes, properties, literal, symmetric, attributes) = {got:?}");
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("46 classes, 79 properties, 7 literal, 1 symmetric, 4 attributes in {elapsed:.2?}"))
}

/// Child-to-root paths through the published class tree.
const CHAINS: &[&[&str]] = &[
    &["Shareholding", "Ship Ownership Phase", "Legal Object Relationship"],
    &["Ship", "E22 Human-Made Object", "E24 Physical Human-Made Thing", "E71 Human-Made Thing", "E70 Thing", "E77 Persistent Item", "E1 CRM Entity"],
    &["Crew Payment", "Money for Labour", "Money for Service", "E7 Activity", "E5 Event", "E4 Period", "E2 Temporal Entity", "E1 CRM Entity"],
    &["Ship Construction", "E12 Production", "E11 Modification", "E7 Activity"],
    &["Ship ID", "E42 Identifier", "E41 Appellation", "E90 Symbolic Object", "E72 Legal Object", "E70 Thing"],
    &["Port of Registry", "E74 Group", "E39 Actor", "E77 Persistent Item", "E1 CRM Entity"],
    &["Tonnage", "E54 Dimension", "E1 CRM Entity"],
    &["Labour Contract", "E29 Design or Procedure", "E73 Information Object", "E90 Symbolic Object"],
    &["Profession", "E55 Type", "E28 Conceptual Object", "E71 Human-Made Thing"],
    &["Section", "Teaching Unit", "E7 Activity"],
];

/// Property, domain, range (`None`: literal) from the published property table.
const DOMAIN_RANGE: &[(&str, &str, Option<&str>)] = &[
    ("has tonnage", "Ship", Some("Tonnage")),
    ("has ship ID", "Ship", Some("Ship ID")),
    ("consists of unloading", "Voyage", Some("Unloading")),
    ("navigated by captain", "Voyage", Some("E39 Actor")),
    ("for voyage", "Crew Payment", Some("Voyage")),
    ("works at", "E21 Person", Some("E74 Group")),
    ("has crew number capacity", "Ship", None),
    ("is shareholding phase of", "Shareholding", Some("Ship")),
    ("ownership is terminated by", "Ship Ownership Phase", Some("De-flagging")),
    ("ended", "Discharge", Some("Employment")),
];

fn hierarchy_fidelity() -> Outcome {
    let s = OntologySchema::load_builtin();
    for chain in CHAINS {
        for pair in chain.windows(2) {
            let (child, parent) = (label(pair[0]), label(pair[1]));
            let def = s.class(&child).ok_or_else(|| format!("missing class {}", pair[0]))?;
            ensure!(
                def.direct_superclasses.contains(&parent),
                "{} is not directly under {} (has {:?})",
                pair[0],
                pair[1],
                def.direct_superclasses
            );
        }
        let top = label(chain[chain.len() - 1]);
        ensure!(s.is_subclass_of(&label(chain[0]), &top), "{} not under {}", chain[0], chain[chain.len() - 1]);
    }
    for (p, dom, range) in DOMAIN_RANGE {
        let def = s.property(&label(p)).ok_or_else(|| format!("missing property {p}"))?;
        ensure!(def.domain == label(dom), "domain of {p}: {}", def.domain);
        match (range, &def.range) {
            (Some(r), Range::Class(c)) => ensure!(*c == label(r), "range of {p}: {c}"),
            (None, Range::Literal(_)) => {}
            (want, got) => return Err(format!("range of {p}: want {want:?}, got {got:?}")),
        }
    }
    Ok(format!("{} chains, {} domain/range pairs", CHAINS.len(), DOMAIN_RANGE.len()))
}

fn inference() -> Outcome {
    let schema = OntologySchema::load_builtin();
    let kb = fixture_kb(&schema);
    let q = listing("listing3.rq");
    let none = evaluate(&q, &kb, &schema, EntailmentMode::None);
    let rdfs = evaluate(&q, &kb, &schema, EntailmentMode::Rdfs);
    ensure!(none.rows.is_empty(), "NONE mode returned {} rows", none.rows.len());

    // Every activity attached to one of Aurora's voyages by a voyage-part property.
    let aurora = Iri::new("https://rs.sealitproject.eu/kb/ship/Aurora").unwrap();
    let parts = ["consists_of_leaving", "consists_of_arrival", "consists_of_passing", "consists_of_loading", "consists_of_unloading"];
    let mut want = BTreeSet::new();
    for v in kb.objects(&aurora, &sealit("voyages")) {
        let Term::Iri(v) = v else { continue };
        for p in parts {
            want.extend(kb.objects(v, &sealit(p)).cloned());
        }
    }
    let got: BTreeSet<Term> = rdfs.rows.iter().filter_map(|r| r[0].clone()).collect();
    ensure!(got == want && want.len() == 2, "RDFS activities {got:?}, recorded {want:?}");

    let subs: BTreeSet<Iri> = schema
        .subproperties(&crm("P9_consists_of"))
        .map_err(|e| e.to_string())?
        .iter()
        .filter(|p| schema.sealit_properties().any(|d| &d.id == *p))
        .cloned()
        .collect();
    let listed: BTreeSet<Iri> = parts.iter().map(|p| sealit(p)).collect();
    ensure!(subs == listed, "SEALIT subproperties of P9: {subs:?}");
    Ok("listing 3: 0 rows without entailment, 2 with; P9 has the 5 voyage-part subproperties".into())
}

fn sorted_rows(t: &BindingsTable) -> Vec<Vec<Option<Term>>> {
    let mut r = t.rows.clone();
    r.sort();
    r
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let schema = OntologySchema::load_builtin();
    let mut rng = StdRng::seed_from_u64(0x5ea1_17);
    let mut mismatches = Vec::new();
    let mut largest = 0;
    for i in 0..200 {
        let size = rng.gen_range(0..=2000);
        let voc = oracle::Vocabulary::new(&schema, 40 + size / 10);
        let g = voc.random_graph(&mut rng, size);
        largest = largest.max(g.len());
        let bgp = voc.random_bgp(&mut rng, 5);
        let q = Query {
            prefixes: Default::default(),
            distinct: false,
            projection: Vec::new(),
            patterns: bgp.clone(),
            group_by: Vec::new(),
            order_by: Vec::new(),
            limit: None,
        };
        let cols = q.columns();
        let asserted: Vec<Triple> = g.triples().collect();
        let closed: Vec<Triple> = oracle::materialize(&g, &schema).into_iter().collect();
        for (mode, triples) in [(EntailmentMode::None, &asserted), (EntailmentMode::Rdfs, &closed)] {
            let want = oracle::project(&oracle::nested_loop(&bgp, triples), &cols);
            let got = sorted_rows(&evaluate(&q, &g, &schema, mode));
            if got != want {
                mismatches.push(format!("query {i} ({mode:?}): {} rows vs oracle {}", got.len(), want.len()));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(mismatches.is_empty(), "{} mismatches: {}", mismatches.len(), mismatches.join("; "));
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("200 queries x 2 modes, graphs up to {largest} triples, 0 mismatches in {elapsed:.1?}"))
}

fn listings_1_and_2() -> Outcome {
    let schema = OntologySchema::load_builtin();
    let kb = fixture_kb(&schema);
    let asserted: Vec<Triple> = kb.triples().collect();
    let closed: Vec<Triple> = oracle::materialize(&kb, &schema).into_iter().collect();
    let (l1, l2) = (listing("listing1.rq"), listing("listing2.rq"));
    for (mode, triples) in [(EntailmentMode::None, &asserted), (EntailmentMode::Rdfs, &closed)] {
        // Listing 1: distinct persons.
        let sols = oracle::nested_loop(&l1.patterns, triples);
        let persons: BTreeSet<Term> = sols.iter().map(|s| s["person"].clone()).collect();
        let got1 = evaluate(&l1, &kb, &schema, mode);
        let got_persons: BTreeSet<Term> = got1.rows.iter().filter_map(|r| r[0].clone()).collect();
        ensure!(got1.rows.len() == got_persons.len(), "listing 1 has duplicate rows");
        ensure!(got_persons == persons, "listing 1 ({mode:?}): {got_persons:?} vs oracle {persons:?}");

        // Listing 2: per (location, name), the number of matching solutions.
        let mut groups: BTreeMap<(Term, Term), u64> = BTreeMap::new();
        for s in oracle::nested_loop(&l2.patterns, triples) {
            *groups.entry((s["location"].clone(), s["locationName"].clone())).or_default() += 1;
        }
        let got2 = evaluate(&l2, &kb, &schema, mode);
        let mut got_groups = BTreeMap::new();
        for r in &got2.rows {
            let (Some(loc), Some(name), Some(Term::Literal(n))) = (&r[0], &r[1], &r[2]) else {
                return Err(format!("listing 2 row {r:?}"));
            };
            got_groups.insert((loc.clone(), name.clone()), n.lexical().parse::<u64>().map_err(|e| e.to_string())?);
        }
        ensure!(got_groups == groups, "listing 2 ({mode:?}): {got_groups:?} vs oracle {groups:?}");

        let named: Vec<(String, u64)> = got_groups
            .iter()
            .map(|((_, name), n)| match name {
                Term::Literal(l) => (l.lexical().to_string(), *n),
                other => (other.to_string(), *n),
            })
            .collect();
        let camogli: Vec<_> = named.iter().filter(|(l, _)| l != "unknown").collect();
        ensure!(camogli == [&("Camogli".to_string(), 2)], "buckets {named:?}");
        let sum: u64 = got_groups.values().sum();
        ensure!(sum == got_persons.len() as u64, "bucket sum {sum} vs {} distinct persons", got_persons.len());
    }
    Ok("listing 1 = {2 persons}, listing 2 = [(Camogli, 2)], sum matches, both modes".into())
}

fn pipeline_closure() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let kb = dir.path().join("kb.ttl");
    let bin = env!("CARGO_BIN_EXE_mariner");
    let f = fixtures();
    let mut ingest = Command::new(bin);
    ingest.arg("ingest").arg("--mapping");
    for (map, _) in BUNDLES {
        ingest.arg(f.join("mappings").join(map));
    }
    ingest.arg("--records");
    for (_, rec) in BUNDLES {
        ingest.arg(f.join("records").join(rec));
    }
    let out = ingest.arg("--out").arg(&kb).arg("--strict").output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "ingest: {}", String::from_utf8_lossy(&out.stderr));

    let out = Command::new(bin).arg("validate").arg("--kb").arg(&kb).output().map_err(|e| e.to_string())?;
    let report = String::from_utf8_lossy(&out.stderr);
    ensure!(out.status.success() && report.contains("0 error(s)"), "validate: {report}");

    let text = std::fs::read_to_string(&kb).map_err(|e| e.to_string())?;
    let (g, diags) = parse_turtle(&text);
    ensure!(diags.is_empty(), "re-parse: {diags:?}");
    ensure!(serialize_turtle(&g) == text, "serialization is not byte-identical after a round trip");
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    Ok(format!("{} triples, 0 errors, byte-identical round trip in {elapsed:.2?}", g.len()))
}

fn reification() -> Outcome {
    let s = OntologySchema::load_builtin();
    let kb = |x: &str| Iri::new(format!("https://rs.sealitproject.eu/kb/{x}")).unwrap();
    let (person, group, role, node) = (kb("person/Giovanni_Razeto"), kb("legal_body/G._Schiaffino"), kb("role/Mate"), kb("pc_works_at/1"));
    let attrs = BTreeMap::from([(sealit("in_the_role_of"), Term::Iri(role.clone()))]);
    let got = s.reify(&person, &sealit("works_at"), &group, &attrs, &node).map_err(|e| e.to_string())?;
    let want: BTreeSet<Triple> = [
        Triple::new(node.clone(), rdf_type(), sealit("PC_works_at")),
        Triple::new(node.clone(), crm("P01_has_domain"), person.clone()),
        Triple::new(node.clone(), crm("P02_has_range"), group.clone()),
        Triple::new(node, sealit("in_the_role_of"), role),
        Triple::new(person, sealit("works_at"), group),
    ]
    .into_iter()
    .collect();
    ensure!(got == want, "got {got:#?}");
    Ok("works at + role: exactly the 5 node-and-arc triples".into())
}

const TURTLE_TOKENS: &[&str] = &[
    "@prefix", "sealit:", "<http://a/b>", "<", ">", ".", ";", ",", "a", "\"x\"", "\"", "\\", "@en", "^^", "xsd:integer",
    "_:b", "[", "]", "(", ")", "#", "\n", " ", "'", "\"\"\"", "12", "true", "@base", "\\u00e9", "é", ":",
];
const QUERY_TOKENS: &[&str] = &[
    "PREFIX", "SELECT", "DISTINCT", "WHERE", "{", "}", "?x", "?", "(", ")", "COUNT", "AS", "GROUP", "BY", "ORDER",
    "ASC", "DESC", "LIMIT", "*", ".", ";", ",", "a", "crm:", "<http://a>", "\"s\"", "42", "\n", " ", "#", "@",
];

fn random_input(rng: &mut StdRng, tokens: &[&str]) -> Vec<u8> {
    let mut out = Vec::new();
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(0..96);
        out.extend((0..n).map(|_| rng.gen::<u8>()));
    } else {
        for _ in 0..rng.gen_range(0..24) {
            if rng.gen_ratio(1, 8) {
                out.push(rng.gen());
            } else {
                out.extend_from_slice(tokens[rng.gen_range(0..tokens.len())].as_bytes());
                if rng.gen_bool(0.5) {
                    out.push(b' ');
                }
            }
        }
    }
    out
}

fn fuzz() -> Outcome {
    const N: usize = 100_000;
    let mut rng = StdRng::seed_from_u64(0xf022);
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut crashes = Vec::new();
    let (mut turtle_diag, mut query_err) = (0, 0);
    for i in 0..N {
        let bytes = random_input(&mut rng, TURTLE_TOKENS);
        match panic::catch_unwind(|| parse_turtle_bytes(&bytes)) {
            Ok(Ok((_, d))) if !d.is_empty() => turtle_diag += 1,
            Ok(_) => {}
            Err(_) => crashes.push(format!("turtle input {i}: {:?}", String::from_utf8_lossy(&bytes))),
        }
        let bytes = random_input(&mut rng, QUERY_TOKENS);
        let text = String::from_utf8_lossy(&bytes).into_owned();
        match panic::catch_unwind(|| parse_query(&text)) {
            Ok(Err(_)) => query_err += 1,
            Ok(Ok(_)) => {}
            Err(_) => crashes.push(format!("query input {i}: {text:?}")),
        }
    }
    panic::set_hook(hook);
    ensure!(crashes.is_empty(), "{} crashes, first: {}", crashes.len(), crashes[0]);
    Ok(format!("{N} inputs per parser, no crashes ({turtle_diag} Turtle diagnostics, {query_err} query errors)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("ontology counts", ontology_counts),
        ("hierarchy fidelity", hierarchy_fidelity),
        ("inference", inference),
        ("query oracle equivalence", oracle_equivalence),
        ("listings 1 and 2", listings_1_and_2),
        ("pipeline closure", pipeline_closure),
        ("reification", reification),
        ("parser fuzz", fuzz),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name} - {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
