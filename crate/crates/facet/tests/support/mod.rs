use std::path::{Path, PathBuf};

use mariner_core::mapping::{apply_mapping, parse_mapping, MintPolicy, RecordBundle};
use mariner_core::{Graph, OntologySchema};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// The three fixture records mapped and merged.
pub fn fixture_kb(schema: &OntologySchema) -> Graph {
    let mut g = Graph::new();
    for (map, dir) in [
        ("crew_list.map", "crew_list_aurora"),
        ("payroll.map", "payroll_stella"),
        ("naval_ship_register.map", "register_fortuna"),
    ] {
        let text = std::fs::read_to_string(fixtures().join("mappings").join(map)).unwrap();
        let spec = parse_mapping(&text, schema).unwrap();
        let bundle = RecordBundle::load(&fixtures().join("records").join(dir)).unwrap();
        let (part, _) = apply_mapping(&spec, &bundle, schema, &MintPolicy::default()).unwrap();
        g.merge(&part);
    }
    g
}
