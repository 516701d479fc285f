use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use super::MappingError;

/// One transcribed table: a header row and rows of optional cells.
/// Empty (or blank) cells are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<Option<String>>>,
}

impl Table {
    /// Builds a table named `name` (used in error messages), checking that
    /// header names are unique and every row is as wide as the header.
    pub fn new(
        name: &str,
        headers: Vec<String>,
        rows: Vec<Vec<Option<String>>>,
    ) -> Result<Self, MappingError> {
        let mut seen = BTreeSet::new();
        for h in &headers {
            if !seen.insert(h) {
                return Err(MappingError::MalformedRow {
                    table: name.to_string(),
                    row: 0,
                    message: format!("duplicate column {h:?}"),
                });
            }
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != headers.len() {
                return Err(MappingError::MalformedRow {
                    table: name.to_string(),
                    row: i + 1,
                    message: format!("{} cells, header has {}", r.len(), headers.len()),
                });
            }
        }
        let rows = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| c.filter(|c| !c.trim().is_empty()))
                    .collect()
            })
            .collect();
        Ok(Table { headers, rows })
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Option<String>>] {
        &self.rows
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }
}

/// The tables and metadata of one archival record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordBundle {
    pub template_id: String,
    pub record_id: String,
    pub source_label: String,
    pub tables: BTreeMap<String, Table>,
    /// Directory the bundle was read from, for error messages.
    pub origin: Option<PathBuf>,
}

impl RecordBundle {
    pub fn new(
        template_id: impl Into<String>,
        record_id: impl Into<String>,
        source_label: impl Into<String>,
    ) -> Self {
        RecordBundle {
            template_id: template_id.into(),
            record_id: record_id.into(),
            source_label: source_label.into(),
            tables: BTreeMap::new(),
            origin: None,
        }
    }

    pub fn with_table(mut self, name: impl Into<String>, table: Table) -> Self {
        self.tables.insert(name.into(), table);
        self
    }

    /// Reads a bundle directory: `meta.txt` (`key: value` lines with
    /// `template_id`, `record_id`, `source_label`) and one `<table>.csv` per
    /// table, each with a header row.
    pub fn load(dir: &Path) -> Result<Self, MappingError> {
        let meta_path = dir.join("meta.txt");
        let meta = fs::read_to_string(&meta_path).map_err(|e| bundle_err(&meta_path, e))?;
        let mut fields = BTreeMap::new();
        for (i, line) in meta.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once(':').ok_or_else(|| MappingError::Bundle {
                path: meta_path.clone(),
                message: format!("line {}: expected `key: value`", i + 1),
            })?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str| {
            fields.remove(key).ok_or_else(|| MappingError::Bundle {
                path: meta_path.clone(),
                message: format!("missing {key}"),
            })
        };
        let mut bundle = RecordBundle::new(take("template_id")?, take("record_id")?, take("source_label")?);
        bundle.origin = Some(dir.to_path_buf());

        let mut entries: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| bundle_err(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        entries.sort();
        for path in entries {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| MappingError::Bundle {
                    path: path.clone(),
                    message: "table file name is not UTF-8".into(),
                })?
                .to_string();
            let table = read_csv(&path, &name)?;
            bundle.tables.insert(name, table);
        }
        Ok(bundle)
    }
}

fn bundle_err(path: &Path, e: impl std::fmt::Display) -> MappingError {
    MappingError::Bundle {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn read_csv(path: &Path, name: &str) -> Result<Table, MappingError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| bundle_err(path, e))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| bundle_err(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| bundle_err(path, e))?;
        rows.push(rec.iter().map(|c| Some(c.to_string())).collect());
    }
    Table::new(name, headers, rows).map_err(|e| match e {
        MappingError::MalformedRow { row, message, .. } => MappingError::Bundle {
            path: path.to_path_buf(),
            message: format!("row {row}: {message}"),
        },
        e => e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &str) -> Option<String> {
        Some(v.to_string())
    }

    #[test]
    fn empty_cells_are_absent() {
        let t = Table::new("t", vec!["a".into(), "b".into()], vec![vec![s("x"), s("  ")]]).unwrap();
        assert_eq!(t.rows()[0], vec![s("x"), None]);
        assert_eq!(t.column("b"), Some(1));
    }

    #[test]
    fn width_and_header_checks() {
        assert!(Table::new("t", vec!["a".into(), "a".into()], vec![]).is_err());
        assert!(Table::new("t", vec!["a".into()], vec![vec![s("x"), s("y")]]).is_err());
    }

    #[test]
    fn load_directory() {
        let dir = std::env::temp_dir().join(format!("mariner-bundle-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("meta.txt"), "template_id: crew_list\nrecord_id: r1\nsource_label: Archive X\n").unwrap();
        fs::write(dir.join("crew.csv"), "name,residence\n\"Rossi, G.\",Camogli\nBianchi,\n").unwrap();
        let b = RecordBundle::load(&dir).unwrap();
        assert_eq!(b.template_id, "crew_list");
        let t = &b.tables["crew"];
        assert_eq!(t.rows(), &[vec![s("Rossi, G."), s("Camogli")], vec![s("Bianchi"), None]]);

        fs::write(dir.join("bad.csv"), "a,b\n1,2,3\n").unwrap();
        let err = RecordBundle::load(&dir).unwrap_err().to_string();
        assert!(err.contains("bad.csv"), "{err}");
        fs::remove_dir_all(&dir).unwrap();
    }
}
