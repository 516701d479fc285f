use std::cmp::Ordering;

use serde_json::{json, Map, Value};

use crate::term::Term;

/// Tabular query result. Cells are `None` where a variable is unbound.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BindingsTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<Term>>>,
}

fn integer(t: &Term) -> Option<i64> {
    t.as_literal().and_then(|l| l.as_integer())
}

/// Total order used for ORDER BY and for default result order: unbound
/// first, then integer-typed literals by numeric value, then every other
/// term by its lexical form (code-point order). Remaining ties fall back
/// to the structural term order.
pub fn compare_terms(a: &Option<Term>, b: &Option<Term>) -> Ordering {
    fn rank(t: &Option<Term>) -> u8 {
        match t {
            None => 0,
            Some(t) if integer(t).is_some() => 1,
            Some(_) => 2,
        }
    }
    rank(a).cmp(&rank(b)).then_with(|| match (a, b) {
        (Some(x), Some(y)) => match (integer(x), integer(y)) {
            (Some(i), Some(j)) => i.cmp(&j),
            _ => x.lexical().cmp(y.lexical()),
        }
        .then_with(|| x.cmp(y)),
        _ => Ordering::Equal,
    })
}

pub(crate) fn compare_rows(a: &[Option<Term>], b: &[Option<Term>]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| compare_terms(x, y))
        .find(|o| o.is_ne())
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

fn cell_text(t: &Option<Term>) -> &str {
    t.as_ref().map_or("", Term::lexical)
}

impl BindingsTable {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, unbound cells skipped.
    pub fn values(&self, name: &str) -> Vec<&Term> {
        match self.column(name) {
            Some(i) => self.rows.iter().filter_map(|r| r[i].as_ref()).collect(),
            None => Vec::new(),
        }
    }

    /// CSV with a header row of variable names; IRIs and literals are written
    /// as their plain string form, unbound cells as empty fields.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("write to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(cell_text)).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("CSV of UTF-8 input")
    }

    /// SPARQL 1.1 query results JSON.
    pub fn to_json(&self) -> Value {
        let bindings: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    if let Some(t) = cell {
                        m.insert(name.clone(), term_json(t));
                    }
                }
                Value::Object(m)
            })
            .collect();
        json!({ "head": { "vars": self.columns }, "results": { "bindings": bindings } })
    }
}

pub(crate) fn term_json(t: &Term) -> Value {
    match t {
        Term::Iri(i) => json!({ "type": "uri", "value": i.as_str() }),
        Term::Literal(l) => {
            let mut m = Map::new();
            m.insert("type".into(), "literal".into());
            m.insert("value".into(), l.lexical().into());
            if let Some(lang) = l.language() {
                m.insert("xml:lang".into(), lang.into());
            } else if let Some(dt) = l.datatype() {
                m.insert("datatype".into(), dt.as_str().into());
            }
            Value::Object(m)
        }
    }
}
