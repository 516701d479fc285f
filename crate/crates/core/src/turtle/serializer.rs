use std::fmt::Write;

use crate::graph::Graph;
use crate::term::{escape_string, Iri, Literal, Term};
use crate::vocab;

fn valid_prefix(p: &str) -> bool {
    let mut chars = p.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_ascii_alphabetic() => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        }
        _ => false,
    }
}

/// Conservative local-name check: only characters that survive a round trip
/// without escaping, never starting with `-` or ending with `.`.
fn valid_local(l: &str) -> bool {
    let b = l.as_bytes();
    let Some(&first) = b.first() else {
        return false;
    };
    let body = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'-';
    (first.is_ascii_alphanumeric() || first == b'_')
        && b.iter().all(|&c| body(c) || c == b'.')
        && b[b.len() - 1] != b'.'
        && !l.contains("..")
}

struct Writer<'a> {
    prefixes: Vec<(&'a str, &'a str)>,
}

impl Writer<'_> {
    fn iri(&self, iri: &Iri) -> String {
        let s = iri.as_str();
        // Longest matching namespace wins.
        let best = self
            .prefixes
            .iter()
            .filter(|(_, ns)| s.len() > ns.len() && s.starts_with(ns))
            .filter(|(_, ns)| valid_local(&s[ns.len()..]))
            .max_by_key(|(p, ns)| (ns.len(), std::cmp::Reverse(*p)));
        match best {
            Some((p, ns)) => format!("{p}:{}", &s[ns.len()..]),
            None => format!("<{s}>"),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        let mut out = format!("\"{}\"", escape_string(lit.lexical()));
        if let Some(lang) = lit.language() {
            out.push('@');
            out.push_str(lang);
        } else if let Some(dt) = lit.datatype() {
            out.push_str("^^");
            out.push_str(&self.iri(dt));
        }
        out
    }

    fn term(&self, t: &Term) -> String {
        match t {
            Term::Iri(i) => self.iri(i),
            Term::Literal(l) => self.literal(l),
        }
    }
}

/// Writes the graph as Turtle. The output is a pure function of the graph:
/// prefixes sorted by name, subjects, predicates and objects in term order,
/// predicates of a subject joined with `;` and objects with `,`.
pub fn serialize_turtle(graph: &Graph) -> String {
    let prefixes: Vec<(&str, &str)> = graph
        .prefixes()
        .iter()
        .filter(|(p, _)| valid_prefix(p))
        .map(|(p, ns)| (p.as_str(), ns.as_str()))
        .collect();
    let w = Writer { prefixes };
    let mut out = String::new();
    for (p, ns) in &w.prefixes {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    let rdf_type = vocab::rdf_type();

    let triples: Vec<_> = graph.triples().collect();
    for group in triples.chunk_by(|a, b| a.subject == b.subject) {
        out.push('\n');
        out.push_str(&w.iri(&group[0].subject));
        // rdf:type first, then the remaining predicates in term order.
        let (types, rest): (Vec<_>, Vec<_>) = group.iter().partition(|t| t.predicate == rdf_type);
        let ordered: Vec<_> = types.into_iter().chain(rest).collect();
        for (i, pgroup) in ordered.chunk_by(|a, b| a.predicate == b.predicate).enumerate() {
            out.push_str(if i == 0 { " " } else { " ;\n    " });
            if pgroup[0].predicate == rdf_type {
                out.push('a');
            } else {
                out.push_str(&w.iri(&pgroup[0].predicate));
            }
            for (j, t) in pgroup.iter().enumerate() {
                out.push_str(if j == 0 { " " } else { " ,\n        " });
                out.push_str(&w.term(&t.object));
            }
        }
        out.push_str(" .\n");
    }
    out
}
