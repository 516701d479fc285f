use std::collections::{BTreeMap, BTreeSet};

use super::entail::entailed_matches;
use super::results::compare_rows;
use super::{compare_terms, BindingsTable, CountTarget, EntailmentMode, PatternTerm, Projection, Query, TriplePattern};
use crate::graph::Graph;
use crate::ontology::OntologySchema;
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab;

type Row = Vec<Option<Term>>;

struct Ctx<'a> {
    graph: &'a Graph,
    schema: &'a OntologySchema,
    mode: EntailmentMode,
    vars: &'a [String],
}

impl Ctx<'_> {
    fn slot(&self, v: &str) -> usize {
        self.vars.iter().position(|x| x == v).expect("pattern variable")
    }

    fn matches(&self, p: &TriplePattern, row: &Row, out: &mut Vec<Triple>) {
        let resolve = |t: &PatternTerm| -> Option<Term> {
            match t {
                PatternTerm::Var(v) => row[self.slot(v)].clone(),
                PatternTerm::Iri(i) => Some(Term::Iri(i.clone())),
                PatternTerm::Literal(l) => Some(Term::Literal(l.clone())),
            }
        };
        let (s, pr, o) = (resolve(&p.subject), resolve(&p.predicate), resolve(&p.object));
        let as_iri = |t: &Option<Term>| -> Result<Option<Iri>, ()> {
            match t {
                None => Ok(None),
                Some(Term::Iri(i)) => Ok(Some(i.clone())),
                Some(Term::Literal(_)) => Err(()),
            }
        };
        let (Ok(s), Ok(pr)) = (as_iri(&s), as_iri(&pr)) else {
            return;
        };
        match self.mode {
            EntailmentMode::None => {
                self.graph
                    .for_each_match(s.as_ref(), pr.as_ref(), o.as_ref(), |t| out.push(t))
            }
            EntailmentMode::Rdfs => out.extend(entailed_matches(
                self.graph,
                self.schema,
                s.as_ref(),
                pr.as_ref(),
                o.as_ref(),
            )),
        }
    }

    /// Extends `row` with the bindings of `t` against pattern `p`, or None
    /// if a variable repeated within the pattern gets two different values.
    fn bind(&self, p: &TriplePattern, t: &Triple, row: &Row) -> Option<Row> {
        let mut next = row.clone();
        let vals = [
            (&p.subject, Term::Iri(t.subject.clone())),
            (&p.predicate, Term::Iri(t.predicate.clone())),
            (&p.object, t.object.clone()),
        ];
        for (pt, val) in vals {
            if let PatternTerm::Var(v) = pt {
                let slot = &mut next[self.slot(v)];
                match slot {
                    Some(existing) if *existing != val => return None,
                    Some(_) => {}
                    None => *slot = Some(val),
                }
            }
        }
        Some(next)
    }

    fn solve(&self, order: &[&TriplePattern], row: Row, out: &mut Vec<Row>) {
        let Some((first, rest)) = order.split_first() else {
            out.push(row);
            return;
        };
        let mut found = Vec::new();
        self.matches(first, &row, &mut found);
        for t in &found {
            if let Some(next) = self.bind(first, t, &row) {
                self.solve(rest, next, out);
            }
        }
    }
}

/// Greedy join order: next is the pattern with the fewest unbound
/// positions, then the smallest asserted-triple estimate for its constants.
fn plan<'a>(patterns: &'a [TriplePattern], graph: &Graph) -> Vec<&'a TriplePattern> {
    let mut bound: BTreeSet<&str> = BTreeSet::new();
    let mut left: Vec<(usize, &TriplePattern)> = patterns.iter().enumerate().collect();
    let mut order = Vec::with_capacity(patterns.len());
    while !left.is_empty() {
        let key = |p: &TriplePattern, bound: &BTreeSet<&str>| {
            let unbound = p.vars().filter(|v| !bound.contains(v)).count();
            let s = match &p.subject {
                PatternTerm::Iri(i) => Some(i),
                _ => None,
            };
            let pr = match &p.predicate {
                PatternTerm::Iri(i) => Some(i),
                _ => None,
            };
            let o = match &p.object {
                PatternTerm::Iri(i) => Some(Term::Iri(i.clone())),
                PatternTerm::Literal(l) => Some(Term::Literal(l.clone())),
                PatternTerm::Var(_) => None,
            };
            (unbound, graph.estimate(s, pr, o.as_ref()))
        };
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by_key(|(_, (i, p))| (key(p, &bound), *i))
            .expect("non-empty");
        let (_, p) = left.remove(pos);
        bound.extend(p.vars());
        order.push(p);
    }
    order
}

fn count_literal(n: usize) -> Term {
    Term::Literal(Literal::typed(n.to_string(), vocab::xsd("integer")))
}

/// Evaluates a query. Row order is deterministic: ORDER BY keys first, ties
/// (and queries without ORDER BY) broken by comparing whole rows.
pub fn evaluate(query: &Query, graph: &Graph, schema: &OntologySchema, mode: EntailmentMode) -> BindingsTable {
    let vars = query.pattern_vars();
    let cx = Ctx {
        graph,
        schema,
        mode,
        vars: &vars,
    };
    let mut solutions = Vec::new();
    cx.solve(&plan(&query.patterns, graph), vec![None; vars.len()], &mut solutions);

    let columns = query.columns();
    let get = |row: &Row, v: &str| -> Option<Term> {
        vars.iter().position(|x| x == v).and_then(|i| row[i].clone())
    };

    // (output row, sort keys)
    let mut rows: Vec<(Row, Row)> = Vec::new();
    if query.is_aggregate() {
        let mut groups: BTreeMap<Row, Vec<&Row>> = BTreeMap::new();
        if query.group_by.is_empty() {
            groups.insert(Vec::new(), solutions.iter().collect());
        } else {
            for s in &solutions {
                let key = query.group_by.iter().map(|g| get(s, g)).collect();
                groups.entry(key).or_default().push(s);
            }
        }
        for (key, members) in &groups {
            let lookup = |name: &str| -> Option<Term> {
                if let Some(i) = query.group_by.iter().position(|g| g == name) {
                    return key[i].clone();
                }
                query.projection.iter().find_map(|p| match p {
                    Projection::Count {
                        target,
                        distinct,
                        alias,
                    } if alias == name => {
                        let n = match target {
                            CountTarget::All => members.len(),
                            CountTarget::Var(v) => {
                                let vals = members.iter().filter_map(|m| get(m, v));
                                if *distinct {
                                    vals.collect::<BTreeSet<_>>().len()
                                } else {
                                    vals.count()
                                }
                            }
                        };
                        Some(count_literal(n))
                    }
                    _ => None,
                })
            };
            let out: Row = columns.iter().map(|c| lookup(c)).collect();
            let keys: Row = query.order_by.iter().map(|k| lookup(&k.var)).collect();
            rows.push((out, keys));
        }
    } else {
        for s in &solutions {
            let out: Row = columns.iter().map(|c| get(s, c)).collect();
            let keys: Row = query.order_by.iter().map(|k| get(s, &k.var)).collect();
            rows.push((out, keys));
        }
    }

    rows.sort_by(|(ra, ka), (rb, kb)| {
        ka.iter()
            .zip(kb)
            .zip(&query.order_by)
            .map(|((a, b), k)| {
                let o = compare_terms(a, b);
                if k.descending {
                    o.reverse()
                } else {
                    o
                }
            })
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| compare_rows(ra, rb))
    });

    let mut out_rows: Vec<Row> = Vec::with_capacity(rows.len());
    let mut seen = BTreeSet::new();
    for (r, _) in rows {
        if query.distinct && !seen.insert(r.clone()) {
            continue;
        }
        out_rows.push(r);
    }
    if let Some(n) = query.limit {
        out_rows.truncate(n);
    }
    BindingsTable {
        columns,
        rows: out_rows,
    }
}
