use std::collections::BTreeMap;

use mariner_core::query::{var, CountTarget, OrderKey, PatternTerm, Projection, Query, TriplePattern};
use mariner_core::vocab::{self, rdf_type, rdfs_label};
use mariner_core::Iri;
use serde::{Deserialize, Serialize};

use crate::registry::{ConnectionDef, Direction, FacetModel, Step};
use crate::FacetError;

/// Column names of a compiled grouped query.
pub const GROUP_VAR: &str = "group";
pub const GROUP_LABEL_VAR: &str = "groupLabel";
pub const COUNT_VAR: &str = "count";

/// The query a user builds step by step: a root category, connections
/// followed from it, and optionally a connection to group the roots by.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryState {
    pub root: String,
    #[serde(default)]
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group_by: Option<String>,
}

/// One connection followed from the context category. It ends at a chosen
/// instance, at a nested state rooted in the connection's target, or
/// (neither given) anywhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clause {
    pub connection: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Box<QueryState>>,
}

impl QueryState {
    pub fn new(root: impl Into<String>) -> Self {
        QueryState {
            root: root.into(),
            clauses: Vec::new(),
            group_by: None,
        }
    }

    pub fn with(mut self, connection: &str, instance: Option<&str>) -> Self {
        self.clauses.push(Clause {
            connection: connection.into(),
            instance: instance.map(str::to_string),
            state: None,
        });
        self
    }

    pub fn with_state(mut self, connection: &str, state: QueryState) -> Self {
        self.clauses.push(Clause {
            connection: connection.into(),
            instance: None,
            state: Some(Box::new(state)),
        });
        self
    }

    pub fn grouped_by(mut self, connection: &str) -> Self {
        self.group_by = Some(connection.into());
        self
    }
}

struct Compiler<'a> {
    model: &'a FacetModel,
    patterns: Vec<TriplePattern>,
    used: BTreeMap<String, usize>,
}

impl Compiler<'_> {
    fn fresh(&mut self, base: &str) -> String {
        let n = self.used.entry(base.to_string()).or_insert(0);
        *n += 1;
        if *n == 1 {
            base.to_string()
        } else {
            format!("{base}{n}")
        }
    }

    fn push(&mut self, from: &PatternTerm, step: &Step, to: &PatternTerm) {
        let p = PatternTerm::Iri(step.property.clone());
        let t = match step.direction {
            Direction::Forward => TriplePattern::new(from.clone(), p, to.clone()),
            Direction::Inverse => TriplePattern::new(to.clone(), p, from.clone()),
        };
        if !self.patterns.contains(&t) {
            self.patterns.push(t);
        }
    }

    /// Emits the path of `conn` from `from` to `end`. When `back` is the
    /// node just before `from` on the enclosing path together with the step
    /// that led here, a first step retracing that edge lands on `back`
    /// again: "a crew member of a ship that arrived at X" concerns one
    /// voyage, as in the hand-written listings.
    fn path(
        &mut self,
        conn: &ConnectionDef,
        from: &PatternTerm,
        end: PatternTerm,
        back: Option<(&PatternTerm, &Step)>,
    ) -> Option<(PatternTerm, Step)> {
        let mut here = from.clone();
        let mut last = None;
        for (i, step) in conn.path.iter().enumerate() {
            let next = if i + 1 == conn.path.len() {
                end.clone()
            } else if let (0, Some((prev, prev_step))) = (i, back) {
                if retraces(prev_step, step) {
                    prev.clone()
                } else {
                    var(&self.fresh("n"))
                }
            } else {
                var(&self.fresh("n"))
            };
            self.push(&here, step, &next);
            last = Some((here.clone(), step.clone()));
            here = next;
        }
        last
    }

    fn state(
        &mut self,
        state: &QueryState,
        root: &PatternTerm,
        back: Option<(&PatternTerm, &Step)>,
    ) -> Result<(), FacetError> {
        self.model.category(&state.root)?;
        for clause in &state.clauses {
            let conn = self.model.connection(&clause.connection)?;
            if conn.source != state.root {
                return Err(FacetError::TypeMismatch(format!(
                    "connection {} starts at {}, not {}",
                    conn.id, conn.source, state.root
                )));
            }
            match (&clause.instance, &clause.state) {
                (Some(_), Some(_)) => {
                    return Err(FacetError::InvalidState(format!(
                        "clause {} has both an instance and a nested state",
                        conn.id
                    )))
                }
                (Some(i), None) => {
                    let iri = Iri::new(i.as_str()).map_err(|e| FacetError::InvalidState(e.to_string()))?;
                    self.path(conn, root, PatternTerm::Iri(iri), back);
                }
                (None, None) => {
                    let end = var(&self.fresh(&conn.target));
                    self.path(conn, root, end, back);
                }
                (None, Some(sub)) => {
                    if sub.root != conn.target {
                        return Err(FacetError::TypeMismatch(format!(
                            "connection {} leads to {}, nested state is rooted at {}",
                            conn.id, conn.target, sub.root
                        )));
                    }
                    if sub.group_by.is_some() {
                        return Err(FacetError::InvalidState("only the outermost state may group".into()));
                    }
                    let end = var(&self.fresh(&conn.target));
                    let last = self.path(conn, root, end.clone(), back);
                    let (prev, step) = last.expect("paths are non-empty");
                    self.state(sub, &end, Some((&prev, &step)))?;
                }
            }
        }
        Ok(())
    }
}

fn retraces(prev: &Step, step: &Step) -> bool {
    prev.property == step.property && prev.direction != step.direction
}

/// Translates a state into a query: ungrouped states select the distinct
/// root instances; grouped states count roots per group value and label.
pub fn compile(state: &QueryState, model: &FacetModel) -> Result<Query, FacetError> {
    let mut cx = Compiler {
        model,
        patterns: Vec::new(),
        used: BTreeMap::new(),
    };
    let root_name = cx.fresh(&state.root);
    let root = var(&root_name);
    cx.state(state, &root, None)?;
    if state.clauses.is_empty() {
        for class in &model.category(&state.root)?.classes {
            cx.patterns
                .push(TriplePattern::new(root.clone(), rdf_type(), class.clone()));
        }
    }

    let mut prefixes = BTreeMap::new();
    for (p, ns) in vocab::DEFAULT_PREFIXES.iter() {
        prefixes.insert(p.to_string(), Iri::new(*ns).expect("valid namespace"));
    }
    let mut query = Query {
        prefixes,
        distinct: true,
        projection: vec![Projection::Var(root_name.clone())],
        patterns: Vec::new(),
        group_by: Vec::new(),
        order_by: Vec::new(),
        limit: None,
    };
    if let Some(g) = &state.group_by {
        let conn = model.connection(g)?;
        if conn.source != state.root {
            return Err(FacetError::TypeMismatch(format!(
                "grouping connection {} starts at {}, not {}",
                conn.id, conn.source, state.root
            )));
        }
        let group = var(GROUP_VAR);
        cx.path(conn, &root, group.clone(), None);
        cx.patterns
            .push(TriplePattern::new(group, rdfs_label(), var(GROUP_LABEL_VAR)));
        query.projection = vec![
            Projection::Var(GROUP_VAR.into()),
            Projection::Var(GROUP_LABEL_VAR.into()),
            Projection::Count {
                target: CountTarget::Var(root_name),
                distinct: false,
                alias: COUNT_VAR.into(),
            },
        ];
        query.group_by = vec![GROUP_VAR.into(), GROUP_LABEL_VAR.into()];
        query.order_by = vec![OrderKey {
            var: GROUP_LABEL_VAR.into(),
            descending: false,
        }];
    }
    query.patterns = cx.patterns;
    Ok(query)
}

#[cfg(test)]
mod tests {
    use super::*;
    use mariner_core::query::parse_query;
    use mariner_core::OntologySchema;
    use std::collections::BTreeSet;

    const LISTING_1: &str = include_str!("../../../fixtures/queries/listing1.rq");
    const LISTING_2: &str = include_str!("../../../fixtures/queries/listing2.rq");
    const MARSEILLE: &str = "https://rs.sealitproject.eu/kb/location/Marseille";

    fn model() -> FacetModel {
        FacetModel::builtin(&OntologySchema::load_builtin())
    }

    fn rename(t: &PatternTerm, map: &BTreeMap<String, String>) -> PatternTerm {
        match t {
            PatternTerm::Var(v) => PatternTerm::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
            other => other.clone(),
        }
    }

    fn permutations(items: &[String]) -> Vec<Vec<String>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x.clone());
                out.push(p);
            }
        }
        out
    }

    /// Equal up to a bijective renaming of variables and the order of the
    /// WHERE patterns.
    fn alpha_equivalent(a: &Query, b: &Query) -> bool {
        let (va, vb) = (a.pattern_vars(), b.pattern_vars());
        if va.len() != vb.len() || a.patterns.len() != b.patterns.len() {
            return false;
        }
        let target: BTreeSet<&TriplePattern> = b.patterns.iter().collect();
        permutations(&vb).into_iter().any(|perm| {
            let map: BTreeMap<String, String> = va.iter().cloned().zip(perm).collect();
            let pats: BTreeSet<TriplePattern> = a
                .patterns
                .iter()
                .map(|p| TriplePattern {
                    subject: rename(&p.subject, &map),
                    predicate: rename(&p.predicate, &map),
                    object: rename(&p.object, &map),
                })
                .collect();
            let r = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
            let proj: Vec<Projection> = a
                .projection
                .iter()
                .map(|p| match p {
                    Projection::Var(v) => Projection::Var(r(v)),
                    Projection::Count { target: CountTarget::Var(v), distinct, .. } => Projection::Count {
                        target: CountTarget::Var(r(v)),
                        distinct: *distinct,
                        alias: String::new(),
                    },
                    other => other.clone(),
                })
                .collect();
            let proj_b: Vec<Projection> = b
                .projection
                .iter()
                .map(|p| match p {
                    Projection::Count { target, distinct, .. } => Projection::Count {
                        target: target.clone(),
                        distinct: *distinct,
                        alias: String::new(),
                    },
                    other => other.clone(),
                })
                .collect();
            let alias_a: BTreeSet<&str> = a.projection.iter().filter(|p| matches!(p, Projection::Count { .. })).map(|p| p.name()).collect();
            let alias_b: BTreeSet<&str> = b.projection.iter().filter(|p| matches!(p, Projection::Count { .. })).map(|p| p.name()).collect();
            let order_ok = a.order_by.len() == b.order_by.len()
                && a.order_by.iter().zip(&b.order_by).all(|(x, y)| {
                    x.descending == y.descending
                        && (r(&x.var) == y.var || (alias_a.contains(x.var.as_str()) && alias_b.contains(y.var.as_str())))
                });
            pats.iter().collect::<BTreeSet<_>>() == target
                && proj == proj_b
                && a.distinct == b.distinct
                && a.group_by.iter().map(r).collect::<Vec<_>>() == b.group_by
                && order_ok
                && a.limit == b.limit
        })
    }

    fn marseille_crew() -> QueryState {
        QueryState::new("person").with_state(
            "crew_member_of",
            QueryState::new("ship").with("ship_arrived_at", Some(MARSEILLE)),
        )
    }

    #[test]
    fn crew_of_ships_arriving_at_marseille_is_listing_1() {
        let q = compile(&marseille_crew(), &model()).unwrap();
        let listing = parse_query(LISTING_1).unwrap();
        assert!(alpha_equivalent(&q, &listing), "{q}");
    }

    #[test]
    fn grouping_by_residence_is_listing_2() {
        let q = compile(&marseille_crew().grouped_by("has_residence"), &model()).unwrap();
        let listing = parse_query(LISTING_2).unwrap();
        assert!(alpha_equivalent(&q, &listing), "{q}");
        // The text form parses back to the same query.
        assert_eq!(parse_query(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn equivalence_check_is_not_vacuous() {
        let l1 = parse_query(LISTING_1).unwrap();
        let l2 = parse_query(LISTING_2).unwrap();
        assert!(!alpha_equivalent(&l1, &l2));
        // Without hop sharing the nested clause would mention a second voyage.
        let flat = QueryState::new("person")
            .with("crew_member_of", None)
            .with("has_residence", None);
        assert!(!alpha_equivalent(&compile(&flat, &model()).unwrap(), &l1));
    }

    #[test]
    fn bare_root_enumerates_the_category() {
        let q = compile(&QueryState::new("ship"), &model()).unwrap();
        let want = parse_query(
            "PREFIX rdf: <http://www.w3.org/1999/02/22-rdf-syntax-ns#>\n\
             PREFIX sealit: <http://www.sealitproject.eu/ontology/>\n\
             SELECT DISTINCT ?s WHERE { ?s rdf:type sealit:Ship }",
        )
        .unwrap();
        assert!(alpha_equivalent(&q, &want), "{q}");
    }

    #[test]
    fn unconstrained_and_multi_hop_paths() {
        let q = compile(&QueryState::new("ship").with("has_owner", None), &model()).unwrap();
        assert_eq!(q.patterns.len(), 2);
        assert_eq!(q.patterns[0].object, var("ship"));
        assert_eq!(q.patterns[1].object, var("legal_body"));
        assert_eq!(q.patterns[0].subject, q.patterns[1].subject);
    }

    #[test]
    fn errors() {
        let m = model();
        assert!(matches!(compile(&QueryState::new("boat"), &m), Err(FacetError::UnknownCategory(_))));
        assert!(matches!(
            compile(&QueryState::new("ship").with("nope", None), &m),
            Err(FacetError::UnknownConnection(_))
        ));
        assert!(matches!(
            compile(&QueryState::new("ship").with("has_residence", None), &m),
            Err(FacetError::TypeMismatch(_))
        ));
        assert!(matches!(
            compile(&QueryState::new("person").with_state("crew_member_of", QueryState::new("place")), &m),
            Err(FacetError::TypeMismatch(_))
        ));
        assert!(matches!(
            compile(&QueryState::new("ship").grouped_by("has_residence"), &m),
            Err(FacetError::TypeMismatch(_))
        ));
        let mut both = QueryState::new("ship").with("voyages", Some("http://a/b"));
        both.clauses[0].state = Some(Box::new(QueryState::new("voyage")));
        assert!(matches!(compile(&both, &m), Err(FacetError::InvalidState(_))));
        assert!(matches!(
            compile(&QueryState::new("ship").with("voyages", Some("not an iri")), &m),
            Err(FacetError::InvalidState(_))
        ));
        let nested_group = QueryState::new("ship").with_state("voyages", QueryState::new("voyage").grouped_by("arrived_at"));
        assert!(matches!(compile(&nested_group, &m), Err(FacetError::InvalidState(_))));
    }

    #[test]
    fn state_json_shape() {
        let s = marseille_crew().grouped_by("has_residence");
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(
            text,
            format!(
                r#"{{"root":"person","clauses":[{{"connection":"crew_member_of","state":{{"root":"ship","clauses":[{{"connection":"ship_arrived_at","instance":"{MARSEILLE}"}}]}}}}],"group_by":"has_residence"}}"#
            )
        );
        let back: QueryState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<QueryState>(r#"{"root":"ship","bogus":1}"#).is_err());
    }
}
