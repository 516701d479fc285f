//! Indexed in-memory triple set.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{ResolveError, TermError};
use crate::term::{Iri, Literal, Term, Triple};
use crate::vocab;

type Spo = BTreeMap<Iri, BTreeMap<Iri, BTreeSet<Term>>>;
type Pos = BTreeMap<Iri, BTreeMap<Term, BTreeSet<Iri>>>;
type Osp = BTreeMap<Term, BTreeMap<Iri, BTreeSet<Iri>>>;

/// A set of triples kept in SPO, POS and OSP order, plus a prefix table.
///
/// Iteration follows the SPO index: subjects, then predicates, then objects,
/// each in lexicographic order (IRIs before literals in object position).
#[derive(Clone, Debug)]
pub struct Graph {
    spo: Spo,
    pos: Pos,
    osp: Osp,
    len: usize,
    prefixes: BTreeMap<String, Iri>,
}

impl Default for Graph {
    fn default() -> Self {
        Self::new()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.spo == other.spo && self.prefixes == other.prefixes
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new() -> Self {
        let prefixes = vocab::DEFAULT_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), Iri::new(ns).expect("valid namespace")))
            .collect();
        Graph {
            spo: BTreeMap::new(),
            pos: BTreeMap::new(),
            osp: BTreeMap::new(),
            len: 0,
            prefixes,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Inserts a triple. Returns `true` if it was not already present.
    pub fn insert(&mut self, t: Triple) -> bool {
        let Triple {
            subject,
            predicate,
            object,
        } = t;
        let added = self
            .spo
            .entry(subject.clone())
            .or_default()
            .entry(predicate.clone())
            .or_default()
            .insert(object.clone());
        if !added {
            return false;
        }
        self.pos
            .entry(predicate.clone())
            .or_default()
            .entry(object.clone())
            .or_default()
            .insert(subject.clone());
        self.osp
            .entry(object)
            .or_default()
            .entry(subject)
            .or_default()
            .insert(predicate);
        self.len += 1;
        true
    }

    /// Removes a triple from all three indexes, pruning emptied entries so
    /// that equality and index sizes stay exact. Returns `true` if it was
    /// present.
    pub fn remove(&mut self, t: &Triple) -> bool {
        fn take<A: Ord, B: Ord, C: Ord>(idx: &mut BTreeMap<A, BTreeMap<B, BTreeSet<C>>>, a: &A, b: &B, c: &C) -> bool {
            let Some(inner) = idx.get_mut(a) else { return false };
            let Some(leaf) = inner.get_mut(b) else { return false };
            if !leaf.remove(c) {
                return false;
            }
            if leaf.is_empty() {
                inner.remove(b);
                if inner.is_empty() {
                    idx.remove(a);
                }
            }
            true
        }
        if !take(&mut self.spo, &t.subject, &t.predicate, &t.object) {
            return false;
        }
        take(&mut self.pos, &t.predicate, &t.object, &t.subject);
        take(&mut self.osp, &t.object, &t.subject, &t.predicate);
        self.len -= 1;
        true
    }

    /// Inserts from loose terms, rejecting literals outside object position.
    pub fn insert_terms(&mut self, s: Term, p: Term, o: Term) -> Result<bool, TermError> {
        Ok(self.insert(Triple::from_terms(s, p, o)?))
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) -> usize {
        triples.into_iter().filter(|t| self.insert(t.clone())).count()
    }

    /// Adds every triple and prefix of `other`.
    pub fn merge(&mut self, other: &Graph) {
        for (p, ns) in &other.prefixes {
            self.prefixes.entry(p.clone()).or_insert_with(|| ns.clone());
        }
        self.extend(other.triples());
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.spo
            .get(&t.subject)
            .and_then(|m| m.get(&t.predicate))
            .is_some_and(|objs| objs.contains(&t.object))
    }

    /// All triples in SPO order.
    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().flat_map(|(s, preds)| {
            preds.iter().flat_map(move |(p, objs)| {
                objs.iter()
                    .map(move |o| Triple::new(s.clone(), p.clone(), o.clone()))
            })
        })
    }

    /// Triples matching every bound position. The index is picked from the
    /// bound positions; output follows that index's order.
    pub fn match_pattern(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> Vec<Triple> {
        let mut out = Vec::new();
        self.for_each_match(s, p, o, |t| out.push(t));
        out
    }

    pub fn for_each_match(
        &self,
        s: Option<&Iri>,
        p: Option<&Iri>,
        o: Option<&Term>,
        mut f: impl FnMut(Triple),
    ) {
        let mk = |s: &Iri, p: &Iri, o: &Term| Triple::new(s.clone(), p.clone(), o.clone());
        match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                let t = mk(s, p, o);
                if self.contains(&t) {
                    f(t);
                }
            }
            (Some(s), Some(p), None) => {
                if let Some(objs) = self.spo.get(s).and_then(|m| m.get(p)) {
                    objs.iter().for_each(|o| f(mk(s, p, o)));
                }
            }
            (Some(s), None, Some(o)) => {
                if let Some(preds) = self.osp.get(o).and_then(|m| m.get(s)) {
                    preds.iter().for_each(|p| f(mk(s, p, o)));
                }
            }
            (Some(s), None, None) => {
                if let Some(preds) = self.spo.get(s) {
                    for (p, objs) in preds {
                        objs.iter().for_each(|o| f(mk(s, p, o)));
                    }
                }
            }
            (None, Some(p), Some(o)) => {
                if let Some(subs) = self.pos.get(p).and_then(|m| m.get(o)) {
                    subs.iter().for_each(|s| f(mk(s, p, o)));
                }
            }
            (None, Some(p), None) => {
                if let Some(objs) = self.pos.get(p) {
                    for (o, subs) in objs {
                        subs.iter().for_each(|s| f(mk(s, p, o)));
                    }
                }
            }
            (None, None, Some(o)) => {
                if let Some(subs) = self.osp.get(o) {
                    for (s, preds) in subs {
                        preds.iter().for_each(|p| f(mk(s, p, o)));
                    }
                }
            }
            (None, None, None) => self.triples().for_each(f),
        }
    }

    /// Upper bound on the number of matches, cheap to compute. Used to order
    /// joins by selectivity.
    pub fn estimate(&self, s: Option<&Iri>, p: Option<&Iri>, o: Option<&Term>) -> usize {
        match (s, p, o) {
            (Some(_), Some(_), Some(_)) => 1,
            (Some(s), Some(p), None) => self.spo.get(s).and_then(|m| m.get(p)).map_or(0, |x| x.len()),
            (Some(s), None, Some(o)) => self.osp.get(o).and_then(|m| m.get(s)).map_or(0, |x| x.len()),
            (None, Some(p), Some(o)) => self.pos.get(p).and_then(|m| m.get(o)).map_or(0, |x| x.len()),
            (Some(s), None, None) => self.spo.get(s).map_or(0, |m| m.values().map(|x| x.len()).sum()),
            (None, Some(p), None) => self.pos.get(p).map_or(0, |m| m.values().map(|x| x.len()).sum()),
            (None, None, Some(o)) => self.osp.get(o).map_or(0, |m| m.values().map(|x| x.len()).sum()),
            (None, None, None) => self.len,
        }
    }

    pub fn objects(&self, s: &Iri, p: &Iri) -> impl Iterator<Item = &Term> + '_ {
        self.spo
            .get(s)
            .and_then(|m| m.get(p))
            .into_iter()
            .flat_map(|objs| objs.iter())
    }

    /// Subjects having `(?s, p, o)`.
    pub fn subjects(&self, p: &Iri, o: &Term) -> impl Iterator<Item = &Iri> + '_ {
        self.pos
            .get(p)
            .and_then(|m| m.get(o))
            .into_iter()
            .flat_map(|subs| subs.iter())
    }

    /// Asserted `rdf:type` objects of a node.
    pub fn types_of<'a>(&'a self, s: &Iri) -> impl Iterator<Item = &'a Iri> + 'a {
        let ty = vocab::rdf_type();
        self.spo
            .get(s)
            .and_then(move |m| m.get(&ty))
            .into_iter()
            .flat_map(|objs| objs.iter().filter_map(Term::as_iri))
    }

    /// First `rdfs:label` in index order.
    pub fn label(&self, s: &Iri) -> Option<&Literal> {
        self.objects(s, &vocab::rdfs_label()).find_map(Term::as_literal)
    }

    /// Entry counts of the SPO, POS and OSP indexes.
    pub fn index_sizes(&self) -> (usize, usize, usize) {
        let spo = self.spo.values().flat_map(|m| m.values()).map(|x| x.len()).sum();
        let pos = self.pos.values().flat_map(|m| m.values()).map(|x| x.len()).sum();
        let osp = self.osp.values().flat_map(|m| m.values()).map(|x| x.len()).sum();
        (spo, pos, osp)
    }

    pub fn prefixes(&self) -> &BTreeMap<String, Iri> {
        &self.prefixes
    }

    /// Registers or replaces a prefix binding.
    pub fn add_prefix(&mut self, prefix: impl Into<String>, namespace: Iri) {
        self.prefixes.insert(prefix.into(), namespace);
    }

    /// Expands `prefix:local` or `<absolute-iri>`.
    pub fn resolve(&self, curie: &str) -> Result<Iri, ResolveError> {
        resolve_with(&self.prefixes, curie)
    }
}

/// Expands a prefixed name or bracketed IRI against a prefix table.
/// Expansion is plain concatenation of namespace and local part.
pub fn resolve_with(prefixes: &BTreeMap<String, Iri>, curie: &str) -> Result<Iri, ResolveError> {
    let curie = curie.trim();
    if let Some(inner) = curie.strip_prefix('<').and_then(|c| c.strip_suffix('>')) {
        return Ok(Iri::new(inner)?);
    }
    let (prefix, local) = curie
        .split_once(':')
        .ok_or_else(|| ResolveError::NotACurie(curie.to_string()))?;
    let ns = prefixes
        .get(prefix)
        .ok_or_else(|| ResolveError::UnknownPrefix(prefix.to_string()))?;
    Ok(Iri::new(format!("{}{}", ns.as_str(), local))?)
}
