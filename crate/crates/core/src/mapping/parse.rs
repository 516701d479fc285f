use std::collections::{BTreeMap, BTreeSet};

use super::{AttrRule, ConstRule, EntityRule, LinkRule, LinkTarget, MappingError, MappingSpec, MissingPolicy};
use crate::graph::resolve_with;
use crate::ontology::{OntologySchema, Range};
use crate::term::Iri;
use crate::vocab;

fn syntax(line: usize, message: impl Into<String>) -> MappingError {
    MappingError::Syntax {
        line,
        message: message.into(),
    }
}

/// A `#` starts a comment at the beginning of a line or after whitespace,
/// so namespace IRIs ending in `#` survive.
fn strip_comment(line: &str) -> &str {
    let mut prev_blank = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_blank {
            return &line[..i];
        }
        prev_blank = c.is_whitespace();
    }
    line
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
        && !s.starts_with('-')
}

/// `table.column` or, with `multi`, `table.col+col+...`.
fn table_columns(line: usize, s: &str, multi: bool) -> Result<(String, Vec<String>), MappingError> {
    let (table, cols) = s
        .split_once('.')
        .ok_or_else(|| syntax(line, format!("expected <table>.<column>, found {s:?}")))?;
    let cols: Vec<String> = cols.split('+').map(str::to_string).collect();
    if !is_name(table) || cols.iter().any(|c| c.is_empty()) || (!multi && cols.len() > 1) {
        return Err(syntax(line, format!("malformed column reference {s:?}")));
    }
    Ok((table.to_string(), cols))
}

/// `-<curie>->`
fn arrow(line: usize, s: &str) -> Result<&str, MappingError> {
    s.strip_prefix('-')
        .and_then(|s| s.strip_suffix("->"))
        .filter(|s| !s.is_empty())
        .ok_or_else(|| syntax(line, format!("expected -<property>->, found {s:?}")))
}

struct Ctx<'a> {
    schema: &'a OntologySchema,
    prefixes: BTreeMap<String, Iri>,
}

impl Ctx<'_> {
    fn iri(&self, line: usize, curie: &str) -> Result<Iri, MappingError> {
        resolve_with(&self.prefixes, curie).map_err(|e| syntax(line, format!("{curie}: {e}")))
    }

    fn class(&self, line: usize, curie: &str) -> Result<Iri, MappingError> {
        let c = self.iri(line, curie)?;
        if self.schema.class(&c).is_none() {
            return Err(MappingError::UnknownClass { line, class: c });
        }
        Ok(c)
    }
}

/// Parses a mapping file and checks it against the schema: every property
/// and class must exist, entity classes must fall under the domain and range
/// of the properties linking them, and literal-valued properties must take
/// literal columns (and vice versa).
pub fn parse_mapping(text: &str, schema: &OntologySchema) -> Result<MappingSpec, MappingError> {
    let mut cx = Ctx {
        schema,
        prefixes: vocab::DEFAULT_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), Iri::new(ns).expect("valid namespace")))
            .collect(),
    };
    cx.prefixes.insert("kb".into(), Iri::new(vocab::KB).expect("valid namespace"));

    let mut template = None;
    let mut entities: Vec<EntityRule> = Vec::new();
    let mut links: Vec<LinkRule> = Vec::new();
    let mut attrs: Vec<AttrRule> = Vec::new();
    let mut consts: Vec<ConstRule> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw);
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "template" => {
                let [_, id] = toks[..] else {
                    return Err(syntax(line, "expected: template <id>"));
                };
                if template.is_some() {
                    return Err(syntax(line, "template declared twice"));
                }
                if !is_name(id) {
                    return Err(syntax(line, format!("invalid template id {id:?}")));
                }
                template = Some(id.to_string());
            }
            "prefix" => {
                let [_, p, ns] = toks[..] else {
                    return Err(syntax(line, "expected: prefix <name> <namespace-iri>"));
                };
                let ns = ns
                    .strip_prefix('<')
                    .and_then(|n| n.strip_suffix('>'))
                    .ok_or_else(|| syntax(line, "namespace must be written <iri>"))?;
                let ns = Iri::new(ns).map_err(|e| syntax(line, e.to_string()))?;
                cx.prefixes.insert(p.trim_end_matches(':').to_string(), ns);
            }
            "entity" => {
                let [_, name, "from", cols, "as", class, "category", cat] = toks[..] else {
                    return Err(syntax(
                        line,
                        "expected: entity <name> from <table>.<column>[+<column>] as <class> category <category>",
                    ));
                };
                if !is_name(name) || !is_name(cat) {
                    return Err(syntax(line, "entity and category names use letters, digits, '_' and '-'"));
                }
                if entities.iter().any(|e| e.name == name) {
                    return Err(syntax(line, format!("entity {name:?} declared twice")));
                }
                let (table, columns) = table_columns(line, cols, true)?;
                entities.push(EntityRule {
                    name: name.to_string(),
                    table,
                    columns,
                    class: cx.class(line, class)?,
                    category: cat.to_string(),
                    line,
                });
            }
            "link" => links.push(parse_link(&cx, line, &toks, &entities, &links)?),
            "attr" => {
                let (rest, category) = match toks[..] {
                    [_, _, _, _, "category", cat] => (&toks[..4], cat.to_string()),
                    [_, _, _, _] => (&toks[..4], "type".to_string()),
                    _ => {
                        return Err(syntax(
                            line,
                            "expected: attr <link> -<attribute>-> <table>.<column> [category <category>]",
                        ))
                    }
                };
                let link_name = rest[1];
                let link = links
                    .iter()
                    .find(|l| l.name == link_name)
                    .ok_or_else(|| syntax(line, format!("unknown link {link_name:?}")))?;
                let attribute = cx.iri(line, arrow(line, rest[2])?)?;
                let owns = schema
                    .property_class_for(&link.property)
                    .is_some_and(|pc| pc.attributes.iter().any(|a| a.id == attribute));
                if !owns {
                    return Err(MappingError::Incompatible {
                        line,
                        message: format!(
                            "{} is not a property-of-property of {}",
                            attribute.local_name(),
                            link.property.local_name()
                        ),
                    });
                }
                let (table, mut cols) = table_columns(line, rest[3], false)?;
                let tables = link_tables(link, &entities);
                if !tables.contains(&table) {
                    return Err(syntax(
                        line,
                        format!("attribute column must come from a table of link {link_name:?}"),
                    ));
                }
                attrs.push(AttrRule {
                    link: link_name.to_string(),
                    attribute,
                    table,
                    column: cols.remove(0),
                    category,
                    line,
                });
            }
            "const" => {
                let [_, ent, arr, value] = toks[..] else {
                    return Err(syntax(line, "expected: const <entity> -<property>-> <iri>"));
                };
                let source = entities
                    .iter()
                    .find(|e| e.name == ent)
                    .ok_or_else(|| syntax(line, format!("unknown entity {ent:?}")))?;
                let property = cx.iri(line, arrow(line, arr)?)?;
                let def = schema
                    .property(&property)
                    .ok_or_else(|| MappingError::UnknownProperty {
                        line,
                        property: property.clone(),
                    })?;
                check_domain(schema, line, &source.class, &def.domain, &property)?;
                if def.range.is_literal() {
                    return Err(MappingError::Incompatible {
                        line,
                        message: format!("{} takes a literal, not an IRI", property.local_name()),
                    });
                }
                consts.push(ConstRule {
                    entity: ent.to_string(),
                    property,
                    value: cx.iri(line, value)?,
                    line,
                });
            }
            other => return Err(syntax(line, format!("unknown directive {other:?}"))),
        }
    }
    let template_id = template.ok_or_else(|| syntax(1, "missing `template <id>` line"))?;
    Ok(MappingSpec {
        template_id,
        prefixes: cx.prefixes,
        entities,
        links,
        attrs,
        consts,
    })
}

pub(super) fn link_tables(link: &LinkRule, entities: &[EntityRule]) -> BTreeSet<String> {
    let table_of = |name: &str| {
        entities
            .iter()
            .find(|e| e.name == name)
            .map(|e| e.table.clone())
            .expect("checked at parse time")
    };
    let mut out = BTreeSet::new();
    out.insert(table_of(&link.source));
    match &link.target {
        LinkTarget::Entity(t) => out.insert(table_of(t)),
        LinkTarget::Literal { table, .. } => out.insert(table.clone()),
    };
    out
}

fn check_domain(
    schema: &OntologySchema,
    line: usize,
    class: &Iri,
    domain: &Iri,
    property: &Iri,
) -> Result<(), MappingError> {
    if schema.is_subclass_of(class, domain) {
        Ok(())
    } else {
        Err(MappingError::Incompatible {
            line,
            message: format!(
                "{} is not in the domain {} of {}",
                class.local_name(),
                domain.local_name(),
                property.local_name()
            ),
        })
    }
}

fn parse_link(
    cx: &Ctx,
    line: usize,
    toks: &[&str],
    entities: &[EntityRule],
    links: &[LinkRule],
) -> Result<LinkRule, MappingError> {
    const USAGE: &str = "expected: link <entity> -<property>-> <entity> | literal <table>.<column> [^^<datatype>] [missing: skip|unknown] [as <name>]";
    if toks.len() < 4 {
        return Err(syntax(line, USAGE));
    }
    let source_name = toks[1];
    let source = entities
        .iter()
        .find(|e| e.name == source_name)
        .ok_or_else(|| syntax(line, format!("unknown entity {source_name:?}")))?;
    let property = cx.iri(line, arrow(line, toks[2])?)?;
    let def = cx
        .schema
        .property(&property)
        .ok_or_else(|| MappingError::UnknownProperty {
            line,
            property: property.clone(),
        })?;
    check_domain(cx.schema, line, &source.class, &def.domain, &property)?;

    let mut rest = &toks[3..];
    let target = if rest[0] == "literal" {
        let col = rest.get(1).ok_or_else(|| syntax(line, USAGE))?;
        let (table, mut cols) = table_columns(line, col, false)?;
        rest = &rest[2..];
        let datatype = match rest.first().and_then(|t| t.strip_prefix("^^")) {
            Some(dt) => {
                rest = &rest[1..];
                Some(cx.iri(line, dt)?)
            }
            None => None,
        };
        if !def.range.is_literal() {
            return Err(MappingError::Incompatible {
                line,
                message: format!(
                    "{} ranges over class {}, not a literal",
                    property.local_name(),
                    def.range.class().local_name()
                ),
            });
        }
        LinkTarget::Literal {
            table,
            column: cols.remove(0),
            datatype,
        }
    } else {
        let tname = rest[0];
        let target = entities
            .iter()
            .find(|e| e.name == tname)
            .ok_or_else(|| syntax(line, format!("unknown entity {tname:?}")))?;
        rest = &rest[1..];
        match &def.range {
            Range::Literal(_) => {
                return Err(MappingError::Incompatible {
                    line,
                    message: format!("{} takes a literal, not an entity", property.local_name()),
                })
            }
            Range::Class(r) => {
                if !cx.schema.is_subclass_of(&target.class, r) {
                    return Err(MappingError::Incompatible {
                        line,
                        message: format!(
                            "{} is not in the range {} of {}",
                            target.class.local_name(),
                            r.local_name(),
                            property.local_name()
                        ),
                    });
                }
            }
        }
        LinkTarget::Entity(tname.to_string())
    };

    let mut missing = MissingPolicy::Skip;
    let mut name = format!("{source_name}.{}", property.local_name());
    while let Some(&tok) = rest.first() {
        match tok {
            "missing:" | "missing" => {
                missing = match rest.get(1) {
                    Some(&"skip") => MissingPolicy::Skip,
                    Some(&"unknown") => MissingPolicy::Unknown,
                    _ => return Err(syntax(line, "missing: expects skip or unknown")),
                };
                rest = &rest[2..];
            }
            "missing:skip" => {
                missing = MissingPolicy::Skip;
                rest = &rest[1..];
            }
            "missing:unknown" => {
                missing = MissingPolicy::Unknown;
                rest = &rest[1..];
            }
            "as" => {
                let n = rest.get(1).filter(|n| is_name(n)).ok_or_else(|| syntax(line, "as expects a link name"))?;
                name = n.to_string();
                rest = &rest[2..];
            }
            other => return Err(syntax(line, format!("unexpected {other:?}; {USAGE}"))),
        }
    }
    if missing == MissingPolicy::Unknown && matches!(target, LinkTarget::Literal { .. }) {
        return Err(syntax(line, "missing: unknown applies to entity targets only"));
    }
    if links.iter().any(|l| l.name == name) {
        return Err(syntax(line, format!("link name {name:?} used twice; add `as <name>`")));
    }
    Ok(LinkRule {
        name,
        source: source_name.to_string(),
        property,
        target,
        missing,
        line,
    })
}
