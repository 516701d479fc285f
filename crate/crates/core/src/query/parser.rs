use std::collections::{BTreeMap, BTreeSet};

use super::{CountTarget, OrderKey, PatternTerm, Projection, Query, QueryError, TriplePattern};
use crate::term::{is_language_tag, Iri, Literal};
use crate::vocab;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Var(String),
    IriRef(String),
    PName(String, String),
    Word(String),
    Str(String),
    LangTag(String),
    Carets,
    Integer(String),
    Punct(char),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    pos: Pos,
    last: Pos,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')
}

impl Lexer {
    fn peek_at(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = *self.chars.get(self.i)?;
        self.i += 1;
        if !c.is_whitespace() {
            self.last = self.pos;
        }
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn err(pos: Pos, message: impl Into<String>) -> QueryError {
        QueryError::Syntax {
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<(Vec<(Pos, Tok)>, Pos), QueryError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek_at(0) {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while self.peek_at(0).is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                } else {
                    break;
                }
            }
            let start = self.pos;
            let Some(c) = self.peek_at(0) else {
                return Ok((out, self.last));
            };
            let tok = match c {
                '?' | '$' => {
                    self.bump();
                    let mut name = String::new();
                    while let Some(c) = self.peek_at(0).filter(|c| c.is_alphanumeric() || *c == '_') {
                        name.push(c);
                        self.bump();
                    }
                    if name.is_empty() {
                        return Err(Self::err(start, "empty variable name"));
                    }
                    Tok::Var(name)
                }
                '<' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.peek_at(0) {
                            Some('>') => {
                                self.bump();
                                break;
                            }
                            Some(c) if !c.is_whitespace() && c != '<' => {
                                s.push(c);
                                self.bump();
                            }
                            _ => return Err(Self::err(start, "unterminated IRI")),
                        }
                    }
                    Tok::IriRef(s)
                }
                '"' | '\'' => {
                    self.bump();
                    Tok::Str(self.string(start, c)?)
                }
                '@' => {
                    self.bump();
                    let mut s = String::new();
                    while let Some(c) = self.peek_at(0).filter(|c| c.is_ascii_alphanumeric() || *c == '-') {
                        s.push(c);
                        self.bump();
                    }
                    if !is_language_tag(&s) {
                        return Err(Self::err(start, format!("invalid language tag @{s}")));
                    }
                    Tok::LangTag(s)
                }
                '^' => {
                    self.bump();
                    if self.bump() != Some('^') {
                        return Err(Self::err(start, "expected '^^'"));
                    }
                    Tok::Carets
                }
                '{' | '}' | '(' | ')' | '.' | ';' | ',' | '*' => {
                    self.bump();
                    Tok::Punct(c)
                }
                c if c.is_ascii_digit() || ((c == '+' || c == '-') && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) => {
                    let mut s = String::new();
                    s.push(c);
                    self.bump();
                    while let Some(d) = self.peek_at(0).filter(char::is_ascii_digit) {
                        s.push(d);
                        self.bump();
                    }
                    if self.peek_at(0).is_some_and(|c| c.is_alphabetic() || c == '_') {
                        return Err(Self::err(start, "malformed number"));
                    }
                    Tok::Integer(s)
                }
                c if c.is_alphabetic() || c == ':' || c == '_' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek_at(0).filter(|c| is_word_char(*c)) {
                        // A '.' not followed by a name character ends a statement.
                        if c == '.' && !self.peek_at(1).is_some_and(|n| is_word_char(n) && n != '.') {
                            break;
                        }
                        s.push(c);
                        self.bump();
                    }
                    if s.starts_with("_:") {
                        return Err(Self::err(start, "blank nodes are not supported"));
                    }
                    match s.split_once(':') {
                        Some((p, l)) => Tok::PName(p.to_string(), l.to_string()),
                        None => Tok::Word(s),
                    }
                }
                other => return Err(Self::err(start, format!("unexpected character {other:?}"))),
            };
            out.push((start, tok));
        }
    }

    fn string(&mut self, start: Pos, quote: char) -> Result<String, QueryError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => return Err(Self::err(start, "unterminated string")),
                Some(c) if c == quote => return Ok(s),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some(u @ ('u' | 'U')) => {
                            let n = if u == 'u' { 4 } else { 8 };
                            let mut code = 0u32;
                            for _ in 0..n {
                                let d = self
                                    .bump()
                                    .and_then(|c| c.to_digit(16))
                                    .ok_or_else(|| Self::err(start, "invalid unicode escape"))?;
                                code = code * 16 + d;
                            }
                            char::from_u32(code).ok_or_else(|| Self::err(start, "invalid code point"))?
                        }
                        _ => return Err(Self::err(start, "invalid escape sequence")),
                    };
                    s.push(c);
                }
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser {
    toks: Vec<(Pos, Tok)>,
    i: usize,
    end: Pos,
    prefixes: BTreeMap<String, Iri>,
    /// Variables of the graph pattern.
    where_vars: BTreeSet<String>,
}

fn keyword(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn err(&self, message: impl Into<String>) -> QueryError {
        Lexer::err(self.pos(), message)
    }

    fn next(&mut self, what: &str) -> Result<(Pos, Tok), QueryError> {
        let t = self
            .toks
            .get(self.i)
            .cloned()
            .ok_or_else(|| Lexer::err(self.end, format!("unexpected end of query, expected {what}")))?;
        self.i += 1;
        Ok(t)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek().is_some_and(|t| keyword(t, kw)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), QueryError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.err(format!("expected {kw}")))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), QueryError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expect_var(&mut self) -> Result<(Pos, String), QueryError> {
        match self.next("variable")? {
            (p, Tok::Var(v)) => Ok((p, v)),
            (p, _) => Err(Lexer::err(p, "expected a variable")),
        }
    }

    fn iri(&self, pos: Pos, tok: Tok) -> Result<Iri, QueryError> {
        match tok {
            Tok::IriRef(s) => Iri::new(&s).map_err(|e| Lexer::err(pos, e.to_string())),
            Tok::PName(p, l) => {
                let ns = self.prefixes.get(&p).ok_or(QueryError::UnknownPrefix {
                    line: pos.line,
                    column: pos.column,
                    prefix: p.clone(),
                })?;
                Iri::new(format!("{}{}", ns.as_str(), l)).map_err(|e| Lexer::err(pos, e.to_string()))
            }
            _ => Err(Lexer::err(pos, "expected an IRI")),
        }
    }

    fn query(mut self) -> Result<Query, QueryError> {
        while self.eat_keyword("PREFIX") {
            let (pos, tok) = self.next("prefix name")?;
            let Tok::PName(p, l) = tok else {
                return Err(Lexer::err(pos, "expected a prefix name ending in ':'"));
            };
            if !l.is_empty() {
                return Err(Lexer::err(pos, "expected a prefix name ending in ':'"));
            }
            let (ipos, itok) = self.next("namespace IRI")?;
            if !matches!(itok, Tok::IriRef(_)) {
                return Err(Lexer::err(ipos, "expected <namespace IRI>"));
            }
            let ns = self.iri(ipos, itok)?;
            self.prefixes.insert(p, ns);
        }

        self.expect_keyword("SELECT")?;
        let distinct = self.eat_keyword("DISTINCT");
        let mut projection = Vec::new();
        let mut proj_pos = Vec::new();
        if !self.eat_punct('*') {
            loop {
                let pos = self.pos();
                match self.peek() {
                    Some(Tok::Var(_)) => {
                        let (_, v) = self.expect_var()?;
                        projection.push(Projection::Var(v));
                    }
                    Some(Tok::Punct('(')) => {
                        self.i += 1;
                        self.expect_keyword("COUNT")?;
                        self.expect_punct('(')?;
                        let distinct = self.eat_keyword("DISTINCT");
                        let target = if self.eat_punct('*') {
                            CountTarget::All
                        } else {
                            CountTarget::Var(self.expect_var()?.1)
                        };
                        self.expect_punct(')')?;
                        self.expect_keyword("AS")?;
                        let (_, alias) = self.expect_var()?;
                        self.expect_punct(')')?;
                        projection.push(Projection::Count {
                            target,
                            distinct,
                            alias,
                        });
                    }
                    _ => break,
                }
                proj_pos.push(pos);
            }
            if projection.is_empty() {
                return Err(self.err("expected variables, '*' or (COUNT(...) AS ?alias) after SELECT"));
            }
        }
        // WHERE is optional in SPARQL.
        self.eat_keyword("WHERE");
        self.expect_punct('{')?;
        let patterns = self.group_graph_pattern()?;
        for p in &patterns {
            for v in p.vars() {
                self.where_vars.insert(v.to_string());
            }
        }

        let mut group_by = Vec::new();
        if self.eat_keyword("GROUP") {
            self.expect_keyword("BY")?;
            while let Some(Tok::Var(_)) = self.peek() {
                let (pos, v) = self.expect_var()?;
                if !self.where_vars.contains(&v) {
                    return Err(Lexer::err(pos, format!("GROUP BY variable ?{v} does not occur in WHERE")));
                }
                group_by.push(v);
            }
            if group_by.is_empty() {
                return Err(self.err("expected a variable after GROUP BY"));
            }
        }

        let aliases: BTreeSet<String> = projection
            .iter()
            .filter_map(|p| match p {
                Projection::Count { alias, .. } => Some(alias.clone()),
                _ => None,
            })
            .collect();
        let mut order_by = Vec::new();
        if self.eat_keyword("ORDER") {
            self.expect_keyword("BY")?;
            loop {
                let descending = if self.eat_keyword("DESC") {
                    true
                } else if self.eat_keyword("ASC") {
                    false
                } else if let Some(Tok::Var(_)) = self.peek() {
                    let (pos, var) = self.expect_var()?;
                    if !self.where_vars.contains(&var) && !aliases.contains(var.as_str()) {
                        return Err(Lexer::err(pos, format!("ORDER BY variable ?{var} does not occur in WHERE")));
                    }
                    order_by.push(OrderKey { var, descending: false });
                    continue;
                } else {
                    break;
                };
                self.expect_punct('(')?;
                let (pos, var) = self.expect_var()?;
                if !self.where_vars.contains(&var) && !aliases.contains(var.as_str()) {
                    return Err(Lexer::err(pos, format!("ORDER BY variable ?{var} does not occur in WHERE")));
                }
                self.expect_punct(')')?;
                order_by.push(OrderKey { var, descending });
            }
            if order_by.is_empty() {
                return Err(self.err("expected a sort key after ORDER BY"));
            }
        }

        let mut limit = None;
        if self.eat_keyword("LIMIT") {
            match self.next("integer")? {
                (_, Tok::Integer(n)) if !n.starts_with(['-', '+']) => {
                    limit = Some(n.parse().map_err(|_| self.err("LIMIT is too large"))?);
                }
                (p, _) => return Err(Lexer::err(p, "LIMIT expects a non-negative integer")),
            }
        }
        if self.i < self.toks.len() {
            return Err(self.err("unexpected trailing input"));
        }

        let q = Query {
            prefixes: self.prefixes,
            distinct,
            projection,
            patterns,
            group_by,
            order_by,
            limit,
        };
        // With aggregation every plain projected variable must be grouped.
        if q.is_aggregate() {
            for (p, pos) in q.projection.iter().zip(&proj_pos) {
                if let Projection::Var(v) = p {
                    if !q.group_by.contains(v) {
                        return Err(Lexer::err(*pos, format!("?{v} must appear in GROUP BY")));
                    }
                }
            }
            if q.projection.is_empty() {
                return Err(Lexer::err(self.end, "SELECT * cannot be combined with GROUP BY"));
            }
            for k in &q.order_by {
                if !q.group_by.contains(&k.var) && !aliases.contains(k.var.as_str()) {
                    return Err(Lexer::err(
                        self.end,
                        format!("ORDER BY ?{} must be a GROUP BY variable or an aggregate alias", k.var),
                    ));
                }
            }
        }
        let mut names = BTreeSet::new();
        for (p, pos) in q.projection.iter().zip(&proj_pos) {
            if !names.insert(p.name()) {
                return Err(Lexer::err(*pos, format!("?{} is projected twice", p.name())));
            }
            if matches!(p, Projection::Count { .. }) && self.where_vars.contains(p.name()) {
                return Err(Lexer::err(*pos, format!("alias ?{} is already a pattern variable", p.name())));
            }
        }
        Ok(q)
    }

    fn group_graph_pattern(&mut self) -> Result<Vec<TriplePattern>, QueryError> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct('}') {
                return Ok(out);
            }
            let subject = self.term("subject")?;
            if let PatternTerm::Literal(_) = subject.1 {
                return Err(Lexer::err(subject.0, "a literal cannot be a subject"));
            }
            loop {
                let (ppos, predicate) = match self.peek() {
                    Some(Tok::Word(w)) if w == "a" => {
                        let p = self.pos();
                        self.i += 1;
                        (p, PatternTerm::Iri(vocab::rdf_type()))
                    }
                    _ => self.term("predicate")?,
                };
                if let PatternTerm::Literal(_) = predicate {
                    return Err(Lexer::err(ppos, "a literal cannot be a predicate"));
                }
                loop {
                    let (_, object) = self.term("object")?;
                    out.push(TriplePattern {
                        subject: subject.1.clone(),
                        predicate: predicate.clone(),
                        object,
                    });
                    if !self.eat_punct(',') {
                        break;
                    }
                }
                if !self.eat_punct(';') {
                    break;
                }
                while self.eat_punct(';') {}
                if matches!(self.peek(), Some(Tok::Punct('.' | '}'))) {
                    break;
                }
            }
            if self.eat_punct('.') {
                continue;
            }
            if self.eat_punct('}') {
                return Ok(out);
            }
            return Err(self.err("expected '.', ';', ',' or '}'"));
        }
    }

    fn term(&mut self, what: &str) -> Result<(Pos, PatternTerm), QueryError> {
        let (pos, tok) = self.next(what)?;
        let t = match tok {
            Tok::Var(v) => PatternTerm::Var(v),
            Tok::Str(s) => {
                let lit = match self.peek() {
                    Some(Tok::LangTag(_)) => {
                        let (lp, Tok::LangTag(tag)) = self.next("language tag")? else {
                            unreachable!()
                        };
                        Literal::lang(s, tag).map_err(|e| Lexer::err(lp, e.to_string()))?
                    }
                    Some(Tok::Carets) => {
                        self.i += 1;
                        let (dp, dt) = self.next("datatype")?;
                        Literal::typed(s, self.iri(dp, dt)?)
                    }
                    _ => Literal::plain(s),
                };
                PatternTerm::Literal(lit)
            }
            Tok::Integer(n) => PatternTerm::Literal(Literal::typed(n, vocab::xsd("integer"))),
            tok @ (Tok::IriRef(_) | Tok::PName(..)) => PatternTerm::Iri(self.iri(pos, tok)?),
            _ => return Err(Lexer::err(pos, format!("expected {what}"))),
        };
        Ok((pos, t))
    }
}

/// Parses a query. Prefixed names must use prefixes declared in the query.
pub fn parse_query(text: &str) -> Result<Query, QueryError> {
    let start = Pos { line: 1, column: 1 };
    let lexer = Lexer {
        chars: text.chars().collect(),
        i: 0,
        pos: start,
        last: start,
    };
    let (toks, end) = lexer.tokens()?;
    Parser {
        toks,
        i: 0,
        end,
        prefixes: BTreeMap::new(),
        where_vars: BTreeSet::new(),
    }
    .query()
}
