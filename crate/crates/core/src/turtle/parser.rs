use std::collections::BTreeMap;
use std::iter::Peekable;
use std::str::Chars;

use super::{ParseDiagnostic, Severity};
use crate::graph::Graph;
use crate::term::{is_language_tag, Iri, Literal, Term, Triple};
use crate::vocab;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    IriRef(String),
    PName(String, String),
    A,
    PrefixDirective,
    Str(String),
    LangTag(String),
    Carets,
    Dot,
    Semicolon,
    Comma,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    col: usize,
}

struct LexError {
    pos: Pos,
    message: String,
}

struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    pos: Pos,
    last: Pos,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%')
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            pos: Pos { line: 1, col: 1 },
            last: Pos { line: 1, col: 1 },
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if !c.is_whitespace() {
            self.last = self.pos;
        }
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    /// Position of the last non-blank character read, used for errors at end of input.
    fn end_pos(&self) -> Pos {
        self.last
    }

    fn err(&self, pos: Pos, message: impl Into<String>) -> LexError {
        LexError {
            pos,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Option<Result<(Pos, Tok), LexError>> {
        self.skip_trivia();
        let start = self.pos;
        let c = self.peek()?;
        let res = match c {
            '<' => {
                self.bump();
                self.lex_iri(start).map(Tok::IriRef)
            }
            '"' | '\'' => {
                self.bump();
                self.lex_string(start, c).map(Tok::Str)
            }
            '@' => {
                self.bump();
                let mut word = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '-' {
                        word.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "prefix" => Ok(Tok::PrefixDirective),
                    "base" => Err(self.err(start, "unsupported Turtle feature: @base")),
                    w if is_language_tag(w) => Ok(Tok::LangTag(w.to_string())),
                    _ => Err(self.err(start, format!("invalid directive or language tag @{word}"))),
                }
            }
            '^' => {
                self.bump();
                if self.peek() == Some('^') {
                    self.bump();
                    Ok(Tok::Carets)
                } else {
                    Err(self.err(start, "expected '^^'"))
                }
            }
            '.' => {
                self.bump();
                Ok(Tok::Dot)
            }
            ';' => {
                self.bump();
                Ok(Tok::Semicolon)
            }
            ',' => {
                self.bump();
                Ok(Tok::Comma)
            }
            '[' | ']' => {
                self.bump();
                Err(self.err(start, "unsupported Turtle feature: blank node property list"))
            }
            '(' | ')' => {
                self.bump();
                Err(self.err(start, "unsupported Turtle feature: collection"))
            }
            '_' => {
                self.bump();
                if self.peek() == Some(':') {
                    Err(self.err(start, "unsupported Turtle feature: blank node"))
                } else {
                    self.lex_word(start, "_".to_string())
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => {
                self.bump();
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '.') {
                    self.bump();
                }
                Err(self.err(start, "unsupported Turtle feature: numeric literal shorthand"))
            }
            c if c.is_alphabetic() || c == ':' => self.lex_word(start, String::new()),
            other => {
                self.bump();
                Err(self.err(start, format!("unexpected character {other:?}")))
            }
        };
        Some(res.map(|t| (start, t)))
    }

    fn lex_word(&mut self, start: Pos, mut word: String) -> Result<Tok, LexError> {
        // A trailing '.' terminates the statement rather than belonging to the
        // name, so it is left in the input.
        while let Some(c) = self.peek() {
            if !is_name_char(c) {
                break;
            }
            if c == '.' {
                let mut look = self.chars.clone();
                look.next();
                if look.next().is_some_and(|n| is_name_char(n) && n != '.') {
                    word.push(c);
                    self.bump();
                    continue;
                }
                break;
            }
            word.push(c);
            self.bump();
        }
        if word == "a" {
            return Ok(Tok::A);
        }
        if word == "true" || word == "false" {
            return Err(self.err(start, "unsupported Turtle feature: boolean literal shorthand"));
        }
        if word.eq_ignore_ascii_case("prefix") || word.eq_ignore_ascii_case("base") {
            return Err(self.err(start, format!("unsupported directive {word}; use @prefix")));
        }
        match word.split_once(':') {
            Some((prefix, local)) => {
                if !prefix.is_empty() && !prefix.starts_with(|c: char| c.is_alphabetic()) {
                    return Err(self.err(start, format!("invalid prefix in {word:?}")));
                }
                if let Some(bad) = check_percent(local) {
                    return Err(self.err(start, bad));
                }
                Ok(Tok::PName(prefix.to_string(), local.to_string()))
            }
            None => Err(self.err(start, format!("unexpected word {word:?}"))),
        }
    }

    fn lex_iri(&mut self, start: Pos) -> Result<String, LexError> {
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err(start, "unterminated IRI")),
                Some('>') => {
                    self.bump();
                    return Ok(out);
                }
                Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                    return Err(self.err(start, "unterminated IRI"));
                }
                Some('\\') => {
                    self.bump();
                    let c = self.lex_unicode_escape(start)?;
                    out.push(c);
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn lex_unicode_escape(&mut self, start: Pos) -> Result<char, LexError> {
        let n = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.err(start, "invalid escape sequence")),
        };
        let mut code = 0u32;
        for _ in 0..n {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.err(start, "invalid unicode escape"))?;
            code = code * 16 + d;
        }
        char::from_u32(code).ok_or_else(|| self.err(start, "escape is not a valid code point"))
    }

    fn lex_string(&mut self, start: Pos, quote: char) -> Result<String, LexError> {
        if self.peek() == Some(quote) {
            let mut look = self.chars.clone();
            look.next();
            if look.next() == Some(quote) {
                return Err(self.err(start, "unsupported Turtle feature: long string"));
            }
        }
        let mut out = String::new();
        loop {
            match self.peek() {
                None | Some('\n') | Some('\r') => {
                    return Err(self.err(start, "unterminated string"))
                }
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    let c = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            out.push(self.lex_unicode_escape(start)?);
                            continue;
                        }
                        _ => return Err(self.err(start, "invalid escape sequence")),
                    };
                    self.bump();
                    out.push(c);
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }
}

fn check_percent(local: &str) -> Option<String> {
    let b = local.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i] == b'%' {
            let ok = b.get(i + 1).is_some_and(u8::is_ascii_hexdigit)
                && b.get(i + 2).is_some_and(u8::is_ascii_hexdigit);
            if !ok {
                return Some(format!("invalid percent escape in local name {local:?}"));
            }
            i += 3;
        } else {
            i += 1;
        }
    }
    None
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Option<Result<(Pos, Tok), LexError>>>,
    prefixes: BTreeMap<String, Iri>,
    graph: Graph,
    diagnostics: Vec<ParseDiagnostic>,
}

/// Error that aborts the current statement.
struct Abort;

impl<'a> Parser<'a> {
    fn peek(&mut self) -> Option<&Result<(Pos, Tok), LexError>> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token());
        }
        self.peeked.as_ref().expect("filled").as_ref()
    }

    fn next(&mut self) -> Option<Result<(Pos, Tok), LexError>> {
        match self.peeked.take() {
            Some(t) => t,
            None => self.lexer.next_token(),
        }
    }

    fn error(&mut self, pos: Pos, message: impl Into<String>) -> Abort {
        self.diagnostics.push(ParseDiagnostic {
            line: pos.line,
            column: pos.col,
            message: message.into(),
            severity: Severity::Error,
        });
        Abort
    }

    fn warn(&mut self, pos: Pos, message: impl Into<String>) {
        self.diagnostics.push(ParseDiagnostic {
            line: pos.line,
            column: pos.col,
            message: message.into(),
            severity: Severity::Warning,
        });
    }

    fn expect_token(&mut self, what: &str) -> Result<(Pos, Tok), Abort> {
        match self.next() {
            Some(Ok(t)) => Ok(t),
            Some(Err(e)) => Err(self.error(e.pos, e.message)),
            None => {
                let pos = self.lexer.end_pos();
                Err(self.error(pos, format!("unexpected end of input, expected {what}")))
            }
        }
    }

    fn run(mut self) -> (Graph, Vec<ParseDiagnostic>) {
        while self.peek().is_some() {
            if self.statement().is_err() {
                self.recover();
            }
        }
        (self.graph, self.diagnostics)
    }

    /// Skips to just after the next '.' token.
    fn recover(&mut self) {
        while let Some(t) = self.next() {
            if let Ok((_, Tok::Dot)) = t {
                return;
            }
        }
    }

    fn statement(&mut self) -> Result<(), Abort> {
        let (pos, tok) = self.expect_token("statement")?;
        match tok {
            Tok::PrefixDirective => {
                let (ppos, ptok) = self.expect_token("prefix name")?;
                let Tok::PName(prefix, local) = ptok else {
                    return Err(self.error(ppos, "expected prefix name after @prefix"));
                };
                if !local.is_empty() {
                    return Err(self.error(ppos, "prefix name must end with ':'"));
                }
                let (ipos, itok) = self.expect_token("namespace IRI")?;
                let Tok::IriRef(ns) = itok else {
                    return Err(self.error(ipos, "expected <namespace IRI>"));
                };
                let ns = Iri::new(&ns).map_err(|e| self.error(ipos, e.to_string()))?;
                self.expect_dot()?;
                if let Some(old) = self.prefixes.get(&prefix) {
                    if *old != ns {
                        self.warn(ppos, format!("prefix {prefix}: redefined"));
                    }
                }
                self.prefixes.insert(prefix.clone(), ns.clone());
                self.graph.add_prefix(prefix, ns);
                Ok(())
            }
            tok => {
                let subject = self.iri_from(pos, tok, "subject")?;
                self.predicate_object_list(&subject)?;
                self.expect_dot()
            }
        }
    }

    fn expect_dot(&mut self) -> Result<(), Abort> {
        let (pos, tok) = self.expect_token("'.'")?;
        if tok == Tok::Dot {
            Ok(())
        } else {
            Err(self.error(pos, "expected '.'"))
        }
    }

    fn iri_from(&mut self, pos: Pos, tok: Tok, role: &str) -> Result<Iri, Abort> {
        match tok {
            Tok::IriRef(s) => Iri::new(&s).map_err(|e| self.error(pos, e.to_string())),
            Tok::PName(prefix, local) => {
                let Some(ns) = self.prefixes.get(&prefix) else {
                    return Err(self.error(pos, format!("unknown prefix {prefix:?}")));
                };
                let full = format!("{}{}", ns.as_str(), local);
                Iri::new(full).map_err(|e| self.error(pos, e.to_string()))
            }
            Tok::Str(_) => Err(self.error(pos, format!("literal not allowed as {role}"))),
            _ => Err(self.error(pos, format!("expected IRI as {role}"))),
        }
    }

    fn predicate_object_list(&mut self, subject: &Iri) -> Result<(), Abort> {
        loop {
            let (pos, tok) = self.expect_token("predicate")?;
            let predicate = match tok {
                Tok::A => vocab::rdf_type(),
                tok => self.iri_from(pos, tok, "predicate")?,
            };
            loop {
                let object = self.object()?;
                self.graph
                    .insert(Triple::new(subject.clone(), predicate.clone(), object));
                if let Some(Ok((_, Tok::Comma))) = self.peek() {
                    self.next();
                    continue;
                }
                break;
            }
            if let Some(Ok((_, Tok::Semicolon))) = self.peek() {
                // Repeated and trailing ';' are allowed.
                while let Some(Ok((_, Tok::Semicolon))) = self.peek() {
                    self.next();
                }
                if let Some(Ok((_, Tok::Dot))) = self.peek() {
                    return Ok(());
                }
                continue;
            }
            return Ok(());
        }
    }

    fn object(&mut self) -> Result<Term, Abort> {
        let (pos, tok) = self.expect_token("object")?;
        match tok {
            Tok::Str(s) => match self.peek() {
                Some(Ok((_, Tok::LangTag(_)))) => {
                    let Some(Ok((lpos, Tok::LangTag(tag)))) = self.next() else {
                        unreachable!("peeked a language tag")
                    };
                    Literal::lang(s, tag)
                        .map(Term::Literal)
                        .map_err(|e| self.error(lpos, e.to_string()))
                }
                Some(Ok((_, Tok::Carets))) => {
                    self.next();
                    let (dpos, dtok) = self.expect_token("datatype IRI")?;
                    let dt = self.iri_from(dpos, dtok, "datatype")?;
                    Ok(Term::Literal(Literal::typed(s, dt)))
                }
                Some(Err(_)) => {
                    let Some(Err(e)) = self.next() else {
                        unreachable!("peeked an error")
                    };
                    Err(self.error(e.pos, e.message))
                }
                _ => Ok(Term::Literal(Literal::plain(s))),
            },
            tok => Ok(Term::Iri(self.iri_from(pos, tok, "object")?)),
        }
    }
}

pub(super) fn parse(text: &str) -> (Graph, Vec<ParseDiagnostic>) {
    let graph = Graph::new();
    let prefixes = graph.prefixes().clone();
    Parser {
        lexer: Lexer::new(text),
        peeked: None,
        prefixes,
        graph,
        diagnostics: Vec::new(),
    }
    .run()
}
