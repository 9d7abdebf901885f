//! Reader and writer for the Turtle subset used by ontology documents:
//! `@prefix` declarations and one statement per concept carrying
//! `rdf:type`, `rdfs:comment`, `rdfs:domain`, `rdfs:range` and `rdfs:seeAlso`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{
    validate_ontology, DataPropertyDef, ObjectPropertyDef, Ontology, OntologyClass,
    OntologyError, Range,
};

pub(crate) const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub(crate) const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub(crate) const OWL: &str = "http://www.w3.org/2002/07/owl#";
pub(crate) const XSD: &str = "http://www.w3.org/2001/XMLSchema#";

const STANDARD_PREFIXES: [(&str, &str); 4] =
    [("rdf", RDF), ("rdfs", RDFS), ("owl", OWL), ("xsd", XSD)];

/// Non-fatal observation made while parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    PrefixKw,
    PName(String, String),
    Iri(String),
    Str(String),
    A,
    Semi,
    Dot,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> OntologyError {
    OntologyError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn unsupported(line: usize, column: usize, construct: impl Into<String>) -> OntologyError {
    OntologyError::Unsupported {
        line,
        column,
        construct: construct.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Lexer {
    fn new(text: &str) -> Self {
        Lexer {
            chars: text.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<Token>, OntologyError> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == '#' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                return Ok(out);
            };
            let tok = match c {
                ';' => {
                    self.bump();
                    Tok::Semi
                }
                '.' => {
                    self.bump();
                    Tok::Dot
                }
                '<' => {
                    self.bump();
                    let mut iri = String::new();
                    loop {
                        match self.bump() {
                            Some('>') => break,
                            Some(c) if c.is_whitespace() || c == '<' || c == '"' => {
                                return Err(syntax(line, column, "malformed IRI"))
                            }
                            Some(c) => iri.push(c),
                            None => return Err(syntax(line, column, "unterminated IRI")),
                        }
                    }
                    Tok::Iri(iri)
                }
                '"' | '\'' => {
                    self.bump();
                    let s = self.string(c, line, column)?;
                    if matches!(self.peek(), Some('@') | Some('^')) {
                        return Err(unsupported(
                            self.line,
                            self.column,
                            "language-tagged or typed literal",
                        ));
                    }
                    Tok::Str(s)
                }
                '@' => {
                    self.bump();
                    let word = self.word();
                    if word == "prefix" {
                        Tok::PrefixKw
                    } else {
                        return Err(unsupported(line, column, format!("@{word}")));
                    }
                }
                '[' => return Err(unsupported(line, column, "blank node")),
                '(' => return Err(unsupported(line, column, "collection")),
                ',' => return Err(unsupported(line, column, "object list")),
                c if c.is_ascii_alphabetic() || c == ':' || c == '_' => {
                    let prefix = self.word();
                    if self.peek() == Some(':') {
                        self.bump();
                        let local = self.word();
                        if prefix == "_" {
                            return Err(unsupported(line, column, "blank node"));
                        }
                        Tok::PName(prefix, local)
                    } else if prefix == "a" {
                        Tok::A
                    } else {
                        return Err(syntax(line, column, format!("unexpected word `{prefix}`")));
                    }
                }
                other => {
                    return Err(syntax(line, column, format!("unexpected character `{other}`")))
                }
            };
            out.push(Token { tok, line, column });
        }
    }

    /// Reads a name; an interior `.` is part of it, a trailing one is not.
    fn word(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                s.push(c);
                self.bump();
            } else if c == '.' && self.peek_at(1).is_some_and(is_name_char) && !s.is_empty() {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn string(&mut self, quote: char, line: usize, column: usize) -> Result<String, OntologyError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('n') => s.push('\n'),
                    Some('r') => s.push('\r'),
                    Some('t') => s.push('\t'),
                    Some('"') => s.push('"'),
                    Some('\'') => s.push('\''),
                    Some('\\') => s.push('\\'),
                    _ => return Err(syntax(self.line, self.column, "invalid string escape")),
                },
                Some('\n') => return Err(syntax(line, column, "newline in string literal")),
                Some(c) => s.push(c),
                None => return Err(syntax(line, column, "unterminated string literal")),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Class,
    Datatype,
    Object,
}

#[derive(Default)]
struct Statement {
    kind: Option<Kind>,
    comment: Option<String>,
    domain: Option<String>,
    range: Option<String>,
    see_also: Option<String>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    prefixes: HashMap<String, String>,
    ontology_prefix: Option<(String, String)>,
    warnings: Vec<ParseWarning>,
    classes: Vec<OntologyClass>,
    data_properties: Vec<DataPropertyDef>,
    object_properties: Vec<ObjectPropertyDef>,
}

impl Parser {
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eof_error(&self) -> OntologyError {
        let (line, column) = self
            .tokens
            .last()
            .map(|t| (t.line, t.column))
            .unwrap_or((1, 1));
        syntax(line, column, "unexpected end of input")
    }

    fn expect_next(&mut self) -> Result<Token, OntologyError> {
        self.next().ok_or_else(|| self.eof_error())
    }

    fn resolve(&self, t: &Token) -> Result<String, OntologyError> {
        match &t.tok {
            Tok::Iri(iri) => Ok(iri.clone()),
            Tok::PName(prefix, local) => match self.prefixes.get(prefix) {
                Some(ns) => Ok(format!("{ns}{local}")),
                None => Err(syntax(t.line, t.column, format!("undeclared prefix `{prefix}:`"))),
            },
            Tok::A => Ok(format!("{RDF}type")),
            other => Err(syntax(t.line, t.column, format!("expected IRI, found {other:?}"))),
        }
    }

    fn local_name(&self, iri: &str, t: &Token) -> Result<String, OntologyError> {
        let Some((_, base)) = &self.ontology_prefix else {
            return Err(unsupported(t.line, t.column, "term outside any ontology namespace"));
        };
        match iri.strip_prefix(base.as_str()) {
            Some(local) if !local.is_empty() => Ok(local.to_string()),
            _ => Err(unsupported(
                t.line,
                t.column,
                format!("term <{iri}> outside the ontology namespace"),
            )),
        }
    }

    fn parse(mut self) -> Result<(Ontology, Vec<ParseWarning>), OntologyError> {
        while let Some(t) = self.next() {
            match t.tok {
                Tok::PrefixKw => self.prefix_decl()?,
                Tok::PName(..) | Tok::Iri(_) => self.statement(t)?,
                ref other => {
                    return Err(syntax(t.line, t.column, format!("unexpected token {other:?}")))
                }
            }
        }
        let (prefix, base) = self
            .ontology_prefix
            .ok_or_else(|| syntax(1, 1, "no ontology namespace prefix declared"))?;
        let o = Ontology::with_prefix(
            prefix,
            base,
            self.classes,
            self.data_properties,
            self.object_properties,
        );
        Ok((o, self.warnings))
    }

    fn prefix_decl(&mut self) -> Result<(), OntologyError> {
        let t = self.expect_next()?;
        let Tok::PName(prefix, local) = &t.tok else {
            return Err(syntax(t.line, t.column, "expected prefix name"));
        };
        if !local.is_empty() {
            return Err(syntax(t.line, t.column, "prefix name must end with `:`"));
        }
        let iri_tok = self.expect_next()?;
        let Tok::Iri(iri) = &iri_tok.tok else {
            return Err(syntax(iri_tok.line, iri_tok.column, "expected namespace IRI"));
        };
        let dot = self.expect_next()?;
        if dot.tok != Tok::Dot {
            return Err(syntax(dot.line, dot.column, "expected `.` after prefix declaration"));
        }
        let standard = STANDARD_PREFIXES.iter().any(|(_, ns)| ns == iri);
        if !standard && self.ontology_prefix.is_none() {
            self.ontology_prefix = Some((prefix.clone(), iri.clone()));
        }
        self.prefixes.insert(prefix.clone(), iri.clone());
        Ok(())
    }

    fn statement(&mut self, subject: Token) -> Result<(), OntologyError> {
        let subject_iri = self.resolve(&subject)?;
        let name = self.local_name(&subject_iri, &subject)?;
        let mut st = Statement::default();
        loop {
            let pred = self.expect_next()?;
            let pred_iri = self.resolve(&pred)?;
            let obj = self.expect_next()?;
            match pred_iri.strip_prefix(RDF).or_else(|| pred_iri.strip_prefix(RDFS)) {
                Some("type") if pred_iri.starts_with(RDF) => {
                    let kind = match self.resolve(&obj)?.strip_prefix(OWL) {
                        Some("Class") => Kind::Class,
                        Some("DatatypeProperty") => Kind::Datatype,
                        Some("ObjectProperty") => Kind::Object,
                        _ => return Err(unsupported(obj.line, obj.column, "rdf:type other than owl:Class, owl:DatatypeProperty or owl:ObjectProperty")),
                    };
                    if st.kind.replace(kind).is_some() {
                        return Err(syntax(pred.line, pred.column, format!("`{name}` has more than one rdf:type")));
                    }
                }
                Some("comment") => {
                    let Tok::Str(s) = obj.tok else {
                        return Err(syntax(obj.line, obj.column, "rdfs:comment expects a string literal"));
                    };
                    if st.comment.is_some() {
                        return Err(syntax(pred.line, pred.column, format!("`{name}` has more than one rdfs:comment")));
                    }
                    st.comment = Some(s);
                }
                Some("domain") => {
                    let iri = self.resolve(&obj)?;
                    if st.domain.replace(iri).is_some() {
                        return Err(syntax(pred.line, pred.column, format!("`{name}` has more than one rdfs:domain")));
                    }
                }
                Some("range") => {
                    let iri = self.resolve(&obj)?;
                    if st.range.replace(iri).is_some() {
                        return Err(syntax(pred.line, pred.column, format!("`{name}` has more than one rdfs:range")));
                    }
                }
                Some("seeAlso") => {
                    let iri = self.resolve(&obj)?;
                    if st.see_also.is_some() {
                        self.warnings.push(ParseWarning {
                            line: pred.line,
                            message: format!("`{name}` has more than one rdfs:seeAlso; keeping the first"),
                        });
                    } else {
                        st.see_also = Some(iri);
                    }
                }
                _ => return Err(unsupported(pred.line, pred.column, format!("predicate <{pred_iri}>"))),
            }
            let sep = self.expect_next()?;
            match sep.tok {
                Tok::Semi => {
                    // Turtle allows a dangling `;` before the terminator.
                    if self.tokens.get(self.pos).is_some_and(|t| t.tok == Tok::Dot) {
                        self.pos += 1;
                        break;
                    }
                }
                Tok::Dot => break,
                _ => return Err(syntax(sep.line, sep.column, "expected `;` or `.`")),
            }
        }
        self.finish(subject, name, st)
    }

    fn finish(&mut self, subject: Token, name: String, st: Statement) -> Result<(), OntologyError> {
        let (line, column) = (subject.line, subject.column);
        let kind = st
            .kind
            .ok_or_else(|| syntax(line, column, format!("`{name}` lacks rdf:type")))?;
        match kind {
            Kind::Class => {
                if st.domain.is_some() || st.range.is_some() {
                    return Err(syntax(line, column, format!("class `{name}` cannot carry rdfs:domain or rdfs:range")));
                }
                self.classes.push(OntologyClass {
                    name,
                    comment: st.comment,
                    see_also: st.see_also,
                });
            }
            Kind::Datatype | Kind::Object => {
                let domain_iri = st
                    .domain
                    .ok_or_else(|| syntax(line, column, format!("property `{name}` lacks rdfs:domain")))?;
                let range_iri = st
                    .range
                    .ok_or_else(|| syntax(line, column, format!("property `{name}` lacks rdfs:range")))?;
                let domain = self.local_name(&domain_iri, &subject)?;
                if kind == Kind::Datatype {
                    let range = range_iri
                        .strip_prefix(XSD)
                        .and_then(Range::from_xsd_local)
                        .ok_or_else(|| unsupported(line, column, format!("datatype range <{range_iri}>")))?;
                    self.data_properties.push(DataPropertyDef {
                        name,
                        domain,
                        range,
                        comment: st.comment,
                        see_also: st.see_also,
                    });
                } else {
                    let range = self.local_name(&range_iri, &subject)?;
                    self.object_properties.push(ObjectPropertyDef {
                        name,
                        domain,
                        range,
                        comment: st.comment,
                        see_also: st.see_also,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Parses an ontology document, discarding warnings.
pub fn parse_ontology(text: &str) -> Result<Ontology, OntologyError> {
    parse_ontology_with_warnings(text).map(|(o, _)| o)
}

/// Parses an ontology document. The first non-standard `@prefix` names the
/// ontology namespace; `rdf`, `rdfs`, `owl` and `xsd` are pre-bound.
pub fn parse_ontology_with_warnings(
    text: &str,
) -> Result<(Ontology, Vec<ParseWarning>), OntologyError> {
    let tokens = Lexer::new(text).tokens()?;
    let parser = Parser {
        tokens,
        pos: 0,
        prefixes: STANDARD_PREFIXES
            .iter()
            .map(|(p, ns)| (p.to_string(), ns.to_string()))
            .collect(),
        ontology_prefix: None,
        warnings: Vec::new(),
        classes: Vec::new(),
        data_properties: Vec::new(),
        object_properties: Vec::new(),
    };
    parser.parse()
}

pub(crate) fn escape_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// Writes the prefix block shared by ontology and data exports.
pub(crate) fn write_prefixes(out: &mut String, prefix: &str, base: &str) {
    let _ = writeln!(out, "@prefix {prefix}: <{base}> .");
    for (p, ns) in STANDARD_PREFIXES {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
}

fn write_block(out: &mut String, o: &Ontology, name: &str, kind: &str, lines: Vec<String>) {
    let prefix = o.prefix();
    let _ = writeln!(out, "###  {}{}", o.base_uri(), name);
    let mut parts = vec![format!("{prefix}:{name} rdf:type {kind}")];
    parts.extend(lines);
    let _ = writeln!(out, "{} .\n", parts.join(" ;\n    "));
}

fn annotations(comment: &Option<String>, see_also: &Option<String>) -> Vec<String> {
    let mut v = Vec::new();
    if let Some(c) = comment {
        v.push(format!("rdfs:comment \"{}\"", escape_string(c)));
    }
    if let Some(s) = see_also {
        v.push(format!("rdfs:seeAlso <{s}>"));
    }
    v
}

/// Serializes a valid ontology: classes, then data properties, then object
/// properties, each sorted by name.
pub fn serialize_ontology(o: &Ontology) -> Result<String, OntologyError> {
    let violations = validate_ontology(o);
    if !violations.is_empty() {
        return Err(OntologyError::Invalid(violations));
    }
    let prefix = o.prefix();
    let mut out = String::new();
    write_prefixes(&mut out, prefix, o.base_uri());
    out.push('\n');

    let mut classes: Vec<_> = o.classes().iter().collect();
    classes.sort_by(|a, b| a.name.cmp(&b.name));
    for c in classes {
        write_block(&mut out, o, &c.name, "owl:Class", annotations(&c.comment, &c.see_also));
    }
    let mut dps: Vec<_> = o.data_properties().iter().collect();
    dps.sort_by(|a, b| a.name.cmp(&b.name));
    for p in dps {
        let mut lines = vec![
            format!("rdfs:domain {prefix}:{}", p.domain),
            format!("rdfs:range xsd:{}", p.range.xsd_local()),
        ];
        lines.splice(0..0, p.comment.iter().map(|c| format!("rdfs:comment \"{}\"", escape_string(c))));
        lines.extend(p.see_also.iter().map(|s| format!("rdfs:seeAlso <{s}>")));
        write_block(&mut out, o, &p.name, "owl:DatatypeProperty", lines);
    }
    let mut ops: Vec<_> = o.object_properties().iter().collect();
    ops.sort_by(|a, b| a.name.cmp(&b.name));
    for p in ops {
        let mut lines = vec![
            format!("rdfs:domain {prefix}:{}", p.domain),
            format!("rdfs:range {prefix}:{}", p.range),
        ];
        lines.splice(0..0, p.comment.iter().map(|c| format!("rdfs:comment \"{}\"", escape_string(c))));
        lines.extend(p.see_also.iter().map(|s| format!("rdfs:seeAlso <{s}>")));
        write_block(&mut out, o, &p.name, "owl:ObjectProperty", lines);
    }
    Ok(out)
}
