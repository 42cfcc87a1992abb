//! Reader and writer for MWO, a small line-oriented statement format for
//! ontologies and service descriptions.
//!
//! ```text
//! class Middleware ;
//! class MOM subclassOf Middleware ;
//! individual ActiveMQ typeOf MOM ;
//! annotate MOM note "queues and topics" ;
//!
//! service Billing { request_reference = message ; connection_mode = synchronous|asynchronous ; }
//! ```
//!
//! Parsing stops at the first error. Declarations may appear in any order;
//! the ontology is checked once the whole document has been read.

mod lexer;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::classifier::ServiceDescription;
use crate::ontology::{
    Annotation, Assertion, AssertionObject, ClassId, DatatypeKind, IndividualId, Literal, Ontology,
    PropertyDecl, PropertyId, Violation, ViolationCode,
};
use crate::vocabulary::{FeatureKey, FeatureMap};
use lexer::{Lexer, Spanned, Token};

/// 1-based line and column; columns count Unicode scalar values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePosition {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourcePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{position}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub position: SourcePosition,
    pub expected: String,
    pub found: String,
}

impl SyntaxError {
    pub(crate) fn new(
        position: SourcePosition,
        expected: impl Into<String>,
        found: impl Into<String>,
    ) -> Self {
        Self {
            position,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("{} violation(s): {}", .0.len(), display_violations(.0))]
    ValidationFailed(Vec<Violation>),
    #[error("{position}: unknown feature '{key}'")]
    UnknownFeature {
        key: String,
        position: SourcePosition,
    },
    #[error("{position}: unknown value '{value}' for {key} ({reason})")]
    InvalidFeatureValue {
        key: FeatureKey,
        value: String,
        reason: String,
        position: SourcePosition,
    },
    #[error("{position}: feature '{key}' given more than once")]
    DuplicateFeature {
        key: FeatureKey,
        position: SourcePosition,
    },
}

fn display_violations(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl ParseError {
    /// Source position of the error; `None` for validation failures, which
    /// concern the document as a whole.
    pub fn position(&self) -> Option<SourcePosition> {
        match self {
            ParseError::Syntax(e) => Some(e.position),
            ParseError::ValidationFailed(_) => None,
            ParseError::UnknownFeature { position, .. }
            | ParseError::InvalidFeatureValue { position, .. }
            | ParseError::DuplicateFeature { position, .. } => Some(*position),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Document {
    Ontology(Ontology),
    Service(ServiceDescription),
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Spanned>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lexer: Lexer::new(text),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<&Spanned, SyntaxError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lexer.next_token()?);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    fn next(&mut self) -> Result<Spanned, SyntaxError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lexer.next_token(),
        }
    }

    fn expect(&mut self, token: Token) -> Result<SourcePosition, SyntaxError> {
        let t = self.next()?;
        if t.token == token {
            Ok(t.position)
        } else {
            Err(SyntaxError::new(
                t.position,
                format!("\"{token}\""),
                t.token.to_string(),
            ))
        }
    }

    fn peek_keyword(&mut self, keyword: &str) -> Result<bool, SyntaxError> {
        Ok(matches!(&self.peek()?.token, Token::Ident(s) if s == keyword))
    }

    fn ident(&mut self) -> Result<(String, SourcePosition), SyntaxError> {
        let t = self.next()?;
        match t.token {
            Token::Ident(s) if !crate::ontology::is_reserved(&s) => Ok((s, t.position)),
            other => Err(SyntaxError::new(t.position, "identifier", other.to_string())),
        }
    }

    fn name<T: Named>(&mut self) -> Result<(T, SourcePosition), SyntaxError> {
        let (s, pos) = self.ident()?;
        match T::named(&s) {
            Some(v) => Ok((v, pos)),
            None => Err(SyntaxError::new(pos, "identifier", s)),
        }
    }

    /// `ident ("," ident)*`
    fn name_list<T>(&mut self) -> Result<BTreeSet<T>, SyntaxError>
    where
        T: Ord + Named,
    {
        let mut out = BTreeSet::new();
        out.insert(self.name()?.0);
        while self.peek()?.token == Token::Comma {
            self.next()?;
            out.insert(self.name()?.0);
        }
        Ok(out)
    }
}

trait Named: Sized {
    fn named(s: &str) -> Option<Self>;
}

impl Named for ClassId {
    fn named(s: &str) -> Option<Self> {
        ClassId::new(s).ok()
    }
}

impl Named for IndividualId {
    fn named(s: &str) -> Option<Self> {
        IndividualId::new(s).ok()
    }
}

impl Named for PropertyId {
    fn named(s: &str) -> Option<Self> {
        PropertyId::new(s).ok()
    }
}

#[derive(Default)]
struct Declared {
    classes: BTreeMap<String, SourcePosition>,
    properties: BTreeMap<String, SourcePosition>,
    individuals: BTreeMap<String, SourcePosition>,
    duplicates: Vec<Violation>,
}

impl Declared {
    fn note(&mut self, kind: &str, name: &str, pos: SourcePosition) {
        let seen = match kind {
            "class" => &mut self.classes,
            "property" => &mut self.properties,
            _ => &mut self.individuals,
        };
        if let Some(first) = seen.get(name) {
            self.duplicates.push(Violation::new(
                ViolationCode::DuplicateName,
                name,
                format!("{kind} `{name}` declared at {first} and again at {pos}"),
            ));
        } else {
            seen.insert(name.to_owned(), pos);
        }
    }
}

/// Parses an ontology document. A syntactically valid document that breaks
/// an ontology invariant yields `ValidationFailed`.
pub fn parse_ontology(text: &str) -> Result<Ontology, ParseError> {
    let mut p = Parser::new(text);
    let mut ont = Ontology::new();
    let mut declared = Declared::default();

    loop {
        let t = p.next()?;
        let keyword = match t.token {
            Token::Eof => break,
            Token::Ident(ref k) => k.as_str(),
            ref other => {
                return Err(SyntaxError::new(t.position, "statement keyword", other.to_string()).into())
            }
        };
        match keyword {
            "class" => {
                let (class, pos) = p.name::<ClassId>()?;
                let supers = if p.peek_keyword("subclassOf")? {
                    p.next()?;
                    p.name_list()?
                } else {
                    BTreeSet::new()
                };
                declared.note("class", class.as_str(), pos);
                ont.insert_class_raw(class, supers);
            }
            "objectProperty" | "datatypeProperty" => {
                let object = keyword == "objectProperty";
                let (id, pos) = p.name::<PropertyId>()?;
                let domain = if p.peek_keyword("domain")? {
                    p.next()?;
                    Some(p.name::<ClassId>()?.0)
                } else {
                    None
                };
                let has_range = p.peek_keyword("range")?;
                if has_range {
                    p.next()?;
                }
                let decl = if object {
                    let range = if has_range { Some(p.name::<ClassId>()?.0) } else { None };
                    PropertyDecl::Object { domain, range }
                } else {
                    let range = if has_range {
                        let t = p.next()?;
                        match &t.token {
                            Token::Ident(s) => DatatypeKind::from_keyword(s),
                            _ => None,
                        }
                        .map(Some)
                        .ok_or_else(|| {
                            SyntaxError::new(t.position, "string, integer or boolean", t.token.to_string())
                        })?
                    } else {
                        None
                    };
                    PropertyDecl::Datatype { domain, range }
                };
                declared.note("property", id.as_str(), pos);
                ont.insert_property_raw(id, decl);
            }
            "annotationProperty" => {
                let (id, pos) = p.name::<PropertyId>()?;
                declared.note("property", id.as_str(), pos);
                ont.insert_property_raw(id, PropertyDecl::Annotation);
            }
            "individual" => {
                let (id, pos) = p.name::<IndividualId>()?;
                let t = p.next()?;
                if !matches!(&t.token, Token::Ident(s) if s == "typeOf") {
                    return Err(SyntaxError::new(t.position, "\"typeOf\"", t.token.to_string()).into());
                }
                let types = p.name_list()?;
                declared.note("individual", id.as_str(), pos);
                ont.insert_individual_raw(id, types);
            }
            "assert" => {
                let subject = p.name::<IndividualId>()?.0;
                let property = p.name::<PropertyId>()?.0;
                let t = p.next()?;
                let object = match t.token {
                    Token::Ident(s) if s == "true" => AssertionObject::Literal(Literal::Boolean(true)),
                    Token::Ident(s) if s == "false" => {
                        AssertionObject::Literal(Literal::Boolean(false))
                    }
                    Token::Ident(s) => AssertionObject::Individual(
                        IndividualId::new(s.as_str())
                            .map_err(|_| SyntaxError::new(t.position, "identifier", s.clone()))?,
                    ),
                    Token::Str(s) => AssertionObject::Literal(Literal::String(s)),
                    Token::Int(i) => AssertionObject::Literal(Literal::Integer(i)),
                    other => {
                        return Err(SyntaxError::new(
                            t.position,
                            "identifier or literal",
                            other.to_string(),
                        )
                        .into())
                    }
                };
                ont.insert_assertion_raw(Assertion::new(subject, property, object));
            }
            "annotate" => {
                let (entity, _) = p.ident()?;
                let property = p.name::<PropertyId>()?.0;
                let t = p.next()?;
                let Token::Str(text) = t.token else {
                    return Err(SyntaxError::new(t.position, "string", t.token.to_string()).into());
                };
                ont.insert_annotation_raw(Annotation {
                    entity,
                    property,
                    text,
                });
            }
            other => {
                return Err(SyntaxError::new(t.position, "statement keyword", other.to_owned()).into())
            }
        }
        p.expect(Token::Semi)?;
    }

    let mut violations = declared.duplicates;
    violations.extend(ont.validate());
    if violations.is_empty() {
        Ok(ont)
    } else {
        Err(ParseError::ValidationFailed(violations))
    }
}

/// Parses `service Name { key = value ; ... }` against the feature vocabulary.
pub fn parse_service(text: &str) -> Result<ServiceDescription, ParseError> {
    let mut p = Parser::new(text);
    let t = p.next()?;
    if !matches!(&t.token, Token::Ident(s) if s == "service") {
        return Err(SyntaxError::new(t.position, "\"service\"", t.token.to_string()).into());
    }
    let name = p.name::<IndividualId>()?.0;
    p.expect(Token::LBrace)?;
    let mut features = FeatureMap::new();
    loop {
        let t = p.next()?;
        let (key_text, key_pos) = match t.token {
            Token::RBrace => break,
            Token::Ident(s) => (s, t.position),
            other => {
                return Err(SyntaxError::new(t.position, "feature key or \"}\"", other.to_string()).into())
            }
        };
        let key = FeatureKey::from_name(&key_text).ok_or(ParseError::UnknownFeature {
            key: key_text,
            position: key_pos,
        })?;
        p.expect(Token::Equals)?;

        let first = p.next()?;
        let value_pos = first.position;
        let mut parts = Vec::new();
        match first.token {
            Token::Ident(s) => parts.push(s),
            other => return Err(SyntaxError::new(value_pos, "feature value", other.to_string()).into()),
        }
        while p.peek()?.token == Token::Pipe {
            p.next()?;
            let t = p.next()?;
            match t.token {
                Token::Ident(s) => parts.push(s),
                other => return Err(SyntaxError::new(t.position, "feature value", other.to_string()).into()),
            }
        }
        let value = key.parse_value(&parts.join("|")).map_err(|e| ParseError::InvalidFeatureValue {
            key,
            value: e.value,
            reason: e.reason,
            position: value_pos,
        })?;
        p.expect(Token::Semi)?;
        if features.insert(key, value).is_some() {
            return Err(ParseError::DuplicateFeature {
                key,
                position: key_pos,
            });
        }
    }
    p.expect(Token::Eof)?;
    Ok(ServiceDescription::new(name, features))
}

/// Parses either document kind, chosen by the leading keyword.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let mut p = Parser::new(text);
    if p.peek_keyword("service")? {
        parse_service(text).map(Document::Service)
    } else {
        parse_ontology(text).map(Document::Ontology)
    }
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", escape(s))
}

fn join<T: AsRef<str>>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|s| s.as_ref().to_owned())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn serialize(doc: &Document) -> String {
    match doc {
        Document::Ontology(o) => serialize_ontology(o),
        Document::Service(s) => serialize_service(s),
    }
}

/// Canonical text: classes, properties, individuals, assertions, then
/// annotations; each group sorted; one statement per LF-terminated line.
pub fn serialize_ontology(ont: &Ontology) -> String {
    let classes = ont.taxonomy().classes().map(|c| {
        let supers = ont.taxonomy().direct_superclasses(c.as_str()).expect("declared");
        if supers.is_empty() {
            format!("class {c} ;")
        } else {
            format!("class {c} subclassOf {} ;", join(supers))
        }
    });
    let properties = ont.properties().map(|(id, decl)| match decl {
        PropertyDecl::Object { domain, range } => {
            let mut s = format!("objectProperty {id}");
            if let Some(d) = domain {
                s.push_str(&format!(" domain {d}"));
            }
            if let Some(r) = range {
                s.push_str(&format!(" range {r}"));
            }
            s + " ;"
        }
        PropertyDecl::Datatype { domain, range } => {
            let mut s = format!("datatypeProperty {id}");
            if let Some(d) = domain {
                s.push_str(&format!(" domain {d}"));
            }
            if let Some(r) = range {
                s.push_str(&format!(" range {r}"));
            }
            s + " ;"
        }
        PropertyDecl::Annotation => format!("annotationProperty {id} ;"),
    });
    let individuals = ont
        .individuals()
        .map(|(id, types)| format!("individual {id} typeOf {} ;", join(types)));
    let assertions = ont.assertions().map(|a| {
        let object = match &a.object {
            AssertionObject::Individual(i) => i.to_string(),
            AssertionObject::Literal(Literal::String(s)) => quote(s),
            AssertionObject::Literal(Literal::Integer(i)) => i.to_string(),
            AssertionObject::Literal(Literal::Boolean(b)) => b.to_string(),
        };
        format!("assert {} {} {object} ;", a.subject, a.property)
    });
    let annotations = ont
        .annotations()
        .map(|a| format!("annotate {} {} {} ;", a.entity, a.property, quote(&a.text)));

    let mut out = String::new();
    for group in [
        classes.collect::<Vec<_>>(),
        properties.collect(),
        individuals.collect(),
        assertions.collect(),
        annotations.collect(),
    ] {
        let mut group = group;
        group.sort();
        for line in group {
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

/// Canonical service text with features in key-name order.
pub fn serialize_service(service: &ServiceDescription) -> String {
    let mut out = format!("service {} {{\n", service.name());
    for (key, value) in service.features() {
        out.push_str(&format!("  {key} = {} ;\n", value.render(*key)));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(line: usize, column: usize) -> SourcePosition {
        SourcePosition { line, column }
    }

    fn syntax(err: ParseError) -> SyntaxError {
        match err {
            ParseError::Syntax(e) => e,
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn two_classes_one_edge() {
        let o = parse_ontology("class Middleware ;\nclass MOM subclassOf Middleware ;").unwrap();
        assert_eq!(o.taxonomy().len(), 2);
        assert!(o.is_subclass_of("MOM", "Middleware").unwrap());
    }

    #[test]
    fn empty_input_is_empty_ontology() {
        let o = parse_ontology("").unwrap();
        assert!(o.is_empty());
        assert_eq!(serialize_ontology(&o), "");
        assert_eq!(parse_ontology("  # only a comment\n").unwrap(), o);
    }

    #[test]
    fn missing_superclass_name() {
        let e = syntax(parse_ontology("class MOM subclassOf ;").unwrap_err());
        assert_eq!(e.position, pos(1, 22));
        assert_eq!(e.expected, "identifier");
        assert_eq!(e.found, ";");
    }

    #[test]
    fn forward_references_allowed() {
        let o = parse_ontology("class MOM subclassOf Middleware ;\nclass Middleware ;").unwrap();
        assert!(o.is_subclass_of("MOM", "Middleware").unwrap());
    }

    #[test]
    fn semantic_errors_become_validation_failures() {
        let err = parse_ontology("class A subclassOf B ;").unwrap_err();
        let ParseError::ValidationFailed(v) = err else { panic!() };
        assert_eq!(v[0].code, ViolationCode::UnknownSuperclass);

        let err = parse_ontology("class A ;\nclass A ;").unwrap_err();
        let ParseError::ValidationFailed(v) = err else { panic!() };
        assert_eq!(v[0].code, ViolationCode::DuplicateName);
        assert!(v[0].message.contains("1:7") && v[0].message.contains("2:7"));
    }

    #[test]
    fn reserved_word_not_a_name() {
        let e = syntax(parse_ontology("class true ;").unwrap_err());
        assert_eq!(e.position, pos(1, 7));
    }

    #[test]
    fn datatype_range_keyword() {
        let e = syntax(parse_ontology("datatypeProperty p range float ;").unwrap_err());
        assert_eq!(e.expected, "string, integer or boolean");
        assert_eq!(e.position, pos(1, 26));
    }

    #[test]
    fn unknown_statement_keyword() {
        let e = syntax(parse_ontology("klass A ;").unwrap_err());
        assert_eq!(e.position, pos(1, 1));
        assert_eq!(e.found, "klass");
    }

    #[test]
    fn full_statement_set_round_trips() {
        let text = r#"
            class T ; class U subclassOf T ;
            objectProperty link domain T range U ;
            datatypeProperty size domain T range integer ;
            datatypeProperty label ;
            annotationProperty note ;
            individual a typeOf T ; individual b typeOf U ;
            assert a link b ; assert a size -3 ; assert b label "x \"y\"\\z\nw" ;
            assert b size 7 ; assert a label true ;
            annotate T note "root" ; annotate a note "é" ;
        "#;
        let o = parse_ontology(text).unwrap();
        let s = serialize_ontology(&o);
        assert_eq!(parse_ontology(&s).unwrap(), o);
        assert_eq!(serialize_ontology(&parse_ontology(&s).unwrap()), s);
        assert!(s.starts_with("class T ;\nclass U subclassOf T ;\n"));
        assert!(s.contains("assert b label \"x \\\"y\\\"\\\\z\\nw\" ;\n"));
    }

    #[test]
    fn service_with_one_feature() {
        let s = parse_service("service S { request_reference = sql_query ; }").unwrap();
        assert_eq!(s.name().as_str(), "S");
        assert_eq!(s.features().len(), 1);
    }

    #[test]
    fn empty_service() {
        let s = parse_service("service S { }").unwrap();
        assert!(s.features().is_empty());
        assert_eq!(serialize_service(&s), "service S {\n}\n");
    }

    #[test]
    fn invalid_feature_value_position() {
        let err = parse_service("service S { scalability = enormous ; }").unwrap_err();
        assert!(matches!(
            err,
            ParseError::InvalidFeatureValue { key: FeatureKey::Scalability, .. }
        ));
        assert_eq!(err.position(), Some(pos(1, 27)));
    }

    #[test]
    fn unknown_and_duplicate_features() {
        let err = parse_service("service S {\n  speed = fast ;\n}").unwrap_err();
        assert_eq!(
            err,
            ParseError::UnknownFeature {
                key: "speed".into(),
                position: pos(2, 3)
            }
        );
        let err =
            parse_service("service S { scalability = high ; scalability = high ; }").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateFeature { .. }));
        assert_eq!(err.position(), Some(pos(1, 34)));
    }

    #[test]
    fn set_valued_feature() {
        let s = parse_service("service S { connection_mode = asynchronous | synchronous ; }").unwrap();
        assert_eq!(
            serialize_service(&s),
            "service S {\n  connection_mode = synchronous|asynchronous ;\n}\n"
        );
    }

    #[test]
    fn trailing_garbage_after_service() {
        let e = syntax(parse_service("service S { } class A ;").unwrap_err());
        assert_eq!(e.position, pos(1, 15));
    }

    #[test]
    fn document_detection() {
        assert!(matches!(parse_document("service S { }"), Ok(Document::Service(_))));
        assert!(matches!(parse_document("# c\nclass A ;"), Ok(Document::Ontology(_))));
        assert!(matches!(parse_document(""), Ok(Document::Ontology(_))));
    }
}
