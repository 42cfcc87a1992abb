use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{Annotation, Assertion, AssertionObject, ClassId, Ontology, PropertyDecl, PropertyKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationCode {
    DuplicateName,
    NameClash,
    UnknownSuperclass,
    CycleDetected,
    UnknownClass,
    UntypedIndividual,
    UnknownProperty,
    UnknownIndividual,
    UnknownEntity,
    KindMismatch,
    DomainMismatch,
    RangeMismatch,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::DuplicateName => "DuplicateName",
            ViolationCode::NameClash => "NameClash",
            ViolationCode::UnknownSuperclass => "UnknownSuperclass",
            ViolationCode::CycleDetected => "CycleDetected",
            ViolationCode::UnknownClass => "UnknownClass",
            ViolationCode::UntypedIndividual => "UntypedIndividual",
            ViolationCode::UnknownProperty => "UnknownProperty",
            ViolationCode::UnknownIndividual => "UnknownIndividual",
            ViolationCode::UnknownEntity => "UnknownEntity",
            ViolationCode::KindMismatch => "KindMismatch",
            ViolationCode::DomainMismatch => "DomainMismatch",
            ViolationCode::RangeMismatch => "RangeMismatch",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken invariant: a machine-readable code, the offending entity and a
/// human-readable message.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    pub code: ViolationCode,
    pub entity: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, entity: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            entity: entity.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.code, self.entity, self.message)
    }
}

pub(super) fn validate(ont: &Ontology) -> Vec<Violation> {
    let mut out = Vec::new();

    for p in ont.properties.keys() {
        if ont.has_class(p.as_str()) || ont.has_individual(p.as_str()) {
            out.push(Violation::new(
                ViolationCode::NameClash,
                p.as_str(),
                format!("property `{p}` shares its name with a class or individual"),
            ));
        }
    }

    for (class, supers) in ont.taxonomy.supers.iter() {
        for s in supers {
            if !ont.has_class(s.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownSuperclass,
                    class.as_str(),
                    format!("superclass `{s}` is not declared"),
                ));
            }
        }
    }

    for cycle in find_cycles(&ont.taxonomy.supers) {
        let path = cycle.iter().map(ClassId::as_str).collect::<Vec<_>>().join(" -> ");
        out.push(Violation::new(
            ViolationCode::CycleDetected,
            cycle[0].as_str(),
            format!("superclass cycle {path}"),
        ));
    }

    for (p, decl) in ont.properties.iter() {
        for c in decl.referenced_classes() {
            if !ont.has_class(c.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownClass,
                    p.as_str(),
                    format!("domain/range class `{c}` is not declared"),
                ));
            }
        }
    }

    for (ind, types) in ont.individuals.iter() {
        if types.is_empty() {
            out.push(Violation::new(
                ViolationCode::UntypedIndividual,
                ind.as_str(),
                "individual has no asserted type",
            ));
        }
        for t in types {
            if !ont.has_class(t.as_str()) {
                out.push(Violation::new(
                    ViolationCode::UnknownClass,
                    ind.as_str(),
                    format!("type `{t}` is not declared"),
                ));
            }
        }
    }

    out.extend(ont.assertions.iter().filter_map(|a| check_assertion(ont, a)));
    out.extend(ont.annotations.iter().filter_map(|a| check_annotation(ont, a)));
    out
}

fn describe(a: &Assertion) -> String {
    let object = match &a.object {
        AssertionObject::Individual(i) => i.to_string(),
        AssertionObject::Literal(l) => format!("{l:?}"),
    };
    format!("{} {} {}", a.subject, a.property, object)
}

pub(super) fn check_assertion(ont: &Ontology, a: &Assertion) -> Option<Violation> {
    let v = |code, msg: String| Some(Violation::new(code, a.subject.as_str(), msg));
    if !ont.has_individual(a.subject.as_str()) {
        return v(
            ViolationCode::UnknownIndividual,
            format!("subject of `{}` is not a declared individual", describe(a)),
        );
    }
    let Some(decl) = ont.properties.get(a.property.as_str()) else {
        return v(
            ViolationCode::UnknownProperty,
            format!("property `{}` is not declared", a.property),
        );
    };
    if let Some(domain) = decl.domain() {
        if !ont.is_instance_of(a.subject.as_str(), domain.as_str()) {
            return v(
                ViolationCode::DomainMismatch,
                format!("`{}`: subject is not an instance of `{domain}`", describe(a)),
            );
        }
    }
    match (decl, &a.object) {
        (PropertyDecl::Object { range, .. }, AssertionObject::Individual(obj)) => {
            if !ont.has_individual(obj.as_str()) {
                return v(
                    ViolationCode::UnknownIndividual,
                    format!("object `{obj}` is not a declared individual"),
                );
            }
            if let Some(range) = range {
                if !ont.is_instance_of(obj.as_str(), range.as_str()) {
                    return v(
                        ViolationCode::RangeMismatch,
                        format!("`{}`: object is not an instance of `{range}`", describe(a)),
                    );
                }
            }
            None
        }
        (PropertyDecl::Datatype { range, .. }, AssertionObject::Literal(lit)) => match range {
            Some(kind) if *kind != lit.kind() => v(
                ViolationCode::RangeMismatch,
                format!("`{}`: expected {kind} literal, got {}", describe(a), lit.kind()),
            ),
            _ => None,
        },
        (PropertyDecl::Annotation, _) => v(
            ViolationCode::KindMismatch,
            format!("annotation property `{}` used in an assertion", a.property),
        ),
        (decl, _) => v(
            ViolationCode::KindMismatch,
            format!(
                "`{}`: {} property given the wrong kind of object",
                describe(a),
                decl.kind()
            ),
        ),
    }
}

pub(super) fn check_annotation(ont: &Ontology, a: &Annotation) -> Option<Violation> {
    let v = |code, msg: String| Some(Violation::new(code, a.entity.as_str(), msg));
    if !ont.is_entity(&a.entity) {
        return v(
            ViolationCode::UnknownEntity,
            format!("annotated entity `{}` is not declared", a.entity),
        );
    }
    match ont.properties.get(a.property.as_str()).map(PropertyDecl::kind) {
        None => v(
            ViolationCode::UnknownProperty,
            format!("property `{}` is not declared", a.property),
        ),
        Some(PropertyKind::Annotation) => None,
        Some(kind) => v(
            ViolationCode::KindMismatch,
            format!("{kind} property `{}` used as an annotation", a.property),
        ),
    }
}

/// Each back edge found by a depth-first walk yields one cycle, reported as
/// `c -> ... -> c`. Walk order is by class name, so output is deterministic.
fn find_cycles(supers: &BTreeMap<ClassId, BTreeSet<ClassId>>) -> Vec<Vec<ClassId>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: BTreeMap<&ClassId, Mark> = BTreeMap::new();
    let mut cycles = Vec::new();

    for root in supers.keys() {
        if marks.contains_key(root) {
            continue;
        }
        // explicit stack of (node, iterator position)
        let mut stack: Vec<(&ClassId, Vec<&ClassId>)> = Vec::new();
        marks.insert(root, Mark::Open);
        stack.push((root, supers[root].iter().rev().collect()));
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            match pending.pop() {
                Some(next) => match marks.get(next) {
                    None if supers.contains_key(next) => {
                        marks.insert(next, Mark::Open);
                        stack.push((next, supers[next].iter().rev().collect()));
                    }
                    Some(Mark::Open) => {
                        let start = stack.iter().position(|(n, _)| *n == next).unwrap_or(0);
                        let mut cycle: Vec<ClassId> =
                            stack[start..].iter().map(|(n, _)| (*n).clone()).collect();
                        cycle.push(next.clone());
                        cycles.push(cycle);
                    }
                    _ => {}
                },
                None => {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                }
            }
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn c(s: &str) -> ClassId {
        ClassId::new(s).unwrap()
    }

    #[test]
    fn empty_ontology_is_valid() {
        assert!(Ontology::new().validate().is_empty());
    }

    #[test]
    fn untyped_individual_reported() {
        let mut o = Ontology::new();
        o.insert_individual_raw(IndividualId::new("X").unwrap(), BTreeSet::new());
        let codes: Vec<_> = o.validate().iter().map(|v| v.code).collect();
        assert_eq!(codes, vec![ViolationCode::UntypedIndividual]);
    }

    #[test]
    fn integer_on_string_range_reported() {
        let mut o = Ontology::new();
        o.add_class(c("T"), []).unwrap();
        o.add_individual(IndividualId::new("x").unwrap(), [c("T")]).unwrap();
        o.add_property(
            PropertyId::new("label").unwrap(),
            PropertyDecl::Datatype {
                domain: None,
                range: Some(DatatypeKind::String),
            },
        )
        .unwrap();
        o.insert_assertion_raw(Assertion::new(
            IndividualId::new("x").unwrap(),
            PropertyId::new("label").unwrap(),
            AssertionObject::Literal(Literal::Integer(3)),
        ));
        let v = o.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::RangeMismatch);
        assert_eq!(v[0].entity, "x");
    }

    #[test]
    fn raw_cycle_detected() {
        let mut o = Ontology::new();
        o.insert_class_raw(c("A"), [c("B")].into());
        o.insert_class_raw(c("B"), [c("C")].into());
        o.insert_class_raw(c("C"), [c("A")].into());
        o.insert_class_raw(c("D"), [c("A")].into());
        let v = o.validate();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code, ViolationCode::CycleDetected);
        assert_eq!(v[0].message, "superclass cycle A -> B -> C -> A");
    }

    #[test]
    fn unknown_references_reported() {
        let mut o = Ontology::new();
        o.insert_class_raw(c("A"), [c("Missing")].into());
        o.insert_annotation_raw(Annotation {
            entity: "Ghost".into(),
            property: PropertyId::new("note").unwrap(),
            text: String::new(),
        });
        let codes: Vec<_> = o.validate().iter().map(|v| v.code).collect();
        assert_eq!(
            codes,
            vec![ViolationCode::UnknownSuperclass, ViolationCode::UnknownEntity]
        );
    }

    #[test]
    fn validate_is_pure() {
        let mut o = Ontology::new();
        o.insert_class_raw(c("A"), [c("A")].into());
        assert_eq!(o.validate(), o.validate());
    }
}
