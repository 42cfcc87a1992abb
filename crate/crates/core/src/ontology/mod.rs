//! In-memory ontology: a class taxonomy (DAG), typed individuals, property
//! declarations, property assertions and free-text annotations.
//!
//! Classes and individuals live in separate namespaces, so one name may denote
//! both a class and an individual (the seed uses `MOM` and `RPC` this way).
//! Property names must not collide with either.

mod names;
mod validate;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use names::{is_identifier, is_reserved, ClassId, IndividualId, InvalidName, PropertyId};
pub use validate::{Violation, ViolationCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DatatypeKind {
    String,
    Integer,
    Boolean,
}

impl DatatypeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatatypeKind::String => "string",
            DatatypeKind::Integer => "integer",
            DatatypeKind::Boolean => "boolean",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "string" => Some(DatatypeKind::String),
            "integer" => Some(DatatypeKind::Integer),
            "boolean" => Some(DatatypeKind::Boolean),
            _ => None,
        }
    }
}

impl fmt::Display for DatatypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyKind {
    Object,
    Datatype,
    Annotation,
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropertyKind::Object => "object",
            PropertyKind::Datatype => "datatype",
            PropertyKind::Annotation => "annotation",
        })
    }
}

/// A property declaration. The range type depends on the kind, and annotation
/// properties carry neither domain nor range.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyDecl {
    Object {
        domain: Option<ClassId>,
        range: Option<ClassId>,
    },
    Datatype {
        domain: Option<ClassId>,
        range: Option<DatatypeKind>,
    },
    Annotation,
}

impl PropertyDecl {
    pub fn kind(&self) -> PropertyKind {
        match self {
            PropertyDecl::Object { .. } => PropertyKind::Object,
            PropertyDecl::Datatype { .. } => PropertyKind::Datatype,
            PropertyDecl::Annotation => PropertyKind::Annotation,
        }
    }

    pub fn domain(&self) -> Option<&ClassId> {
        match self {
            PropertyDecl::Object { domain, .. } | PropertyDecl::Datatype { domain, .. } => {
                domain.as_ref()
            }
            PropertyDecl::Annotation => None,
        }
    }

    fn referenced_classes(&self) -> impl Iterator<Item = &ClassId> {
        let range = match self {
            PropertyDecl::Object { range, .. } => range.as_ref(),
            _ => None,
        };
        self.domain().into_iter().chain(range)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Literal {
    String(String),
    Integer(i64),
    Boolean(bool),
}

impl Literal {
    pub fn kind(&self) -> DatatypeKind {
        match self {
            Literal::String(_) => DatatypeKind::String,
            Literal::Integer(_) => DatatypeKind::Integer,
            Literal::Boolean(_) => DatatypeKind::Boolean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssertionObject {
    Individual(IndividualId),
    Literal(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assertion {
    pub subject: IndividualId,
    pub property: PropertyId,
    pub object: AssertionObject,
}

impl Assertion {
    pub fn new(subject: IndividualId, property: PropertyId, object: AssertionObject) -> Self {
        Self {
            subject,
            property,
            object,
        }
    }
}

/// Free-text metadata attached to any named entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub entity: String,
    pub property: PropertyId,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error(transparent)]
    InvalidName(#[from] InvalidName),
    #[error("`{0}` is already declared")]
    DuplicateName(String),
    #[error("`{0}` is already used by another kind of entity")]
    NameClash(String),
    #[error("class `{class}` names unknown superclass `{superclass}`")]
    UnknownSuperclass { class: ClassId, superclass: ClassId },
    #[error("cycle in superclass relation: {}", display_path(.path))]
    CycleDetected { path: Vec<ClassId> },
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("individual `{0}` must have at least one type")]
    UntypedIndividual(IndividualId),
    #[error("{0}")]
    Violation(Violation),
}

fn display_path(path: &[ClassId]) -> String {
    path.iter()
        .map(ClassId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Class hierarchy. Stores direct superclass edges only; reflexivity and
/// transitivity are computed on query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Taxonomy {
    supers: BTreeMap<ClassId, BTreeSet<ClassId>>,
}

impl Taxonomy {
    pub fn contains(&self, class: &str) -> bool {
        self.supers.contains_key(class)
    }

    pub fn len(&self) -> usize {
        self.supers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supers.is_empty()
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassId> {
        self.supers.keys()
    }

    pub fn direct_superclasses(&self, class: &str) -> Option<&BTreeSet<ClassId>> {
        self.supers.get(class)
    }

    /// Direct subclasses of `class`, sorted by name.
    pub fn direct_subclasses(&self, class: &str) -> Vec<&ClassId> {
        self.supers
            .iter()
            .filter(|(_, sups)| sups.contains(class))
            .map(|(c, _)| c)
            .collect()
    }

    /// Reflexive-transitive superclasses of `class` (includes `class`).
    pub fn ancestors(&self, class: &str) -> BTreeSet<&ClassId> {
        let mut seen = BTreeSet::new();
        let Some((start, _)) = self.supers.get_key_value(class) else {
            return seen;
        };
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            if !seen.insert(c) {
                continue;
            }
            if let Some(sups) = self.supers.get(c) {
                queue.extend(sups.iter());
            }
        }
        seen
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        if from == to {
            return self.contains(from);
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(c) = stack.pop() {
            for s in self.supers.get(c).into_iter().flatten() {
                if s.as_str() == to {
                    return true;
                }
                if seen.insert(s.as_str()) {
                    stack.push(s.as_str());
                }
            }
        }
        false
    }

    /// Shortest upward path `from -> ... -> to`, if one exists.
    fn path_up(&self, from: &ClassId, to: &ClassId) -> Option<Vec<ClassId>> {
        let mut parent: BTreeMap<&ClassId, &ClassId> = BTreeMap::new();
        let mut queue = VecDeque::from([from]);
        let mut seen = BTreeSet::from([from]);
        while let Some(c) = queue.pop_front() {
            if c == to {
                let mut path = vec![c.clone()];
                let mut cur = c;
                while let Some(p) = parent.get(cur) {
                    path.push((*p).clone());
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for s in self.supers.get(c).into_iter().flatten() {
                if seen.insert(s) {
                    parent.insert(s, c);
                    queue.push_back(s);
                }
            }
        }
        None
    }

    pub(crate) fn insert_raw(&mut self, class: ClassId, supers: BTreeSet<ClassId>) {
        self.supers.entry(class).or_default().extend(supers);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ontology {
    taxonomy: Taxonomy,
    individuals: BTreeMap<IndividualId, BTreeSet<ClassId>>,
    properties: BTreeMap<PropertyId, PropertyDecl>,
    assertions: BTreeSet<Assertion>,
    annotations: BTreeSet<Annotation>,
}

impl Ontology {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.taxonomy.contains(class)
    }

    pub fn has_individual(&self, individual: &str) -> bool {
        self.individuals.contains_key(individual)
    }

    pub fn individuals(&self) -> impl Iterator<Item = (&IndividualId, &BTreeSet<ClassId>)> {
        self.individuals.iter()
    }

    pub fn types_of(&self, individual: &str) -> Option<&BTreeSet<ClassId>> {
        self.individuals.get(individual)
    }

    pub fn properties(&self) -> impl Iterator<Item = (&PropertyId, &PropertyDecl)> {
        self.properties.iter()
    }

    pub fn property(&self, property: &str) -> Option<&PropertyDecl> {
        self.properties.get(property)
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter()
    }

    pub fn assertions_about<'a>(&'a self, subject: &'a str) -> impl Iterator<Item = &'a Assertion> {
        self.assertions
            .iter()
            .filter(move |a| a.subject.as_str() == subject)
    }

    pub fn annotations(&self) -> impl Iterator<Item = &Annotation> {
        self.annotations.iter()
    }

    /// Annotation texts on `entity` under `property`, in sorted order.
    pub fn annotation_values<'a>(
        &'a self,
        entity: &'a str,
        property: &'a str,
    ) -> impl Iterator<Item = &'a str> {
        self.annotations
            .iter()
            .filter(move |a| a.entity == entity && a.property.as_str() == property)
            .map(|a| a.text.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.taxonomy.is_empty()
            && self.individuals.is_empty()
            && self.properties.is_empty()
            && self.assertions.is_empty()
            && self.annotations.is_empty()
    }

    /// True if `name` is a declared class, individual or property.
    pub fn is_entity(&self, name: &str) -> bool {
        self.has_class(name) || self.has_individual(name) || self.properties.contains_key(name)
    }

    /// Declares `class` under `supers`.
    ///
    /// Redeclaring an existing class is a `DuplicateName` error unless the new
    /// superclass edges would close a cycle, which is reported as
    /// `CycleDetected` with the offending path. On error `self` is unchanged.
    pub fn add_class<I>(&mut self, class: ClassId, supers: I) -> Result<(), OntologyError>
    where
        I: IntoIterator<Item = ClassId>,
    {
        let supers: BTreeSet<ClassId> = supers.into_iter().collect();
        if self.properties.contains_key(class.as_str()) {
            return Err(OntologyError::NameClash(class.to_string()));
        }
        for s in &supers {
            if !self.has_class(s.as_str()) && *s != class {
                return Err(OntologyError::UnknownSuperclass {
                    class,
                    superclass: s.clone(),
                });
            }
        }
        if self.has_class(class.as_str()) {
            for s in &supers {
                if let Some(mut path) = self.taxonomy.path_up(s, &class) {
                    path.insert(0, class.clone());
                    return Err(OntologyError::CycleDetected { path });
                }
            }
            return Err(OntologyError::DuplicateName(class.to_string()));
        }
        if let Some(s) = supers.iter().find(|s| **s == class) {
            return Err(OntologyError::UnknownSuperclass {
                class: class.clone(),
                superclass: s.clone(),
            });
        }
        self.taxonomy.insert_raw(class, supers);
        Ok(())
    }

    pub fn add_property(&mut self, id: PropertyId, decl: PropertyDecl) -> Result<(), OntologyError> {
        if self.properties.contains_key(id.as_str()) {
            return Err(OntologyError::DuplicateName(id.to_string()));
        }
        if self.has_class(id.as_str()) || self.has_individual(id.as_str()) {
            return Err(OntologyError::NameClash(id.to_string()));
        }
        if let Some(c) = decl.referenced_classes().find(|c| !self.has_class(c.as_str())) {
            return Err(OntologyError::UnknownClass(c.to_string()));
        }
        self.properties.insert(id, decl);
        Ok(())
    }

    pub fn add_individual<I>(&mut self, id: IndividualId, types: I) -> Result<(), OntologyError>
    where
        I: IntoIterator<Item = ClassId>,
    {
        let types: BTreeSet<ClassId> = types.into_iter().collect();
        if self.has_individual(id.as_str()) {
            return Err(OntologyError::DuplicateName(id.to_string()));
        }
        if self.properties.contains_key(id.as_str()) {
            return Err(OntologyError::NameClash(id.to_string()));
        }
        if types.is_empty() {
            return Err(OntologyError::UntypedIndividual(id));
        }
        if let Some(c) = types.iter().find(|c| !self.has_class(c.as_str())) {
            return Err(OntologyError::UnknownClass(c.to_string()));
        }
        self.individuals.insert(id, types);
        Ok(())
    }

    /// Adds an assertion after checking it against declarations, kinds,
    /// domain and range.
    pub fn add_assertion(&mut self, assertion: Assertion) -> Result<(), OntologyError> {
        if let Some(v) = validate::check_assertion(self, &assertion) {
            return Err(OntologyError::Violation(v));
        }
        self.assertions.insert(assertion);
        Ok(())
    }

    pub fn annotate(
        &mut self,
        entity: &str,
        property: PropertyId,
        text: impl Into<String>,
    ) -> Result<(), OntologyError> {
        let annotation = Annotation {
            entity: entity.to_owned(),
            property,
            text: text.into(),
        };
        if let Some(v) = validate::check_annotation(self, &annotation) {
            return Err(OntologyError::Violation(v));
        }
        self.annotations.insert(annotation);
        Ok(())
    }

    /// Reflexive-transitive subsumption test.
    pub fn is_subclass_of(&self, sub: &str, sup: &str) -> Result<bool, OntologyError> {
        self.require_class(sub)?;
        self.require_class(sup)?;
        Ok(self.taxonomy.reaches(sub, sup))
    }

    /// Individuals asserted to be of `class` or of any of its subclasses.
    pub fn instances_of(&self, class: &str) -> Result<BTreeSet<IndividualId>, OntologyError> {
        self.require_class(class)?;
        Ok(self
            .individuals
            .iter()
            .filter(|(_, types)| self.has_type(types, class))
            .map(|(i, _)| i.clone())
            .collect())
    }

    /// True if `individual` is an instance (direct or inherited) of `class`.
    pub fn is_instance_of(&self, individual: &str, class: &str) -> bool {
        self.individuals
            .get(individual)
            .is_some_and(|types| self.has_type(types, class))
    }

    fn has_type(&self, types: &BTreeSet<ClassId>, class: &str) -> bool {
        types.iter().any(|t| self.taxonomy.reaches(t.as_str(), class))
    }

    fn require_class(&self, class: &str) -> Result<(), OntologyError> {
        if self.has_class(class) {
            Ok(())
        } else {
            Err(OntologyError::UnknownClass(class.to_owned()))
        }
    }

    /// Checks every structural invariant. Returns an empty list iff the
    /// ontology is consistent.
    pub fn validate(&self) -> Vec<Violation> {
        validate::validate(self)
    }

    // Unchecked construction used by the parser, which accepts forward
    // references and validates once the whole document is read.

    pub(crate) fn insert_class_raw(&mut self, class: ClassId, supers: BTreeSet<ClassId>) {
        self.taxonomy.insert_raw(class, supers);
    }

    pub(crate) fn insert_property_raw(&mut self, id: PropertyId, decl: PropertyDecl) {
        self.properties.insert(id, decl);
    }

    pub(crate) fn insert_individual_raw(&mut self, id: IndividualId, types: BTreeSet<ClassId>) {
        self.individuals.insert(id, types);
    }

    pub(crate) fn insert_assertion_raw(&mut self, assertion: Assertion) {
        self.assertions.insert(assertion);
    }

    pub(crate) fn insert_annotation_raw(&mut self, annotation: Annotation) {
        self.annotations.insert(annotation);
    }
}
