//! The middleware knowledge base: class skeleton, per-type characteristic
//! profiles and the technology comparison matrix.
//!
//! Everything is stored in the ontology itself so that a KB survives an MWO
//! round trip:
//!
//! * a type profile entry is an annotation `annotate <Type> feature "key=value"`;
//! * a matrix cell is a boolean assertion `assert <Technology> <feature> true|false`
//!   on one of the eight boolean feature properties.
//!
//! [`KnowledgeBase::from_ontology`] recovers profiles and matrix from those
//! statements, so a user-authored ontology can stand in for the seed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ontology::{
    Assertion, AssertionObject, ClassId, DatatypeKind, IndividualId, Literal, Ontology,
    OntologyError, PropertyDecl, PropertyId, Violation,
};
use crate::parser::{parse_ontology, serialize_ontology, ParseError};
use crate::vocabulary::{parse_assignment, AssignmentError, FeatureKey, FeatureKind, FeatureMap};

pub const ROOT_CLASS: &str = "Middleware";
pub const TYPE_CLASS: &str = "Middleware_Type";
/// Annotation property carrying `key=value` profile entries.
pub const FEATURE_ANNOTATION: &str = "feature";
pub const DESCRIPTION_ANNOTATION: &str = "description";
pub const NOTE_ANNOTATION: &str = "note";

/// Canonical serialization of the seed KB, as shipped.
pub const SEED_MWO: &str = include_str!("../data/seed.mwo");
/// Table-cell provenance of every seed profile entry and matrix cell, as shipped.
pub const PROVENANCE_TSV: &str = include_str!("../data/provenance.tsv");

/// Canonical feature vector of one middleware type. Partial: only the
/// characteristics its source table states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeProfile {
    pub type_class: ClassId,
    pub features: FeatureMap,
}

pub type MatrixRow = BTreeMap<FeatureKey, bool>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    ontology: Ontology,
    profiles: BTreeMap<ClassId, TypeProfile>,
    matrix: BTreeMap<IndividualId, MatrixRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KbError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("ontology has {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("profile entry \"{text}\" on `{entity}`: {source}")]
    BadProfileEntry {
        entity: String,
        text: String,
        source: AssignmentError,
    },
    #[error("profile of `{class}` gives {key} more than once")]
    DuplicateProfileKey { class: ClassId, key: FeatureKey },
    #[error("`{0}` carries profile entries but is not a subclass of {ROOT_CLASS}")]
    NotAMiddlewareType(String),
    #[error("`{individual}` has conflicting values for {key}")]
    ConflictingMatrixValue {
        individual: IndividualId,
        key: FeatureKey,
    },
}

impl KnowledgeBase {
    /// Derives profiles and comparison matrix from a valid ontology.
    pub fn from_ontology(ontology: Ontology) -> Result<Self, KbError> {
        let violations = ontology.validate();
        if !violations.is_empty() {
            return Err(KbError::Invalid(violations));
        }

        let mut profiles: BTreeMap<ClassId, TypeProfile> = BTreeMap::new();
        for ann in ontology.annotations() {
            if ann.property.as_str() != FEATURE_ANNOTATION {
                continue;
            }
            let bad = |source| KbError::BadProfileEntry {
                entity: ann.entity.clone(),
                text: ann.text.clone(),
                source,
            };
            let (key, value) = parse_assignment(&ann.text).map_err(bad)?;
            let is_type = ontology.has_class(ROOT_CLASS)
                && ontology.is_subclass_of(&ann.entity, ROOT_CLASS).unwrap_or(false);
            if !is_type {
                return Err(KbError::NotAMiddlewareType(ann.entity.clone()));
            }
            let class = ClassId::new(ann.entity.as_str()).expect("declared class name");
            let profile = profiles.entry(class.clone()).or_insert_with(|| TypeProfile {
                type_class: class.clone(),
                features: FeatureMap::new(),
            });
            if profile.features.insert(key, value).is_some() {
                return Err(KbError::DuplicateProfileKey { class, key });
            }
        }

        let mut matrix: BTreeMap<IndividualId, MatrixRow> = BTreeMap::new();
        for a in ontology.assertions() {
            let Some(key) = FeatureKey::from_name(a.property.as_str()) else {
                continue;
            };
            let AssertionObject::Literal(Literal::Boolean(b)) = a.object else {
                continue;
            };
            if key.kind() != FeatureKind::Boolean {
                continue;
            }
            let row = matrix.entry(a.subject.clone()).or_default();
            if row.insert(key, b).is_some_and(|old| old != b) {
                return Err(KbError::ConflictingMatrixValue {
                    individual: a.subject.clone(),
                    key,
                });
            }
        }

        Ok(Self {
            ontology,
            profiles,
            matrix,
        })
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn profiles(&self) -> &BTreeMap<ClassId, TypeProfile> {
        &self.profiles
    }

    pub fn profile(&self, class: &str) -> Option<&TypeProfile> {
        self.profiles.get(class)
    }

    /// Boolean feature rows of the known technologies.
    pub fn individuals_matrix(&self) -> &BTreeMap<IndividualId, MatrixRow> {
        &self.matrix
    }
}

/// Parses MWO text into a knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    KnowledgeBase::from_ontology(parse_ontology(text)?)
}

/// Canonical MWO text of `kb`.
pub fn kb_to_document(kb: &KnowledgeBase) -> String {
    serialize_ontology(kb.ontology())
}

/// One transcribed table cell and the vocabulary entry it became.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProvenanceRecord {
    pub table: u8,
    pub subject: &'static str,
    pub row: &'static str,
    pub cell: &'static str,
    /// Feature key, or `note` for cells kept only as an annotation.
    pub feature: &'static str,
    pub value: &'static str,
}

const fn cell(
    table: u8,
    subject: &'static str,
    row: &'static str,
    cell: &'static str,
    feature: &'static str,
    value: &'static str,
) -> ProvenanceRecord {
    ProvenanceRecord {
        table,
        subject,
        row,
        cell,
        feature,
        value,
    }
}

const OOM_MESSAGE_NOTE: &str = "Message / Transaction: Supported";

/// Characteristic tables, one block per middleware type.
const PROFILE_CELLS: &[ProvenanceRecord] = &[
    cell(2, "OOM", "Request Reference", "Distributed Object", "request_reference", "distributed_object"),
    cell(2, "OOM", "Connection Point", "Client/Server Stubs", "connection_point", "client_server_stub"),
    cell(2, "OOM", "Connection Mode", "Synchronous (mainly) Asynchronous (limited)", "connection_mode", "synchronous|asynchronous"),
    cell(2, "OOM", "Scalability", "Limited", "scalability", "limited"),
    cell(2, "OOM", "Message / Transaction", "Supported", "note", OOM_MESSAGE_NOTE),
    cell(2, "OOM", "Heterogeneity", "Language \u{2013} Independent *", "heterogeneity", "language_independent"),
    cell(3, "RPC", "Request Reference", "Remote Procedure", "request_reference", "remote_procedure"),
    cell(3, "RPC", "Connection Point", "Client/Server Stubs", "connection_point", "client_server_stub"),
    cell(3, "RPC", "Connection Mode", "Synchronous", "connection_mode", "synchronous"),
    cell(3, "RPC", "Scalability", "Limited", "scalability", "limited"),
    cell(3, "RPC", "Client state", "Blocked (Mainly)", "client_state", "blocked"),
    cell(3, "RPC", "Heterogeneity", "Language \u{2013} Independent", "heterogeneity", "language_independent"),
    cell(4, "MOM", "Network communication", "Messages", "request_reference", "message"),
    cell(4, "MOM", "Connection Point", "Client/Server", "connection_point", "client_server"),
    cell(4, "MOM", "Connection Mode", "Synchronous Asynchronous", "connection_mode", "synchronous|asynchronous"),
    cell(4, "MOM", "Scalability", "Limited", "scalability", "limited"),
    cell(4, "MOM", "Heterogeneity", "Limited *", "heterogeneity", "limited"),
    cell(5, "TPM", "Request Reference", "Distributed transactions", "request_reference", "distributed_transaction"),
    cell(5, "TPM", "Connection Point", "Client/Server Component", "connection_point", "client_server_component"),
    cell(5, "TPM", "Connection Mode", "Synchronous / Asynch.", "connection_mode", "synchronous|asynchronous"),
    cell(5, "TPM", "Scalability", "High", "scalability", "high"),
    cell(5, "TPM", "Client state", "Blocked (Mainly)", "client_state", "blocked"),
    cell(5, "TPM", "Heterogeneity", "Medium *", "heterogeneity", "medium"),
    cell(6, "DBM", "Request Reference", "SQL Query", "request_reference", "sql_query"),
    cell(6, "DBM", "Connection Point", "Client/Server", "connection_point", "client_server"),
    cell(6, "DBM", "Connection Mode", "Synchronous", "connection_mode", "synchronous"),
    cell(6, "DBM", "Scalability", "High", "scalability", "high"),
    cell(6, "DBM", "Client state", "Blocked (Mainly)", "client_state", "blocked"),
    cell(6, "DBM", "Heterogeneity", "High", "heterogeneity", "high"),
    cell(7, "ABM", "Request Reference", "Messages", "request_reference", "message"),
    cell(7, "ABM", "Connection Point", "Client/Server Cooperative Agent", "connection_point", "cooperative_agent"),
    cell(7, "ABM", "Connection Mode", "Negotiation / Synchronous", "connection_mode", "negotiation|synchronous"),
    cell(7, "ABM", "Scalability", "High", "scalability", "high"),
    cell(7, "ABM", "Client state", "Unblocked", "client_state", "unblocked"),
    cell(7, "ABM", "Heterogeneity", "High", "heterogeneity", "high"),
];

/// Comparison matrix columns and the type class each technology belongs to.
pub const TECHNOLOGIES: [(&str, &str); 7] = [
    ("CORBA", "OOM"),
    ("DCOM", "OOM"),
    ("RMI", "OOM"),
    ("EJB", "OOM"),
    ("RPC", "RPC"),
    ("MOM", "MOM"),
    ("WS", "WBM"),
];

/// Matrix rows: label and one mark per technology column (`x` = checked).
const MATRIX: [(&str, FeatureKey, &str); 8] = [
    ("OS independent", FeatureKey::OsIndependent, "x.xxxxx"),
    ("Languages independent", FeatureKey::LanguageIndependent, "xx..xxx"),
    ("Data Marshaling", FeatureKey::DataMarshaling, "xxxxx.x"),
    ("Synchronous Connection", FeatureKey::SynchronousConnection, "xxxxxxx"),
    ("Asynchronous Connection", FeatureKey::AsynchronousConnection, "x....xx"),
    ("Perform Processing", FeatureKey::PerformProcessing, "xxxxx.x"),
    ("Make Storage", FeatureKey::MakeStorage, ".....x."),
    ("Programmable (Explicit Specs.)", FeatureKey::Programmable, "xxxxx.x"),
];

const CHECK: &str = "\u{221a}";
const BLANK: &str = "(blank)";

/// Column of the matrix that stands in for the web-based type's profile.
const WEB_COLUMN: usize = 6;

/// All provenance records: profile cells, matrix cells, then the web-based
/// profile derived from its matrix column.
pub fn provenance_records() -> Vec<ProvenanceRecord> {
    let mut out = PROFILE_CELLS.to_vec();
    for (row, key, marks) in MATRIX {
        for (col, mark) in marks.chars().enumerate() {
            let checked = mark == 'x';
            out.push(cell(
                8,
                TECHNOLOGIES[col].0,
                row,
                if checked { CHECK } else { BLANK },
                key.as_str(),
                if checked { "true" } else { "false" },
            ));
        }
    }
    for (row, key, marks) in MATRIX {
        let checked = marks.as_bytes()[WEB_COLUMN] == b'x';
        out.push(cell(
            8,
            "WBM",
            row,
            if checked { CHECK } else { BLANK },
            key.as_str(),
            if checked { "true" } else { "false" },
        ));
    }
    out
}

/// Tab-separated rendering of [`provenance_records`] with a header line.
pub fn provenance_tsv() -> String {
    let mut out = String::from("table\tsubject\trow\tcell\tfeature\tvalue\n");
    for r in provenance_records() {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.table, r.subject, r.row, r.cell, r.feature, r.value
        ));
    }
    out
}

const DIMENSIONS: [(&str, &str); 5] = [
    (TYPE_CLASS, "Category of a middleware product; parent of the seven type classes."),
    ("Functions", "Functionality offered by middleware services."),
    ("Protocols", "Protocols used by middleware services."),
    ("Call_Type", "How a middleware service is invoked."),
    ("Communication_Mode", "Synchronous or asynchronous communication."),
];

const TYPES: [(&str, &str); 7] = [
    ("OOM", "Object-oriented middleware: methods are invoked on remote objects through generated stubs."),
    ("RPC", "Procedural middleware: clients call procedures hosted by a remote server program."),
    ("MOM", "Message-oriented middleware: applications exchange messages by passing, queuing or publish/subscribe."),
    ("TPM", "Transaction processing monitors: coordinate distributed transactions with ACID guarantees."),
    ("DBM", "Database middleware: connects applications to local or remote databases."),
    ("ABM", "Agent-based middleware: cooperating agents adapt to dynamic, heterogeneous environments."),
    ("WBM", "Web-based middleware: services with well-defined interfaces in a service-oriented architecture."),
];

const WBM_NOTE: &str =
    "No characteristic table exists for this type; its profile is the WS column of the comparison matrix.";

fn class(name: &str) -> ClassId {
    ClassId::new(name).expect("static class name")
}

fn individual(name: &str) -> IndividualId {
    IndividualId::new(name).expect("static individual name")
}

fn property(name: &str) -> PropertyId {
    PropertyId::new(name).expect("static property name")
}

fn build_seed_ontology() -> Result<Ontology, OntologyError> {
    let mut o = Ontology::new();
    o.add_class(class(ROOT_CLASS), [])?;
    for (dim, _) in DIMENSIONS {
        o.add_class(class(dim), [class(ROOT_CLASS)])?;
    }
    for (ty, _) in TYPES {
        o.add_class(class(ty), [class(TYPE_CLASS)])?;
    }
    o.add_class(class("Characteristic_Value"), [])?;
    o.add_class(class("Connection_Mode_Value"), [class("Characteristic_Value")])?;

    for p in [DESCRIPTION_ANNOTATION, FEATURE_ANNOTATION, NOTE_ANNOTATION] {
        o.add_property(property(p), PropertyDecl::Annotation)?;
    }
    let on_middleware = |range| PropertyDecl::Object {
        domain: Some(class(ROOT_CLASS)),
        range,
    };
    o.add_property(property("HasComponent"), on_middleware(Some(class(ROOT_CLASS))))?;
    o.add_property(property("HasConnection"), on_middleware(Some(class("Connection_Mode_Value"))))?;
    o.add_property(property("HasCall"), on_middleware(None))?;
    for (_, key, _) in MATRIX {
        o.add_property(
            property(key.as_str()),
            PropertyDecl::Datatype {
                domain: Some(class(ROOT_CLASS)),
                range: Some(DatatypeKind::Boolean),
            },
        )?;
    }

    for mode in ["Synchronous", "Asynchronous", "Negotiation"] {
        o.add_individual(individual(mode), [class("Connection_Mode_Value")])?;
    }
    for (tech, ty) in TECHNOLOGIES {
        o.add_individual(individual(tech), [class(ty)])?;
    }

    for (_, key, marks) in MATRIX {
        for (col, mark) in marks.chars().enumerate() {
            let checked = mark == 'x';
            let tech = individual(TECHNOLOGIES[col].0);
            o.add_assertion(Assertion::new(
                tech.clone(),
                property(key.as_str()),
                AssertionObject::Literal(Literal::Boolean(checked)),
            ))?;
            let mode = match key {
                FeatureKey::SynchronousConnection => "Synchronous",
                FeatureKey::AsynchronousConnection => "Asynchronous",
                _ => continue,
            };
            if checked {
                o.add_assertion(Assertion::new(
                    tech,
                    property("HasConnection"),
                    AssertionObject::Individual(individual(mode)),
                ))?;
            }
        }
    }

    for r in PROFILE_CELLS {
        if r.feature == NOTE_ANNOTATION {
            o.annotate(r.subject, property(NOTE_ANNOTATION), r.value)?;
        } else {
            o.annotate(
                r.subject,
                property(FEATURE_ANNOTATION),
                format!("{}={}", r.feature, r.value),
            )?;
        }
    }
    for (_, key, marks) in MATRIX {
        let checked = marks.as_bytes()[WEB_COLUMN] == b'x';
        o.annotate("WBM", property(FEATURE_ANNOTATION), format!("{key}={checked}"))?;
    }
    o.annotate("WBM", property(NOTE_ANNOTATION), WBM_NOTE)?;

    o.annotate(ROOT_CLASS, property(DESCRIPTION_ANNOTATION), "Root of all middleware classes.")?;
    for (name, text) in DIMENSIONS.iter().chain(TYPES.iter()) {
        o.annotate(name, property(DESCRIPTION_ANNOTATION), *text)?;
    }
    Ok(o)
}

/// Builds the seed knowledge base from the transcribed tables.
pub fn build_seed_kb() -> KnowledgeBase {
    let ontology = build_seed_ontology().expect("seed ontology is consistent");
    KnowledgeBase::from_ontology(ontology).expect("seed ontology yields a knowledge base")
}

/// The seven middleware type classes of the seed, in name order.
pub fn seed_type_classes() -> BTreeSet<ClassId> {
    TYPES.iter().map(|(t, _)| class(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::FeatureValue;

    #[test]
    fn seed_is_valid() {
        let kb = build_seed_kb();
        assert_eq!(kb.ontology().validate(), vec![]);
        assert_eq!(kb.profiles().len(), 7);
        assert_eq!(kb.individuals_matrix().len(), 7);
    }

    #[test]
    fn seed_taxonomy_shape() {
        let kb = build_seed_kb();
        let o = kb.ontology();
        let top: Vec<_> = o
            .taxonomy()
            .direct_subclasses(ROOT_CLASS)
            .into_iter()
            .map(|c| c.as_str())
            .collect();
        assert_eq!(
            top,
            ["Call_Type", "Communication_Mode", "Functions", "Middleware_Type", "Protocols"]
        );
        for t in seed_type_classes() {
            assert!(o.is_subclass_of(t.as_str(), TYPE_CLASS).unwrap());
            assert!(o.is_subclass_of(t.as_str(), ROOT_CLASS).unwrap());
        }
        assert!(o.taxonomy().direct_subclasses("Functions").is_empty());
        assert!(o.taxonomy().direct_subclasses("Protocols").is_empty());
    }

    #[test]
    fn seed_instances() {
        let kb = build_seed_kb();
        let modes: Vec<_> = kb
            .ontology()
            .instances_of("Connection_Mode_Value")
            .unwrap()
            .into_iter()
            .map(|i| i.to_string())
            .collect();
        assert_eq!(modes, ["Asynchronous", "Negotiation", "Synchronous"]);
        let mw: Vec<_> = kb
            .ontology()
            .instances_of(ROOT_CLASS)
            .unwrap()
            .into_iter()
            .map(|i| i.to_string())
            .collect();
        assert_eq!(mw, ["CORBA", "DCOM", "EJB", "MOM", "RMI", "RPC", "WS"]);
    }

    #[test]
    fn dcom_not_os_independent() {
        let kb = build_seed_kb();
        assert!(!kb.individuals_matrix()["DCOM"][&FeatureKey::OsIndependent]);
    }

    #[test]
    fn oom_message_row_is_a_note() {
        let kb = build_seed_kb();
        let notes: Vec<_> = kb.ontology().annotation_values("OOM", NOTE_ANNOTATION).collect();
        assert_eq!(notes, [OOM_MESSAGE_NOTE]);
        assert_eq!(kb.profile("OOM").unwrap().features.len(), 5);
    }

    #[test]
    fn wbm_profile_is_boolean_only() {
        let kb = build_seed_kb();
        let wbm = kb.profile("WBM").unwrap();
        assert_eq!(wbm.features.len(), 8);
        assert!(wbm.features.values().all(|v| matches!(v, FeatureValue::Bool(_))));
        assert_eq!(wbm.features[&FeatureKey::MakeStorage], FeatureValue::Bool(false));
    }

    #[test]
    fn shipped_files_match_code() {
        let kb = build_seed_kb();
        assert_eq!(kb_to_document(&kb), SEED_MWO, "data/seed.mwo is stale; run `mw export --out crates/core/data/seed.mwo`");
        assert_eq!(provenance_tsv(), PROVENANCE_TSV, "data/provenance.tsv is stale; run `mw export --provenance --out crates/core/data/provenance.tsv`");
    }

    #[test]
    fn round_trip_reproduces_kb() {
        let kb = build_seed_kb();
        assert_eq!(parse_kb(&kb_to_document(&kb)).unwrap(), kb);
    }

    #[test]
    fn user_kb_errors() {
        let base = "class Middleware ; class X subclassOf Middleware ; class Other ; annotationProperty feature ;\n";
        assert!(matches!(
            parse_kb(&format!("{base}annotate X feature \"scalability=huge\" ;")),
            Err(KbError::BadProfileEntry { .. })
        ));
        assert!(matches!(
            parse_kb(&format!("{base}annotate Other feature \"scalability=high\" ;")),
            Err(KbError::NotAMiddlewareType(_))
        ));
        assert!(matches!(
            parse_kb(&format!(
                "{base}annotate X feature \"scalability=high\" ; annotate X feature \"scalability=limited\" ;"
            )),
            Err(KbError::DuplicateProfileKey { .. })
        ));
        let kb = parse_kb(&format!("{base}annotate X feature \"make_storage=true\" ;")).unwrap();
        assert_eq!(kb.profile("X").unwrap().features.len(), 1);
    }
}
