//! Middleware ontology toolkit.
//!
//! * [`ontology`]: classes, individuals, properties, subsumption and validation.
//! * [`parser`]: the MWO text format for ontologies and service descriptions.
//! * [`vocabulary`]: the closed set of middleware feature keys and values.
//! * [`kb`]: the seed knowledge base of middleware types and technologies.
//! * [`classifier`]: ranks middleware types for a service description.
//! * [`discovery`]: required/preferred feature queries over types or technologies.

pub mod classifier;
pub mod discovery;
pub mod kb;
pub mod ontology;
pub mod parser;
pub mod vocabulary;

/// Exact score in `[0, 1]`.
pub type Score = num_rational::Ratio<u64>;

pub use classifier::{classify, explain, ClassificationResult, ServiceDescription, Verdict};
pub use discovery::{discover, known_technologies, DiscoveryResult, PreferenceQuery, Target};
pub use kb::{build_seed_kb, kb_to_document, KnowledgeBase, TypeProfile};
pub use ontology::{ClassId, IndividualId, Ontology, PropertyId};
pub use parser::{parse_document, parse_ontology, parse_service, serialize, Document, ParseError};
