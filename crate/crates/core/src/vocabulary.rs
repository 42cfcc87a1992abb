//! The closed feature vocabulary used by service descriptions, type profiles
//! and discovery queries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    /// Exactly one value from the allowed list.
    Categorical,
    /// A non-empty subset of the allowed list, written `a|b`.
    Set,
    Boolean,
}

/// Feature keys. Variants are declared in name order so that `Ord` matches
/// lexicographic order of the key names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKey {
    AsynchronousConnection,
    ClientState,
    ConnectionMode,
    ConnectionPoint,
    DataMarshaling,
    Heterogeneity,
    LanguageIndependent,
    MakeStorage,
    OsIndependent,
    PerformProcessing,
    Programmable,
    RequestReference,
    Scalability,
    SynchronousConnection,
}

const BOOLEAN_VALUES: &[&str] = &["true", "false"];

impl FeatureKey {
    pub const ALL: [FeatureKey; 14] = [
        FeatureKey::AsynchronousConnection,
        FeatureKey::ClientState,
        FeatureKey::ConnectionMode,
        FeatureKey::ConnectionPoint,
        FeatureKey::DataMarshaling,
        FeatureKey::Heterogeneity,
        FeatureKey::LanguageIndependent,
        FeatureKey::MakeStorage,
        FeatureKey::OsIndependent,
        FeatureKey::PerformProcessing,
        FeatureKey::Programmable,
        FeatureKey::RequestReference,
        FeatureKey::Scalability,
        FeatureKey::SynchronousConnection,
    ];

    /// The boolean features, in comparison-matrix row order.
    pub const MATRIX_ROWS: [FeatureKey; 8] = [
        FeatureKey::OsIndependent,
        FeatureKey::LanguageIndependent,
        FeatureKey::DataMarshaling,
        FeatureKey::SynchronousConnection,
        FeatureKey::AsynchronousConnection,
        FeatureKey::PerformProcessing,
        FeatureKey::MakeStorage,
        FeatureKey::Programmable,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKey::AsynchronousConnection => "asynchronous_connection",
            FeatureKey::ClientState => "client_state",
            FeatureKey::ConnectionMode => "connection_mode",
            FeatureKey::ConnectionPoint => "connection_point",
            FeatureKey::DataMarshaling => "data_marshaling",
            FeatureKey::Heterogeneity => "heterogeneity",
            FeatureKey::LanguageIndependent => "language_independent",
            FeatureKey::MakeStorage => "make_storage",
            FeatureKey::OsIndependent => "os_independent",
            FeatureKey::PerformProcessing => "perform_processing",
            FeatureKey::Programmable => "programmable",
            FeatureKey::RequestReference => "request_reference",
            FeatureKey::Scalability => "scalability",
            FeatureKey::SynchronousConnection => "synchronous_connection",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == name)
    }

    pub fn kind(self) -> FeatureKind {
        match self {
            FeatureKey::RequestReference
            | FeatureKey::ConnectionPoint
            | FeatureKey::Scalability
            | FeatureKey::ClientState
            | FeatureKey::Heterogeneity => FeatureKind::Categorical,
            FeatureKey::ConnectionMode => FeatureKind::Set,
            _ => FeatureKind::Boolean,
        }
    }

    /// Allowed values in canonical order.
    pub fn allowed_values(self) -> &'static [&'static str] {
        match self {
            FeatureKey::RequestReference => &[
                "distributed_object",
                "remote_procedure",
                "message",
                "distributed_transaction",
                "sql_query",
            ],
            FeatureKey::ConnectionPoint => &[
                "client_server_stub",
                "client_server",
                "client_server_component",
                "cooperative_agent",
            ],
            // `medium` is unused by the seed profiles
            FeatureKey::Scalability => &["limited", "medium", "high"],
            FeatureKey::ClientState => &["blocked", "unblocked"],
            FeatureKey::Heterogeneity => &["language_independent", "limited", "medium", "high"],
            FeatureKey::ConnectionMode => &["synchronous", "asynchronous", "negotiation"],
            _ => BOOLEAN_VALUES,
        }
    }

    fn intern(self, value: &str) -> Option<&'static str> {
        self.allowed_values().iter().copied().find(|v| *v == value)
    }

    /// Parses `text` as a value of this key. Set values are `|`-separated.
    pub fn parse_value(self, text: &str) -> Result<FeatureValue, InvalidValue> {
        let invalid = |reason: &str| InvalidValue {
            key: self,
            value: text.to_owned(),
            reason: reason.to_owned(),
        };
        match self.kind() {
            FeatureKind::Boolean => match text {
                "true" => Ok(FeatureValue::Bool(true)),
                "false" => Ok(FeatureValue::Bool(false)),
                _ => Err(invalid("expected true or false")),
            },
            FeatureKind::Categorical => self
                .intern(text)
                .map(FeatureValue::Category)
                .ok_or_else(|| invalid("not an allowed value")),
            FeatureKind::Set => {
                let mut set = BTreeSet::new();
                for part in text.split('|') {
                    let v = self
                        .intern(part)
                        .ok_or_else(|| invalid("not an allowed value"))?;
                    if !set.insert(v) {
                        return Err(invalid("repeated value"));
                    }
                }
                Ok(FeatureValue::Set(set))
            }
        }
    }

    /// Parses `a|b|...` from already-split parts.
    pub fn parse_parts(self, parts: &[&str]) -> Result<FeatureValue, InvalidValue> {
        self.parse_value(&parts.join("|"))
    }

    pub fn is_valid(self, value: &FeatureValue) -> bool {
        match (self.kind(), value) {
            (FeatureKind::Boolean, FeatureValue::Bool(_)) => true,
            (FeatureKind::Categorical, FeatureValue::Category(v)) => self.intern(v).is_some(),
            (FeatureKind::Set, FeatureValue::Set(s)) => {
                !s.is_empty() && s.iter().all(|v| self.intern(v).is_some())
            }
            _ => false,
        }
    }
}

impl fmt::Display for FeatureKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown value '{value}' for {key}: {reason}")]
pub struct InvalidValue {
    pub key: FeatureKey,
    pub value: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown feature '{0}'")]
pub struct UnknownFeature(pub String);

/// A value of some feature. Strings are interned from the vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Category(&'static str),
    Set(BTreeSet<&'static str>),
    Bool(bool),
}

impl FeatureValue {
    pub fn kind(&self) -> FeatureKind {
        match self {
            FeatureValue::Category(_) => FeatureKind::Categorical,
            FeatureValue::Set(_) => FeatureKind::Set,
            FeatureValue::Bool(_) => FeatureKind::Boolean,
        }
    }

    /// Canonical text for `key`: set members follow vocabulary order.
    pub fn render(&self, key: FeatureKey) -> String {
        match self {
            FeatureValue::Category(v) => (*v).to_owned(),
            FeatureValue::Bool(b) => b.to_string(),
            FeatureValue::Set(set) => key
                .allowed_values()
                .iter()
                .filter(|v| set.contains(*v))
                .copied()
                .collect::<Vec<_>>()
                .join("|"),
        }
    }
}

/// Feature assignments keyed in name order.
pub type FeatureMap = BTreeMap<FeatureKey, FeatureValue>;

/// Parses a `key=value` pair against the vocabulary.
pub fn parse_assignment(text: &str) -> Result<(FeatureKey, FeatureValue), AssignmentError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| AssignmentError::Malformed(text.to_owned()))?;
    let key = FeatureKey::from_name(key.trim())
        .ok_or_else(|| UnknownFeature(key.trim().to_owned()))?;
    Ok((key, key.parse_value(value.trim())?))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AssignmentError {
    #[error("expected key=value, got '{0}'")]
    Malformed(String),
    #[error(transparent)]
    UnknownFeature(#[from] UnknownFeature),
    #[error(transparent)]
    InvalidValue(#[from] InvalidValue),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip_and_sorted() {
        for k in FeatureKey::ALL {
            assert_eq!(FeatureKey::from_name(k.as_str()), Some(k));
        }
        let names: Vec<_> = FeatureKey::ALL.iter().map(|k| k.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(
            FeatureKey::ALL.iter().filter(|k| k.kind() == FeatureKind::Boolean).count(),
            8
        );
    }

    #[test]
    fn values_unique_within_each_key() {
        for k in FeatureKey::ALL {
            let vals = k.allowed_values();
            let set: BTreeSet<_> = vals.iter().collect();
            assert_eq!(set.len(), vals.len(), "{k}");
        }
    }

    #[test]
    fn parse_values() {
        assert_eq!(
            FeatureKey::Scalability.parse_value("high"),
            Ok(FeatureValue::Category("high"))
        );
        assert!(FeatureKey::Scalability.parse_value("enormous").is_err());
        assert!(FeatureKey::Scalability.parse_value("high|limited").is_err());
        assert_eq!(
            FeatureKey::ConnectionMode
                .parse_value("asynchronous|synchronous")
                .unwrap()
                .render(FeatureKey::ConnectionMode),
            "synchronous|asynchronous"
        );
        assert!(FeatureKey::ConnectionMode.parse_value("synchronous|synchronous").is_err());
        assert!(FeatureKey::ConnectionMode.parse_value("").is_err());
        assert_eq!(FeatureKey::MakeStorage.parse_value("true"), Ok(FeatureValue::Bool(true)));
        assert!(FeatureKey::MakeStorage.parse_value("yes").is_err());
    }

    #[test]
    fn assignment_errors_name_offender() {
        let err = parse_assignment("scalability=huge").unwrap_err();
        assert!(err.to_string().starts_with("unknown value 'huge' for scalability"));
        let err = parse_assignment("speed=fast").unwrap_err();
        assert_eq!(err.to_string(), "unknown feature 'speed'");
        assert!(matches!(parse_assignment("scalability"), Err(AssignmentError::Malformed(_))));
    }
}
