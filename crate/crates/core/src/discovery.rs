//! Preference queries over the knowledge base.
//!
//! Required features filter candidates by exact match; preferred features
//! rank the survivors by a weighted mean of per-feature matches. A preferred
//! key the candidate says nothing about is ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::classifier::feature_match;
use crate::kb::KnowledgeBase;
use crate::ontology::{IndividualId, OntologyError};
use crate::vocabulary::{FeatureKey, FeatureKind, FeatureMap, FeatureValue};
use crate::Score;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Target {
    /// Middleware type profiles.
    #[default]
    Types,
    /// Technologies of the comparison matrix.
    Individuals,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::Types => "types",
            Target::Individuals => "individuals",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "types" => Some(Target::Types),
            "individuals" => Some(Target::Individuals),
            _ => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preference {
    pub value: FeatureValue,
    pub weight: Score,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("{key} is required as {required} but preferred as {preferred}")]
    Conflicting {
        key: FeatureKey,
        required: String,
        preferred: String,
    },
    #[error("{key} is given twice with different values")]
    Repeated { key: FeatureKey },
    #[error("weight for {key} must be positive")]
    NonPositiveWeight { key: FeatureKey },
    #[error("value for {key} has the wrong kind")]
    InvalidValue { key: FeatureKey },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreferenceQuery {
    required: FeatureMap,
    preferred: BTreeMap<FeatureKey, Preference>,
}

impl PreferenceQuery {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn required(&self) -> &FeatureMap {
        &self.required
    }

    pub fn preferred(&self) -> &BTreeMap<FeatureKey, Preference> {
        &self.preferred
    }

    pub fn require(&mut self, key: FeatureKey, value: FeatureValue) -> Result<&mut Self, QueryError> {
        if !key.is_valid(&value) {
            return Err(QueryError::InvalidValue { key });
        }
        if let Some(p) = self.preferred.get(&key) {
            if p.value != value {
                return Err(conflict(key, &value, &p.value));
            }
        }
        match self.required.get(&key) {
            Some(old) if *old != value => Err(QueryError::Repeated { key }),
            _ => {
                self.required.insert(key, value);
                Ok(self)
            }
        }
    }

    pub fn prefer(
        &mut self,
        key: FeatureKey,
        value: FeatureValue,
        weight: Score,
    ) -> Result<&mut Self, QueryError> {
        if !key.is_valid(&value) {
            return Err(QueryError::InvalidValue { key });
        }
        if weight.is_zero() {
            return Err(QueryError::NonPositiveWeight { key });
        }
        if let Some(r) = self.required.get(&key) {
            if *r != value {
                return Err(conflict(key, r, &value));
            }
        }
        match self.preferred.get(&key) {
            Some(old) if old.value != value => Err(QueryError::Repeated { key }),
            _ => {
                self.preferred.insert(key, Preference { value, weight });
                Ok(self)
            }
        }
    }

    fn keys(&self) -> impl Iterator<Item = FeatureKey> + '_ {
        self.required.keys().chain(self.preferred.keys()).copied()
    }
}

fn conflict(key: FeatureKey, required: &FeatureValue, preferred: &FeatureValue) -> QueryError {
    QueryError::Conflicting {
        key,
        required: required.render(key),
        preferred: preferred.render(key),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Match {
    pub entity: String,
    pub score: Score,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveryResult {
    pub target: Target,
    pub matches: Vec<Match>,
}

impl DiscoveryResult {
    pub fn entities(&self) -> Vec<&str> {
        self.matches.iter().map(|m| m.entity.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiscoveryError {
    #[error("no {target} candidate states {key}; the requirement can never be met")]
    UnsatisfiableRequired { key: FeatureKey, target: Target },
    #[error("{key} is not a boolean feature; technologies are described by boolean features only")]
    NonBooleanKey { key: FeatureKey },
}

fn candidates(kb: &KnowledgeBase, target: Target) -> Vec<(String, FeatureMap)> {
    match target {
        Target::Types => kb
            .profiles()
            .values()
            .map(|p| (p.type_class.to_string(), p.features.clone()))
            .collect(),
        Target::Individuals => kb
            .individuals_matrix()
            .iter()
            .map(|(ind, row)| {
                let features = row.iter().map(|(k, b)| (*k, FeatureValue::Bool(*b))).collect();
                (ind.to_string(), features)
            })
            .collect(),
    }
}

fn matches_exactly(key: FeatureKey, want: &FeatureValue, have: Option<&FeatureValue>) -> bool {
    have.and_then(|h| feature_match(key, want, h).ok())
        .is_some_and(|m| m.is_one())
}

/// Weighted mean match over the preferred keys present in `features`;
/// 1 when none are present.
pub fn preference_score(query: &PreferenceQuery, features: &FeatureMap) -> Score {
    let mut total = Score::zero();
    let mut weights = Score::zero();
    for (key, pref) in &query.preferred {
        if let Some(have) = features.get(key) {
            let m = feature_match(*key, &pref.value, have).unwrap_or_else(|_| Score::zero());
            total += m * pref.weight;
            weights += pref.weight;
        }
    }
    if weights.is_zero() {
        Score::one()
    } else {
        total / weights
    }
}

pub fn discover(
    kb: &KnowledgeBase,
    query: &PreferenceQuery,
    target: Target,
) -> Result<DiscoveryResult, DiscoveryError> {
    if target == Target::Individuals {
        if let Some(key) = query.keys().find(|k| k.kind() != FeatureKind::Boolean) {
            return Err(DiscoveryError::NonBooleanKey { key });
        }
    }
    let pool = candidates(kb, target);
    for key in query.required.keys() {
        if !pool.iter().any(|(_, f)| f.contains_key(key)) {
            return Err(DiscoveryError::UnsatisfiableRequired { key: *key, target });
        }
    }
    let mut matches: Vec<Match> = pool
        .into_iter()
        .filter(|(_, features)| {
            query
                .required
                .iter()
                .all(|(k, want)| matches_exactly(*k, want, features.get(k)))
        })
        .map(|(entity, features)| Match {
            score: preference_score(query, &features),
            entity,
        })
        .collect();
    matches.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.entity.cmp(&b.entity)));
    Ok(DiscoveryResult { target, matches })
}

/// Comparison-matrix technologies that are instances of `type_class`.
pub fn known_technologies(
    kb: &KnowledgeBase,
    type_class: &str,
) -> Result<BTreeSet<IndividualId>, OntologyError> {
    let instances = kb.ontology().instances_of(type_class)?;
    Ok(instances
        .into_iter()
        .filter(|i| kb.individuals_matrix().contains_key(i))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::build_seed_kb;

    fn b(v: bool) -> FeatureValue {
        FeatureValue::Bool(v)
    }

    #[test]
    fn conflicting_requirement_and_preference() {
        let mut q = PreferenceQuery::new();
        q.require(FeatureKey::MakeStorage, b(true)).unwrap();
        assert!(matches!(
            q.prefer(FeatureKey::MakeStorage, b(false), Score::one()),
            Err(QueryError::Conflicting { .. })
        ));
        q.prefer(FeatureKey::MakeStorage, b(true), Score::one()).unwrap();
        assert!(matches!(
            q.prefer(FeatureKey::Programmable, b(true), Score::zero()),
            Err(QueryError::NonPositiveWeight { .. })
        ));
        assert!(matches!(
            q.require(FeatureKey::Scalability, b(true)),
            Err(QueryError::InvalidValue { .. })
        ));
    }

    #[test]
    fn unsatisfiable_is_distinct_from_empty() {
        let kb = build_seed_kb();
        let mut q = PreferenceQuery::new();
        q.require(FeatureKey::Scalability, FeatureKey::Scalability.parse_value("medium").unwrap())
            .unwrap();
        // every categorical profile states scalability, none as medium
        assert!(discover(&kb, &q, Target::Types).unwrap().matches.is_empty());

        let mut q = PreferenceQuery::new();
        q.require(FeatureKey::MakeStorage, b(true)).unwrap();
        q.require(FeatureKey::ClientState, FeatureKey::ClientState.parse_value("blocked").unwrap())
            .unwrap();
        // only WBM states make_storage, and it states no client_state
        assert!(discover(&kb, &q, Target::Types).unwrap().matches.is_empty());
    }

    #[test]
    fn unsatisfiable_required_key() {
        let kb = build_seed_kb();
        let mut q = PreferenceQuery::new();
        q.require(FeatureKey::Scalability, FeatureKey::Scalability.parse_value("high").unwrap())
            .unwrap();
        assert!(matches!(
            discover(&kb, &q, Target::Individuals),
            Err(DiscoveryError::NonBooleanKey { .. })
        ));
        let kb = crate::kb::parse_kb(
            "class Middleware ; class X subclassOf Middleware ; annotationProperty feature ;\n\
             annotate X feature \"make_storage=true\" ;",
        )
        .unwrap();
        assert_eq!(
            discover(&kb, &q, Target::Types),
            Err(DiscoveryError::UnsatisfiableRequired {
                key: FeatureKey::Scalability,
                target: Target::Types
            })
        );
    }

    #[test]
    fn preferences_rank_individuals() {
        let kb = build_seed_kb();
        let mut q = PreferenceQuery::new();
        q.prefer(FeatureKey::AsynchronousConnection, b(true), Score::from_integer(3))
            .unwrap();
        q.prefer(FeatureKey::MakeStorage, b(true), Score::one()).unwrap();
        let r = discover(&kb, &q, Target::Individuals).unwrap();
        assert_eq!(r.matches[0].entity, "MOM");
        assert_eq!(r.matches[0].score, Score::one());
        // CORBA and WS: async matches (3), storage does not (1) -> 3/4
        assert_eq!(r.matches[1].entity, "CORBA");
        assert_eq!(r.matches[1].score, Score::new(3, 4));
        assert_eq!(r.matches[2].entity, "WS");
        assert_eq!(r.matches.last().unwrap().score, Score::zero());
    }
}
