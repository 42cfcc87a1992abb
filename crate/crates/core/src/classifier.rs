//! Scores a service description against every type profile and ranks the
//! middleware types.
//!
//! Scores are exact rationals: the unweighted mean of per-feature matches over
//! the keys present in both the service and the profile. Categorical and
//! boolean features match 1 or 0; `connection_mode` sets match by Jaccard
//! similarity.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::kb::{KnowledgeBase, TypeProfile};
use crate::ontology::{ClassId, IndividualId};
use crate::vocabulary::{FeatureKey, FeatureMap, FeatureValue, InvalidValue};
use crate::Score;

/// A named service with asserted feature values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceDescription {
    name: IndividualId,
    features: FeatureMap,
}

impl ServiceDescription {
    /// Values are expected to come from [`FeatureKey::parse_value`]; use
    /// [`ServiceDescription::checked`] for hand-built maps.
    pub fn new(name: IndividualId, features: FeatureMap) -> Self {
        Self { name, features }
    }

    pub fn checked(name: IndividualId, features: FeatureMap) -> Result<Self, InvalidValue> {
        for (key, value) in &features {
            if !key.is_valid(value) {
                return Err(InvalidValue {
                    key: *key,
                    value: format!("{value:?}"),
                    reason: "wrong kind or value".into(),
                });
            }
        }
        Ok(Self { name, features })
    }

    pub fn name(&self) -> &IndividualId {
        &self.name
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("values for {key} have different kinds")]
pub struct KindMismatch {
    pub key: FeatureKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("service `{0}` asserts no features")]
    EmptyService(IndividualId),
}

/// Match of one feature: equality for categorical/boolean values, Jaccard
/// similarity for sets.
pub fn feature_match(
    key: FeatureKey,
    service_value: &FeatureValue,
    profile_value: &FeatureValue,
) -> Result<Score, KindMismatch> {
    match (service_value, profile_value) {
        (FeatureValue::Category(a), FeatureValue::Category(b)) => Ok(indicator(a == b)),
        (FeatureValue::Bool(a), FeatureValue::Bool(b)) => Ok(indicator(a == b)),
        (FeatureValue::Set(a), FeatureValue::Set(b)) => {
            let union = a.union(b).count() as u64;
            if union == 0 {
                return Ok(Score::one());
            }
            Ok(Score::new(a.intersection(b).count() as u64, union))
        }
        _ => Err(KindMismatch { key }),
    }
}

fn indicator(b: bool) -> Score {
    if b {
        Score::one()
    } else {
        Score::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureContribution {
    pub key: FeatureKey,
    pub service_value: FeatureValue,
    pub profile_value: FeatureValue,
    pub contribution: Score,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedType {
    pub type_class: ClassId,
    pub score: Score,
    pub comparable: usize,
    pub matched: Vec<FeatureContribution>,
}

fn contributions(features: &FeatureMap, profile: &TypeProfile) -> Vec<FeatureContribution> {
    features
        .iter()
        .filter_map(|(key, sv)| {
            let pv = profile.features.get(key)?;
            // kinds always agree for vocabulary-valid values
            let contribution = feature_match(*key, sv, pv).unwrap_or_else(|_| Score::zero());
            Some(FeatureContribution {
                key: *key,
                service_value: sv.clone(),
                profile_value: pv.clone(),
                contribution,
            })
        })
        .collect()
}

fn mean(contribs: &[FeatureContribution]) -> Score {
    if contribs.is_empty() {
        return Score::zero();
    }
    let sum = contribs
        .iter()
        .fold(Score::zero(), |acc, c| acc + c.contribution);
    sum / Score::from_integer(contribs.len() as u64)
}

/// Mean match over the keys shared by `service` and `profile`, and the
/// number of shared keys. Zero when nothing is comparable.
pub fn score(service: &ServiceDescription, profile: &TypeProfile) -> (Score, usize) {
    let c = contributions(&service.features, profile);
    (mean(&c), c.len())
}

/// Thresholds applied to the top of the ranking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierConfig {
    /// Top scores strictly below this are `Unclassified`.
    pub min_score: Score,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            min_score: Score::new(1, 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Classified(ClassId),
    Ambiguous(Vec<ClassId>),
    Unclassified,
}

impl Verdict {
    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Classified(_) => "Classified",
            Verdict::Ambiguous(_) => "Ambiguous",
            Verdict::Unclassified => "Unclassified",
        }
    }

    pub fn types(&self) -> Vec<&ClassId> {
        match self {
            Verdict::Classified(c) => vec![c],
            Verdict::Ambiguous(cs) => cs.iter().collect(),
            Verdict::Unclassified => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationResult {
    pub service: IndividualId,
    pub ranking: Vec<RankedType>,
    pub verdict: Verdict,
}

/// Ranking order: score descending, then comparable count descending, then
/// class name ascending.
pub fn ranking_order(a: &RankedType, b: &RankedType) -> Ordering {
    b.score
        .cmp(&a.score)
        .then(b.comparable.cmp(&a.comparable))
        .then_with(|| a.type_class.cmp(&b.type_class))
}

pub fn classify(
    kb: &KnowledgeBase,
    service: &ServiceDescription,
) -> Result<ClassificationResult, ClassifyError> {
    classify_with(kb, service, &ClassifierConfig::default())
}

pub fn classify_with(
    kb: &KnowledgeBase,
    service: &ServiceDescription,
    config: &ClassifierConfig,
) -> Result<ClassificationResult, ClassifyError> {
    rank_profiles(kb.profiles().values(), service, config)
}

/// Classification against an arbitrary profile set.
pub fn rank_profiles<'a>(
    profiles: impl IntoIterator<Item = &'a TypeProfile>,
    service: &ServiceDescription,
    config: &ClassifierConfig,
) -> Result<ClassificationResult, ClassifyError> {
    if service.is_empty() {
        return Err(ClassifyError::EmptyService(service.name.clone()));
    }
    let mut ranking: Vec<RankedType> = profiles
        .into_iter()
        .map(|profile| {
            let matched = contributions(&service.features, profile);
            RankedType {
                type_class: profile.type_class.clone(),
                score: mean(&matched),
                comparable: matched.len(),
                matched,
            }
        })
        .collect();
    ranking.sort_by(ranking_order);

    let verdict = match ranking.first() {
        None => Verdict::Unclassified,
        Some(top) if top.comparable == 0 || top.score < config.min_score => Verdict::Unclassified,
        Some(top) => {
            let tied: Vec<ClassId> = ranking
                .iter()
                .take_while(|r| r.score == top.score && r.comparable == top.comparable)
                .map(|r| r.type_class.clone())
                .collect();
            if tied.len() > 1 {
                Verdict::Ambiguous(tied)
            } else {
                Verdict::Classified(top.type_class.clone())
            }
        }
    };
    Ok(ClassificationResult {
        service: service.name.clone(),
        ranking,
        verdict,
    })
}

/// Decimal rendering rounded half-up, e.g. `4/15` to 2 places is `0.27`.
pub fn format_score(score: &Score, places: u32) -> String {
    let scale = 10u128.pow(places);
    let numer = *score.numer() as u128;
    let denom = *score.denom() as u128;
    let scaled = (2 * numer * scale + denom) / (2 * denom);
    let int = scaled / scale;
    if places == 0 {
        return int.to_string();
    }
    format!(
        "{int}.{:0width$}",
        scaled % scale,
        width = places as usize
    )
}

/// One-line verdict, e.g. `Classified: MOM (score 1.00)`.
pub fn verdict_line(result: &ClassificationResult) -> String {
    let top = result
        .ranking
        .first()
        .map(|r| format_score(&r.score, 2))
        .unwrap_or_else(|| format_score(&Score::zero(), 2));
    match &result.verdict {
        Verdict::Classified(c) => format!("Classified: {c} (score {top})"),
        Verdict::Ambiguous(cs) => {
            let names: Vec<&str> = cs.iter().map(ClassId::as_str).collect();
            format!("Ambiguous: {} (score {top})", names.join(", "))
        }
        Verdict::Unclassified => format!("Unclassified (top score {top})"),
    }
}

/// Per-type, per-feature contribution table.
pub fn explain(result: &ClassificationResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "service {}: {}", result.service, verdict_line(result));
    for r in &result.ranking {
        let _ = writeln!(
            out,
            "{}  score {} ({}), {} comparable",
            r.type_class,
            r.score,
            format_score(&r.score, 2),
            r.comparable
        );
        let key_width = r.matched.iter().map(|m| m.key.as_str().len()).max().unwrap_or(0);
        for m in &r.matched {
            let _ = writeln!(
                out,
                "  {:<key_width$}  service={}  profile={}  match={}",
                m.key.as_str(),
                m.service_value.render(m.key),
                m.profile_value.render(m.key),
                m.contribution,
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(key: FeatureKey, text: &str) -> FeatureValue {
        key.parse_value(text).unwrap()
    }

    #[test]
    fn equal_categories_match() {
        let k = FeatureKey::Scalability;
        assert_eq!(feature_match(k, &v(k, "high"), &v(k, "high")), Ok(Score::one()));
        let k = FeatureKey::RequestReference;
        assert_eq!(
            feature_match(k, &v(k, "sql_query"), &v(k, "message")),
            Ok(Score::zero())
        );
    }

    #[test]
    fn jaccard_of_nested_sets() {
        let k = FeatureKey::ConnectionMode;
        assert_eq!(
            feature_match(k, &v(k, "synchronous"), &v(k, "synchronous|asynchronous")),
            Ok(Score::new(1, 2))
        );
    }

    #[test]
    fn kind_mismatch_detected() {
        let k = FeatureKey::Scalability;
        assert_eq!(
            feature_match(k, &FeatureValue::Bool(true), &v(k, "high")),
            Err(KindMismatch { key: k })
        );
    }

    #[test]
    fn format_rounding() {
        assert_eq!(format_score(&Score::one(), 2), "1.00");
        assert_eq!(format_score(&Score::new(4, 15), 2), "0.27");
        assert_eq!(format_score(&Score::new(1, 8), 2), "0.13");
        assert_eq!(format_score(&Score::new(1, 3), 2), "0.33");
        assert_eq!(format_score(&Score::new(2, 3), 0), "1");
        assert_eq!(format_score(&Score::zero(), 2), "0.00");
    }

    #[test]
    fn checked_rejects_wrong_kind() {
        let mut f = FeatureMap::new();
        f.insert(FeatureKey::Scalability, FeatureValue::Bool(true));
        assert!(ServiceDescription::checked(IndividualId::new("S").unwrap(), f).is_err());
    }
}
