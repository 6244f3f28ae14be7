//! Translating organisational observations into model parameters:
//! weighted-factor loyalty scores, dependency coefficients from criticality
//! records, team cohesion, effective bargaining power, and the loyalty gap
//! used to flag intervention candidates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TranslationError {
    #[error("factor weights must sum to 1 (got {0})")]
    WeightSumInvalid(f64),
    #[error("negative weight for factor `{0}`")]
    NegativeWeight(String),
    #[error("duplicate factor `{0}`")]
    DuplicateFactor(String),
    #[error("member `{member}` is missing factor `{factor}`")]
    MissingFactor { member: String, factor: String },
    #[error("member `{member}` has unknown factor `{factor}`")]
    UnknownFactor { member: String, factor: String },
    #[error("score {value} for factor `{factor}` outside [0, 1]")]
    ScoreOutOfRange { factor: String, value: f64 },
    #[error("no dependency records")]
    EmptyRecords,
    #[error("criticality {0} outside [0, 1]")]
    CriticalityOutOfRange(f64),
    #[error("all criticalities are zero")]
    ZeroTotalCriticality,
    #[error("weight and loyalty maps cover different members")]
    MemberSetMismatch,
    #[error("dependency weights sum to zero")]
    ZeroTotalWeight,
    #[error("value {value} for `{name}` outside {range}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },
}

/// Named, normalised factor weights for loyalty scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(String, f64)>", into = "Vec<(String, f64)>")]
pub struct FactorWeights {
    entries: Vec<(String, f64)>,
}

impl TryFrom<Vec<(String, f64)>> for FactorWeights {
    type Error = TranslationError;
    fn try_from(entries: Vec<(String, f64)>) -> Result<Self, TranslationError> {
        FactorWeights::new(entries)
    }
}

impl From<FactorWeights> for Vec<(String, f64)> {
    fn from(w: FactorWeights) -> Self {
        w.entries
    }
}

impl FactorWeights {
    pub fn new(entries: Vec<(String, f64)>) -> Result<Self, TranslationError> {
        let mut seen = BTreeMap::new();
        let mut total = 0.0;
        for (name, weight) in &entries {
            if !weight.is_finite() || *weight < 0.0 {
                return Err(TranslationError::NegativeWeight(name.clone()));
            }
            if seen.insert(name.clone(), ()).is_some() {
                return Err(TranslationError::DuplicateFactor(name.clone()));
            }
            total += weight;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(TranslationError::WeightSumInvalid(total));
        }
        Ok(Self { entries })
    }

    /// Calibration for human teams: tenure 0.30, social integration 0.35,
    /// role criticality 0.20, expressed commitment 0.15.
    pub fn human_team() -> Self {
        Self {
            entries: vec![
                ("tenure".into(), 0.30),
                ("social_integration".into(), 0.35),
                ("role_criticality".into(), 0.20),
                ("expressed_commitment".into(), 0.15),
            ],
        }
    }

    /// Calibration for computational agents: training alignment 0.35,
    /// architecture integration 0.30, objective overlap 0.20, interaction
    /// history 0.15.
    pub fn computational_agent() -> Self {
        Self {
            entries: vec![
                ("training_alignment".into(), 0.35),
                ("architecture_integration".into(), 0.30),
                ("objective_overlap".into(), 0.20),
                ("interaction_history".into(), 0.15),
            ],
        }
    }

    /// Look up a named preset.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "human" => Some(Self::human_team()),
            "agent" => Some(Self::computational_agent()),
            _ => None,
        }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }
}

/// One member's factor scores, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberFactors {
    pub member_id: String,
    pub scores: Vec<(String, f64)>,
}

impl MemberFactors {
    pub fn new(member_id: impl Into<String>, scores: Vec<(String, f64)>) -> Self {
        Self {
            member_id: member_id.into(),
            scores,
        }
    }
}

/// Weighted-sum loyalty score; every weighted factor must appear exactly
/// once and every score must lie in `[0, 1]`, so the result does too.
pub fn loyalty_score(
    factors: &MemberFactors,
    weights: &FactorWeights,
) -> Result<f64, TranslationError> {
    let mut scores = BTreeMap::new();
    for (name, value) in &factors.scores {
        if !value.is_finite() || !(0.0..=1.0).contains(value) {
            return Err(TranslationError::ScoreOutOfRange {
                factor: name.clone(),
                value: *value,
            });
        }
        if scores.insert(name.as_str(), *value).is_some() {
            return Err(TranslationError::DuplicateFactor(name.clone()));
        }
    }
    let mut total = 0.0;
    for (name, weight) in weights.entries() {
        let score =
            scores
                .remove(name.as_str())
                .ok_or_else(|| TranslationError::MissingFactor {
                    member: factors.member_id.clone(),
                    factor: name.clone(),
                })?;
        total += weight * score;
    }
    if let Some((factor, _)) = scores.into_iter().next() {
        return Err(TranslationError::UnknownFactor {
            member: factors.member_id.clone(),
            factor: factor.to_string(),
        });
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Tenure score `min(1, months / 24)`.
pub fn tenure_score(months: f64) -> f64 {
    (months / 24.0).clamp(0.0, 1.0)
}

/// Loyalty from goal weights: `team / (team + self)`.
pub fn goal_weight_loyalty(team_weight: f64, self_weight: f64) -> Result<f64, TranslationError> {
    for (name, v) in [("team_weight", team_weight), ("self_weight", self_weight)] {
        if !v.is_finite() || v < 0.0 {
            return Err(TranslationError::OutOfRange {
                name,
                range: "[0, inf)",
                value: v,
            });
        }
    }
    let total = team_weight + self_weight;
    if total <= 0.0 {
        return Err(TranslationError::ZeroTotalWeight);
    }
    Ok(team_weight / total)
}

/// One dependency from a strategic-dependency model: the team depends on
/// `dependee` for `dependum` with the given criticality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependencyRecord {
    pub dependee: String,
    pub dependum: String,
    pub criticality: f64,
}

impl DependencyRecord {
    pub fn new(dependee: impl Into<String>, dependum: impl Into<String>, criticality: f64) -> Self {
        Self {
            dependee: dependee.into(),
            dependum: dependum.into(),
            criticality,
        }
    }
}

/// Per-member dependency coefficients: each member's share of total
/// criticality. The result is a probability vector over members.
pub fn dependency_coefficients(
    records: &[DependencyRecord],
) -> Result<BTreeMap<String, f64>, TranslationError> {
    if records.is_empty() {
        return Err(TranslationError::EmptyRecords);
    }
    let mut sums: BTreeMap<String, f64> = BTreeMap::new();
    let mut total = 0.0;
    for record in records {
        if !record.criticality.is_finite() || !(0.0..=1.0).contains(&record.criticality) {
            return Err(TranslationError::CriticalityOutOfRange(record.criticality));
        }
        *sums.entry(record.dependee.clone()).or_insert(0.0) += record.criticality;
        total += record.criticality;
    }
    if total <= 0.0 {
        return Err(TranslationError::ZeroTotalCriticality);
    }
    for value in sums.values_mut() {
        *value /= total;
    }
    Ok(sums)
}

/// Dependency-weighted average loyalty. Lies between the minimum and
/// maximum member loyalty, and is invariant to rescaling all weights.
pub fn team_cohesion(
    dependency_weights: &BTreeMap<String, f64>,
    loyalties: &BTreeMap<String, f64>,
) -> Result<f64, TranslationError> {
    if dependency_weights.len() != loyalties.len()
        || !dependency_weights.keys().eq(loyalties.keys())
    {
        return Err(TranslationError::MemberSetMismatch);
    }
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (member, weight) in dependency_weights {
        if !weight.is_finite() || *weight < 0.0 {
            return Err(TranslationError::OutOfRange {
                name: "dependency_weight",
                range: "[0, inf)",
                value: *weight,
            });
        }
        let theta = loyalties[member];
        if !theta.is_finite() || !(0.0..=1.0).contains(&theta) {
            return Err(TranslationError::OutOfRange {
                name: "loyalty",
                range: "[0, 1]",
                value: theta,
            });
        }
        weighted += weight * theta;
        total += weight;
    }
    if total <= 0.0 {
        return Err(TranslationError::ZeroTotalWeight);
    }
    Ok(weighted / total)
}

/// Effective bargaining power: baseline power scaled by cohesion.
pub fn effective_bargaining_power(base: f64, cohesion: f64) -> Result<f64, TranslationError> {
    if !base.is_finite() || base < 0.0 {
        return Err(TranslationError::OutOfRange {
            name: "base",
            range: "[0, inf)",
            value: base,
        });
    }
    if !cohesion.is_finite() || !(0.0..=1.0).contains(&cohesion) {
        return Err(TranslationError::OutOfRange {
            name: "cohesion",
            range: "[0, 1]",
            value: cohesion,
        });
    }
    Ok(base * cohesion)
}

/// Gap threshold above which a member is an intervention candidate.
pub const INTERVENTION_GAP_THRESHOLD: f64 = 0.3;

/// Loyalty gap `target - observed`; may be negative.
pub fn loyalty_gap(target: f64, observed: f64) -> Result<f64, TranslationError> {
    for (name, v) in [("target", target), ("observed", observed)] {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(TranslationError::OutOfRange {
                name,
                range: "[0, 1]",
                value: v,
            });
        }
    }
    Ok(target - observed)
}

/// Whether a gap is large enough to flag the member for loyalty-building
/// interventions.
pub fn is_intervention_candidate(gap: f64) -> bool {
    gap > INTERVENTION_GAP_THRESHOLD
}
