//! Scenario files, case-study execution, and counterfactual analysis.
//!
//! A scenario is a versioned TOML document with a production environment,
//! mechanism strengths, exactly one loyalty source (an explicit profile or
//! member factor tables plus weights), optional dependency records, and
//! optional historical phases with expected effort ranks.
//!
//! Case studies solve the symmetric equilibrium per phase and compare the
//! *uncapped* closed-form effort predictions against the expected ranking;
//! the capped solver efforts saturate at the effort cap for strongly
//! incentivised phases and are reported alongside. A four-category rubric
//! (convergence 3, magnitude ranking 4, pattern 4, trend 4 per phase)
//! produces the 0-60 score used in the validation summary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{
    solve_tpe, symmetric_equilibrium_unclamped, EquilibriumResult, SolverSettings,
};
use crate::extended::{solve_extended_tpe, ExtendedStrengths};
use crate::model::{output_of_total, LoyaltyProfile, MechanismStrengths, ModelError, TeamConfig};
use crate::stats::{pearson_r, spearman_rho, StatsError};
use crate::translation::{
    dependency_coefficients, loyalty_score, team_cohesion, DependencyRecord, FactorWeights,
    MemberFactors, TranslationError,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("TOML parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Translation(#[from] TranslationError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

// ---------------------------------------------------------------------------
// Raw file format
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema: u32,
    name: String,
    config: RawConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    mechanisms: Option<RawMechanisms>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extended_mechanisms: Option<RawExtended>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loyalty: Option<RawLoyalty>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    members: Vec<RawMember>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dependencies: Vec<RawDependency>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    phases: Vec<RawPhase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    productivity: f64,
    returns_exponent: f64,
    effort_cost: f64,
    team_size: usize,
    effort_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMechanisms {
    loyalty_benefit: f64,
    cost_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtended {
    internalization: f64,
    warm_glow: f64,
    cost_tolerance: f64,
    guilt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLoyalty {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<(String, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMember {
    id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    factors: Option<BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loyalty_override: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dependency_weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDependency {
    dependee: String,
    dependum: String,
    criticality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPhase {
    name: String,
    mean_loyalty: f64,
    expected_rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    team_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    productivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    returns_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    effort_cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    effort_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cohesion: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference_prediction: Option<f64>,
}

// ---------------------------------------------------------------------------
// Validated scenario
// ---------------------------------------------------------------------------

/// Mechanism parameterisation: the consolidated two-mechanism form or the
/// four-mechanism decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Mechanisms {
    Consolidated(MechanismStrengths),
    Extended(ExtendedStrengths),
}

/// One team member after validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub id: String,
    /// Weighted-sum loyalty from the factor table, when factors were given.
    pub factor_score: Option<f64>,
    /// Documented override taking precedence over the factor score.
    pub loyalty_override: Option<f64>,
    /// Loyalty actually used for this member.
    pub loyalty: f64,
    pub dependency_weight: Option<f64>,
}

/// One historical phase with its own production environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub name: String,
    pub config: TeamConfig,
    pub mean_loyalty: f64,
    /// Expected effort rank among the phases, `1` = lowest.
    pub expected_rank: usize,
    pub cohesion: Option<f64>,
    pub reference_prediction: Option<f64>,
}

/// A fully validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub config: TeamConfig,
    pub mechanisms: Mechanisms,
    pub members: Vec<Member>,
    pub loyalties: LoyaltyProfile,
    pub dependencies: Vec<DependencyRecord>,
    pub phases: Vec<Phase>,
    raw: ScenarioFile,
}

impl Scenario {
    /// Consolidated strengths when available.
    pub fn consolidated(&self) -> Option<&MechanismStrengths> {
        match &self.mechanisms {
            Mechanisms::Consolidated(m) => Some(m),
            Mechanisms::Extended(_) => None,
        }
    }

    /// Solves the scenario's own equilibrium (team-level, heterogeneous
    /// loyalties).
    pub fn solve(&self, settings: &SolverSettings) -> Result<EquilibriumResult, ModelError> {
        match &self.mechanisms {
            Mechanisms::Consolidated(m) => solve_tpe(&self.config, m, &self.loyalties, settings),
            Mechanisms::Extended(e) => {
                solve_extended_tpe(&self.config, e, &self.loyalties, settings)
            }
        }
    }

    /// Dependency-weighted cohesion from member weights and loyalties, when
    /// every member carries a dependency weight.
    pub fn cohesion(&self) -> Option<Result<f64, TranslationError>> {
        if self.members.is_empty() || self.members.iter().any(|m| m.dependency_weight.is_none()) {
            return None;
        }
        let weights: BTreeMap<String, f64> = self
            .members
            .iter()
            .map(|m| (m.id.clone(), m.dependency_weight.unwrap()))
            .collect();
        let loyalties: BTreeMap<String, f64> = self
            .members
            .iter()
            .map(|m| (m.id.clone(), m.loyalty))
            .collect();
        Some(team_cohesion(&weights, &loyalties))
    }

    /// Dependency coefficients from the scenario's criticality records.
    pub fn dependency_coefficients(
        &self,
    ) -> Option<Result<BTreeMap<String, f64>, TranslationError>> {
        if self.dependencies.is_empty() {
            None
        } else {
            Some(dependency_coefficients(&self.dependencies))
        }
    }

    /// Serialises back to the scenario file format.
    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string_pretty(&self.raw).map_err(|e| ScenarioError::Schema(e.to_string()))
    }
}

/// Scenario sources shipped with the crate.
pub fn builtin_scenario(name: &str) -> Option<&'static str> {
    match name {
        "team_t" => Some(include_str!("../scenarios/team_t.toml")),
        "system_s" => Some(include_str!("../scenarios/system_s.toml")),
        "apache" => Some(include_str!("../scenarios/apache.toml")),
        _ => None,
    }
}

/// Loads and validates a scenario from a file.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parses and validates a scenario from TOML text. Syntax problems, schema
/// problems and invariant violations are reported as distinct errors.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    // syntax first, so a malformed document is a parse error not a schema one
    let _: toml::Value = toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let raw: ScenarioFile =
        toml::from_str(text).map_err(|e| ScenarioError::Schema(e.to_string()))?;
    validate(raw)
}

fn validate(raw: ScenarioFile) -> Result<Scenario, ScenarioError> {
    if raw.schema != SCHEMA_VERSION {
        return Err(ScenarioError::Schema(format!(
            "unsupported schema version {} (expected {SCHEMA_VERSION})",
            raw.schema
        )));
    }
    if raw.name.trim().is_empty() {
        return Err(ScenarioError::Invariant("scenario name is empty".into()));
    }
    let config = TeamConfig::new(
        raw.config.productivity,
        raw.config.returns_exponent,
        raw.config.effort_cost,
        raw.config.team_size,
        raw.config.effort_cap,
    )?;

    let mechanisms = match (&raw.mechanisms, &raw.extended_mechanisms) {
        (Some(_), Some(_)) => {
            return Err(ScenarioError::Invariant(
                "specify either [mechanisms] or [extended_mechanisms], not both".into(),
            ))
        }
        (Some(m), None) => Mechanisms::Consolidated(MechanismStrengths::new(
            m.loyalty_benefit,
            m.cost_tolerance,
        )?),
        (None, Some(e)) => Mechanisms::Extended(ExtendedStrengths::new(
            e.internalization,
            e.warm_glow,
            e.cost_tolerance,
            e.guilt,
        )?),
        (None, None) => Mechanisms::Consolidated(MechanismStrengths::default()),
    };

    // exactly one loyalty source: explicit values or member factor tables
    let explicit = raw.loyalty.as_ref().and_then(|l| l.values.clone());
    let members_with_factors = raw.members.iter().filter(|m| m.factors.is_some()).count();
    let (loyalties, members) = match (&explicit, members_with_factors) {
        (Some(_), n) if n > 0 => {
            return Err(ScenarioError::Invariant(
                "loyalty.values and member factor tables are mutually exclusive".into(),
            ))
        }
        (Some(values), _) => {
            if values.len() != config.team_size() {
                return Err(ScenarioError::Invariant(format!(
                    "loyalty.values has {} entries for a team of {}",
                    values.len(),
                    config.team_size()
                )));
            }
            if !raw.members.is_empty() && raw.members.len() != config.team_size() {
                return Err(ScenarioError::Invariant(format!(
                    "{} members listed for a team of {}",
                    raw.members.len(),
                    config.team_size()
                )));
            }
            // member overrides replace the positional value
            let mut effective = values.clone();
            let mut members = Vec::with_capacity(raw.members.len());
            for (i, m) in raw.members.iter().enumerate() {
                if let Some(over) = m.loyalty_override {
                    effective[i] = over;
                }
                members.push(Member {
                    id: m.id.clone(),
                    factor_score: None,
                    loyalty_override: m.loyalty_override,
                    loyalty: effective[i],
                    dependency_weight: m.dependency_weight,
                });
            }
            (LoyaltyProfile::new(effective)?, members)
        }
        (None, 0) => {
            return Err(ScenarioError::Invariant(
                "no loyalty source: provide loyalty.values or member factor tables".into(),
            ))
        }
        (None, _) => {
            if raw.members.len() != config.team_size() {
                return Err(ScenarioError::Invariant(format!(
                    "{} members listed for a team of {}",
                    raw.members.len(),
                    config.team_size()
                )));
            }
            let weights = resolve_weights(raw.loyalty.as_ref())?;
            let mut members = Vec::with_capacity(raw.members.len());
            let mut values = Vec::with_capacity(raw.members.len());
            for m in &raw.members {
                let factors = m.factors.as_ref().ok_or_else(|| {
                    ScenarioError::Invariant(format!("member `{}` has no factor table", m.id))
                })?;
                let member_factors = MemberFactors::new(
                    m.id.clone(),
                    factors.iter().map(|(k, v)| (k.clone(), *v)).collect(),
                );
                let score = loyalty_score(&member_factors, &weights)?;
                if let Some(over) = m.loyalty_override {
                    if !(0.0..=1.0).contains(&over) {
                        return Err(ScenarioError::Invariant(format!(
                            "loyalty override {over} for `{}` outside [0, 1]",
                            m.id
                        )));
                    }
                }
                let loyalty = m.loyalty_override.unwrap_or(score);
                members.push(Member {
                    id: m.id.clone(),
                    factor_score: Some(score),
                    loyalty_override: m.loyalty_override,
                    loyalty,
                    dependency_weight: m.dependency_weight,
                });
                values.push(loyalty);
            }
            (LoyaltyProfile::new(values)?, members)
        }
    };

    let mut ids = BTreeMap::new();
    for m in &members {
        if ids.insert(m.id.clone(), ()).is_some() {
            return Err(ScenarioError::Invariant(format!(
                "duplicate member id `{}`",
                m.id
            )));
        }
    }

    let dependencies: Vec<DependencyRecord> = raw
        .dependencies
        .iter()
        .map(|d| DependencyRecord::new(d.dependee.clone(), d.dependum.clone(), d.criticality))
        .collect();
    for d in &dependencies {
        if !d.criticality.is_finite() || !(0.0..=1.0).contains(&d.criticality) {
            return Err(ScenarioError::Invariant(format!(
                "criticality {} for `{}` outside [0, 1]",
                d.criticality, d.dependee
            )));
        }
    }

    let mut phases = Vec::with_capacity(raw.phases.len());
    for p in &raw.phases {
        let phase_config = TeamConfig::new(
            p.productivity.unwrap_or(config.productivity()),
            p.returns_exponent.unwrap_or(config.returns_exponent()),
            p.effort_cost.unwrap_or(config.effort_cost()),
            p.team_size.unwrap_or(config.team_size()),
            p.effort_cap.unwrap_or(config.effort_cap()),
        )?;
        if !(0.0..=1.0).contains(&p.mean_loyalty) {
            return Err(ScenarioError::Invariant(format!(
                "phase `{}` mean loyalty {} outside [0, 1]",
                p.name, p.mean_loyalty
            )));
        }
        phases.push(Phase {
            name: p.name.clone(),
            config: phase_config,
            mean_loyalty: p.mean_loyalty,
            expected_rank: p.expected_rank,
            cohesion: p.cohesion,
            reference_prediction: p.reference_prediction,
        });
    }
    if !phases.is_empty() {
        let mut ranks: Vec<usize> = phases.iter().map(|p| p.expected_rank).collect();
        ranks.sort_unstable();
        let expected: Vec<usize> = (1..=phases.len()).collect();
        if ranks != expected {
            return Err(ScenarioError::Invariant(format!(
                "phase expected ranks must be a permutation of 1..={}",
                phases.len()
            )));
        }
    }

    Ok(Scenario {
        name: raw.name.clone(),
        config,
        mechanisms,
        members,
        loyalties,
        dependencies,
        phases,
        raw,
    })
}

fn resolve_weights(loyalty: Option<&RawLoyalty>) -> Result<FactorWeights, ScenarioError> {
    let Some(loyalty) = loyalty else {
        return Err(ScenarioError::Invariant(
            "member factor tables require [loyalty] with a preset or weights".into(),
        ));
    };
    match (&loyalty.preset, &loyalty.weights) {
        (Some(_), Some(_)) => Err(ScenarioError::Invariant(
            "loyalty preset and custom weights are mutually exclusive".into(),
        )),
        (Some(name), None) => FactorWeights::preset(name).ok_or_else(|| {
            ScenarioError::Invariant(format!(
                "unknown loyalty preset `{name}` (expected `human` or `agent`)"
            ))
        }),
        (None, Some(weights)) => Ok(FactorWeights::new(weights.clone())?),
        (None, None) => Err(ScenarioError::Invariant(
            "loyalty table needs `preset`, `weights`, or `values`".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Case study
// ---------------------------------------------------------------------------

/// Outcome of one phase solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseOutcome {
    pub name: String,
    pub team_size: usize,
    pub mean_loyalty: f64,
    /// Per-member symmetric equilibrium effort, honouring the cap.
    pub effort: f64,
    /// Closed-form per-member effort before the cap: the scale-free
    /// prediction used for ranking.
    pub prediction: f64,
    pub total_effort: f64,
    pub output: f64,
    pub at_cap: bool,
    pub converged: bool,
    pub expected_rank: usize,
    /// Rank of this phase's prediction among all phases, `1` = lowest.
    pub predicted_rank: usize,
    pub cohesion: Option<f64>,
    pub reference_prediction: Option<f64>,
}

/// Per-phase rubric scores (convergence 3, magnitude ranking 4, pattern 4,
/// trend 4).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseScore {
    pub phase: String,
    pub convergence: u32,
    pub magnitude_ranking: u32,
    pub pattern: u32,
    pub trend: u32,
    pub subtotal: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rubric {
    pub per_phase: Vec<PhaseScore>,
    pub total: u32,
    pub max_total: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudyReport {
    pub scenario: String,
    pub phases: Vec<PhaseOutcome>,
    /// Spearman correlation between phase predictions and expected ranks;
    /// `None` when undefined (single phase or tied predictions).
    pub rank_correlation: Option<f64>,
    pub pearson_r: Option<f64>,
    pub pearson_p: Option<f64>,
    /// Predictions strictly decrease in phase order.
    pub monotone_decline: bool,
    pub rubric: Rubric,
}

fn solve_phase(
    phase: &Phase,
    mech: &MechanismStrengths,
    settings: &SolverSettings,
) -> Result<PhaseOutcome, ScenarioError> {
    let profile = LoyaltyProfile::uniform(phase.config.team_size(), phase.mean_loyalty)?;
    let solved = solve_tpe(&phase.config, mech, &profile, settings)?;
    let effort = solved.profile.efforts()[0];
    let total = solved.total_effort();
    Ok(PhaseOutcome {
        name: phase.name.clone(),
        team_size: phase.config.team_size(),
        mean_loyalty: phase.mean_loyalty,
        effort,
        prediction: symmetric_equilibrium_unclamped(&phase.config, mech, phase.mean_loyalty)?,
        total_effort: total,
        output: output_of_total(&phase.config, total),
        at_cap: effort >= phase.config.effort_cap() - 1e-6,
        converged: solved.converged,
        expected_rank: phase.expected_rank,
        predicted_rank: 0,
        cohesion: phase.cohesion,
        reference_prediction: phase.reference_prediction,
    })
}

fn consolidated_for_phases(scenario: &Scenario) -> Result<MechanismStrengths, ScenarioError> {
    match &scenario.mechanisms {
        Mechanisms::Consolidated(m) => Ok(*m),
        Mechanisms::Extended(_) => Err(ScenarioError::Invariant(
            "phase analysis requires consolidated [mechanisms]".into(),
        )),
    }
}

/// Runs all phases of a scenario and scores the rubric.
pub fn run_case_study(
    scenario: &Scenario,
    settings: &SolverSettings,
) -> Result<CaseStudyReport, ScenarioError> {
    if scenario.phases.is_empty() {
        return Err(ScenarioError::Invariant(format!(
            "scenario `{}` has no phases",
            scenario.name
        )));
    }
    let mech = consolidated_for_phases(scenario)?;
    let mut phases: Vec<PhaseOutcome> = scenario
        .phases
        .iter()
        .map(|p| solve_phase(p, &mech, settings))
        .collect::<Result<_, _>>()?;

    // rank predictions ascending: rank 1 = lowest prediction
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&a, &b| {
        phases[a]
            .prediction
            .partial_cmp(&phases[b].prediction)
            .unwrap()
    });
    for (rank_minus_one, &idx) in order.iter().enumerate() {
        phases[idx].predicted_rank = rank_minus_one + 1;
    }

    let predictions: Vec<f64> = phases.iter().map(|p| p.prediction).collect();
    let expected: Vec<f64> = phases.iter().map(|p| p.expected_rank as f64).collect();
    let distinct = predictions
        .windows(2)
        .all(|w| (w[0] - w[1]).abs() > f64::EPSILON);
    let rank_correlation = if phases.len() < 2 || !distinct {
        None
    } else {
        Some(spearman_rho(&predictions, &expected)?)
    };
    let (pearson, pearson_p) = if phases.len() >= 3 && distinct {
        match pearson_r(&predictions, &expected) {
            Ok((r, p)) => (Some(r), Some(p)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };
    let monotone_decline = predictions.windows(2).all(|w| w[1] < w[0]);

    let rubric = score_rubric(&phases);
    Ok(CaseStudyReport {
        scenario: scenario.name.clone(),
        phases,
        rank_correlation,
        pearson_r: pearson,
        pearson_p,
        monotone_decline,
        rubric,
    })
}

/// Automated scoring checklist.
///
/// Convergence (3): the phase solve converged with effort inside the cap.
/// Magnitude ranking (4): the phase's predicted rank equals its expected
/// rank. Pattern (4): the phase sits on the same side of the median
/// prediction as its expected rank (qualitative high/low agreement).
/// Trend (4): the transition into the phase (out of it, for the first)
/// moves in the expected direction.
fn score_rubric(phases: &[PhaseOutcome]) -> Rubric {
    let k = phases.len();
    let median_rank = (k as f64 + 1.0) / 2.0;
    let mut per_phase = Vec::with_capacity(k);
    let mut total = 0;
    for (i, phase) in phases.iter().enumerate() {
        let convergence = if phase.converged && phase.effort.is_finite() {
            3
        } else {
            0
        };
        let magnitude_ranking = if phase.predicted_rank == phase.expected_rank {
            4
        } else {
            0
        };
        let predicted_high = phase.predicted_rank as f64 > median_rank;
        let expected_high = phase.expected_rank as f64 > median_rank;
        let predicted_low = (phase.predicted_rank as f64) < median_rank;
        let expected_low = (phase.expected_rank as f64) < median_rank;
        let pattern = if predicted_high == expected_high && predicted_low == expected_low {
            4
        } else {
            0
        };
        let trend = if k == 1 {
            4
        } else {
            let (from, to) = if i == 0 { (0, 1) } else { (i - 1, i) };
            let actual = phases[to].prediction - phases[from].prediction;
            let wanted = phases[to].expected_rank as f64 - phases[from].expected_rank as f64;
            if actual == 0.0 && wanted == 0.0 || actual * wanted > 0.0 {
                4
            } else {
                0
            }
        };
        let subtotal = convergence + magnitude_ranking + pattern + trend;
        total += subtotal;
        per_phase.push(PhaseScore {
            phase: phase.name.clone(),
            convergence,
            magnitude_ranking,
            pattern,
            trend,
            subtotal,
        });
    }
    Rubric {
        per_phase,
        total,
        max_total: 15 * k as u32,
    }
}

// ---------------------------------------------------------------------------
// Counterfactuals
// ---------------------------------------------------------------------------

/// Counterfactual modifiers for phase analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Counterfactual {
    /// Multiply both mechanism strengths by a factor (weaker norms when
    /// below one).
    ScaleMechanisms(f64),
    /// Cap every phase's team size.
    CapTeamSize(usize),
    /// Shift every phase's mean loyalty, clamped to `[0, 1]`.
    ShiftLoyalty(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualPhase {
    pub name: String,
    pub baseline_effort: f64,
    pub counterfactual_effort: f64,
    pub baseline_prediction: f64,
    pub counterfactual_prediction: f64,
    pub baseline_output: f64,
    pub counterfactual_output: f64,
    /// Percent change of the uncapped prediction.
    pub prediction_change_pct: f64,
    /// Percent change of team output (capped equilibria).
    pub output_change_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterfactualReport {
    pub scenario: String,
    pub modifier: Counterfactual,
    pub phases: Vec<CounterfactualPhase>,
    /// Expected direction of the per-member incentive (uncapped prediction)
    /// in the phases the modifier touches, and whether the run matched it.
    pub expected_effort_direction: i8,
    pub effort_direction_consistent: bool,
    /// For team-size caps: output should not rise; otherwise unused (true).
    pub output_direction_consistent: bool,
}

fn modified_phase(phase: &Phase, modifier: &Counterfactual) -> Result<Phase, ScenarioError> {
    let mut out = phase.clone();
    if let Counterfactual::CapTeamSize(cap) = modifier {
        if *cap < 2 {
            return Err(ScenarioError::Invariant(
                "team size cap must be at least 2".into(),
            ));
        }
        if phase.config.team_size() > *cap {
            out.config = phase.config.with_team_size(*cap)?;
        }
    }
    if let Counterfactual::ShiftLoyalty(delta) = modifier {
        out.mean_loyalty = (phase.mean_loyalty + delta).clamp(0.0, 1.0);
    }
    Ok(out)
}

/// Compares phase outcomes with and without a counterfactual modifier.
pub fn run_counterfactual(
    scenario: &Scenario,
    modifier: Counterfactual,
    settings: &SolverSettings,
) -> Result<CounterfactualReport, ScenarioError> {
    if scenario.phases.is_empty() {
        return Err(ScenarioError::Invariant(format!(
            "scenario `{}` has no phases",
            scenario.name
        )));
    }
    let mech = consolidated_for_phases(scenario)?;
    let cf_mech = match modifier {
        Counterfactual::ScaleMechanisms(scale) => {
            if !scale.is_finite() || scale < 0.0 {
                return Err(ScenarioError::Invariant(format!(
                    "mechanism scale {scale} must be non-negative"
                )));
            }
            MechanismStrengths::new(
                mech.loyalty_benefit() * scale,
                (mech.cost_tolerance() * scale).min(0.99),
            )?
        }
        _ => mech,
    };

    let mut phases = Vec::with_capacity(scenario.phases.len());
    let mut touched_deltas = Vec::new();
    let mut output_ok = true;
    for phase in &scenario.phases {
        let baseline = solve_phase(phase, &mech, settings)?;
        let cf_phase = modified_phase(phase, &modifier)?;
        let counterfactual = solve_phase(&cf_phase, &cf_mech, settings)?;
        let touched = match modifier {
            Counterfactual::ScaleMechanisms(s) => s != 1.0,
            Counterfactual::CapTeamSize(cap) => phase.config.team_size() > cap,
            Counterfactual::ShiftLoyalty(d) => {
                d != 0.0 && (counterfactual.mean_loyalty != baseline.mean_loyalty)
            }
        };
        if touched {
            touched_deltas.push(counterfactual.prediction - baseline.prediction);
            if matches!(modifier, Counterfactual::CapTeamSize(_))
                && counterfactual.output > baseline.output + 1e-9
            {
                output_ok = false;
            }
        }
        let pct = |new: f64, old: f64| {
            if old != 0.0 {
                (new - old) / old * 100.0
            } else {
                0.0
            }
        };
        phases.push(CounterfactualPhase {
            name: phase.name.clone(),
            baseline_effort: baseline.effort,
            counterfactual_effort: counterfactual.effort,
            baseline_prediction: baseline.prediction,
            counterfactual_prediction: counterfactual.prediction,
            baseline_output: baseline.output,
            counterfactual_output: counterfactual.output,
            prediction_change_pct: pct(counterfactual.prediction, baseline.prediction),
            output_change_pct: pct(counterfactual.output, baseline.output),
        });
    }

    let expected_effort_direction: i8 = match modifier {
        Counterfactual::ScaleMechanisms(s) if s < 1.0 => -1,
        Counterfactual::ScaleMechanisms(s) if s > 1.0 => 1,
        Counterfactual::CapTeamSize(_) => 1,
        Counterfactual::ShiftLoyalty(d) if d > 0.0 => 1,
        Counterfactual::ShiftLoyalty(d) if d < 0.0 => -1,
        _ => 0,
    };
    let effort_direction_consistent = match expected_effort_direction {
        1 => touched_deltas.iter().all(|&d| d > 0.0),
        -1 => touched_deltas.iter().all(|&d| d < 0.0),
        _ => touched_deltas.iter().all(|&d| d == 0.0),
    };
    Ok(CounterfactualReport {
        scenario: scenario.name.clone(),
        modifier,
        phases,
        expected_effort_direction,
        effort_direction_consistent,
        output_direction_consistent: output_ok,
    })
}

/// Plot-ready case-study series: one CSV row per phase.
pub fn case_study_csv(report: &CaseStudyReport) -> String {
    use crate::report::sig9;
    let mut out = String::new();
    out.push_str(
        "phase,team_size,mean_loyalty,cohesion,effort,prediction,total_effort,output,\
         at_cap,expected_rank,predicted_rank\n",
    );
    for p in &report.phases {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            p.name,
            p.team_size,
            sig9(p.mean_loyalty),
            p.cohesion.map(sig9).unwrap_or_default(),
            sig9(p.effort),
            sig9(p.prediction),
            sig9(p.total_effort),
            sig9(p.output),
            p.at_cap,
            p.expected_rank,
            p.predicted_rank,
        ));
    }
    out
}
