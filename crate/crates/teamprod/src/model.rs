//! Core production and utility primitives.
//!
//! Everything in this module is a pure function of explicit parameters:
//! team output, the equal-share base payoff, the loyalty modifier, the
//! loyalty-augmented utility, and its marginal with respect to own effort.
//! All quantities are dimensionless `f64` values.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by model primitives.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{name}` must be {requirement} (got {value})")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    #[error("action profile has {actual} entries but team size is {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("member index {index} out of range for team of {size}")]
    MemberOutOfRange { index: usize, size: usize },
    #[error("effort {value} outside [0, {cap}] for member {index}")]
    EffortOutOfBounds { index: usize, value: f64, cap: f64 },
    #[error("loyalty {0} outside [0, 1]")]
    LoyaltyOutOfRange(f64),
    #[error("marginal utility is singular at zero total effort")]
    SingularTotalEffort,
}

fn require(
    ok: bool,
    name: &'static str,
    requirement: &'static str,
    value: f64,
) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            requirement,
            value,
        })
    }
}

/// Production environment for one team.
///
/// Output is `productivity * (total effort)^returns_exponent`; each member
/// bears `effort_cost` per unit of own effort and can contribute at most
/// `effort_cap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTeamConfig", into = "RawTeamConfig")]
pub struct TeamConfig {
    productivity: f64,
    returns_exponent: f64,
    effort_cost: f64,
    team_size: usize,
    effort_cap: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTeamConfig {
    productivity: f64,
    returns_exponent: f64,
    effort_cost: f64,
    team_size: usize,
    effort_cap: f64,
}

impl TryFrom<RawTeamConfig> for TeamConfig {
    type Error = ModelError;
    fn try_from(raw: RawTeamConfig) -> Result<Self, ModelError> {
        TeamConfig::new(
            raw.productivity,
            raw.returns_exponent,
            raw.effort_cost,
            raw.team_size,
            raw.effort_cap,
        )
    }
}

impl From<TeamConfig> for RawTeamConfig {
    fn from(c: TeamConfig) -> Self {
        RawTeamConfig {
            productivity: c.productivity,
            returns_exponent: c.returns_exponent,
            effort_cost: c.effort_cost,
            team_size: c.team_size,
            effort_cap: c.effort_cap,
        }
    }
}

impl TeamConfig {
    pub fn new(
        productivity: f64,
        returns_exponent: f64,
        effort_cost: f64,
        team_size: usize,
        effort_cap: f64,
    ) -> Result<Self, ModelError> {
        require(productivity > 0.0, "productivity", "> 0", productivity)?;
        require(
            returns_exponent > 0.0 && returns_exponent < 1.0,
            "returns_exponent",
            "in (0, 1)",
            returns_exponent,
        )?;
        require(effort_cost > 0.0, "effort_cost", "> 0", effort_cost)?;
        require(team_size >= 2, "team_size", ">= 2", team_size as f64)?;
        require(effort_cap > 0.0, "effort_cap", "> 0", effort_cap)?;
        Ok(Self {
            productivity,
            returns_exponent,
            effort_cost,
            team_size,
            effort_cap,
        })
    }

    pub fn productivity(&self) -> f64 {
        self.productivity
    }
    pub fn returns_exponent(&self) -> f64 {
        self.returns_exponent
    }
    pub fn effort_cost(&self) -> f64 {
        self.effort_cost
    }
    pub fn team_size(&self) -> usize {
        self.team_size
    }
    pub fn effort_cap(&self) -> f64 {
        self.effort_cap
    }

    /// Copy with a different team size.
    pub fn with_team_size(&self, team_size: usize) -> Result<Self, ModelError> {
        Self::new(
            self.productivity,
            self.returns_exponent,
            self.effort_cost,
            team_size,
            self.effort_cap,
        )
    }

    /// Effort elasticity `1 / (1 - returns_exponent)`.
    pub fn elasticity(&self) -> f64 {
        1.0 / (1.0 - self.returns_exponent)
    }
}

/// Strengths of the two consolidated loyalty mechanisms.
///
/// `loyalty_benefit` weights teammates' aggregate payoff in a loyal
/// member's utility; `cost_tolerance` is the fractional reduction of
/// perceived effort cost at full loyalty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMechanismStrengths", into = "RawMechanismStrengths")]
pub struct MechanismStrengths {
    loyalty_benefit: f64,
    cost_tolerance: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawMechanismStrengths {
    loyalty_benefit: f64,
    cost_tolerance: f64,
}

impl TryFrom<RawMechanismStrengths> for MechanismStrengths {
    type Error = ModelError;
    fn try_from(raw: RawMechanismStrengths) -> Result<Self, ModelError> {
        MechanismStrengths::new(raw.loyalty_benefit, raw.cost_tolerance)
    }
}

impl From<MechanismStrengths> for RawMechanismStrengths {
    fn from(m: MechanismStrengths) -> Self {
        RawMechanismStrengths {
            loyalty_benefit: m.loyalty_benefit,
            cost_tolerance: m.cost_tolerance,
        }
    }
}

impl MechanismStrengths {
    pub fn new(loyalty_benefit: f64, cost_tolerance: f64) -> Result<Self, ModelError> {
        require(
            loyalty_benefit >= 0.0,
            "loyalty_benefit",
            ">= 0",
            loyalty_benefit,
        )?;
        require(
            (0.0..1.0).contains(&cost_tolerance),
            "cost_tolerance",
            "in [0, 1)",
            cost_tolerance,
        )?;
        Ok(Self {
            loyalty_benefit,
            cost_tolerance,
        })
    }

    /// Both mechanisms switched off; utilities reduce to the base payoff.
    pub fn none() -> Self {
        Self {
            loyalty_benefit: 0.0,
            cost_tolerance: 0.0,
        }
    }

    pub fn loyalty_benefit(&self) -> f64 {
        self.loyalty_benefit
    }
    pub fn cost_tolerance(&self) -> f64 {
        self.cost_tolerance
    }
}

/// Calibrated defaults: loyalty benefit 0.80, cost tolerance 0.30.
impl Default for MechanismStrengths {
    fn default() -> Self {
        Self {
            loyalty_benefit: 0.8,
            cost_tolerance: 0.3,
        }
    }
}

/// Per-member loyalty coefficients, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LoyaltyProfile {
    values: Vec<f64>,
}

impl TryFrom<Vec<f64>> for LoyaltyProfile {
    type Error = ModelError;
    fn try_from(values: Vec<f64>) -> Result<Self, ModelError> {
        LoyaltyProfile::new(values)
    }
}

impl From<LoyaltyProfile> for Vec<f64> {
    fn from(p: LoyaltyProfile) -> Self {
        p.values
    }
}

impl LoyaltyProfile {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        for &v in &values {
            check_loyalty(v)?;
        }
        Ok(Self { values })
    }

    /// All members at the same loyalty level.
    pub fn uniform(team_size: usize, loyalty: f64) -> Result<Self, ModelError> {
        check_loyalty(loyalty)?;
        Ok(Self {
            values: vec![loyalty; team_size],
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Profile with every value shifted by `delta` and clamped to `[0, 1]`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|v| (v + delta).clamp(0.0, 1.0))
                .collect(),
        }
    }
}

/// One effort level per member, in effort units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionProfile {
    efforts: Vec<f64>,
}

impl ActionProfile {
    pub fn new(efforts: Vec<f64>) -> Self {
        Self { efforts }
    }

    pub fn uniform(team_size: usize, effort: f64) -> Self {
        Self {
            efforts: vec![effort; team_size],
        }
    }

    pub fn efforts(&self) -> &[f64] {
        &self.efforts
    }
    pub fn len(&self) -> usize {
        self.efforts.len()
    }
    pub fn is_empty(&self) -> bool {
        self.efforts.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.efforts.iter().sum()
    }

    /// Checks the profile against a config: matching length, finite entries,
    /// every effort within `[0, effort_cap]`.
    pub fn validate_for(&self, config: &TeamConfig) -> Result<(), ModelError> {
        if self.efforts.len() != config.team_size() {
            return Err(ModelError::DimensionMismatch {
                expected: config.team_size(),
                actual: self.efforts.len(),
            });
        }
        for (index, &value) in self.efforts.iter().enumerate() {
            if !value.is_finite() || value < 0.0 || value > config.effort_cap() {
                return Err(ModelError::EffortOutOfBounds {
                    index,
                    value,
                    cap: config.effort_cap(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn check_loyalty(loyalty: f64) -> Result<(), ModelError> {
    if loyalty.is_finite() && (0.0..=1.0).contains(&loyalty) {
        Ok(())
    } else {
        Err(ModelError::LoyaltyOutOfRange(loyalty))
    }
}

fn check_member(config: &TeamConfig, member: usize) -> Result<(), ModelError> {
    if member < config.team_size() {
        Ok(())
    } else {
        Err(ModelError::MemberOutOfRange {
            index: member,
            size: config.team_size(),
        })
    }
}

/// Team output `productivity * (total effort)^returns_exponent`.
///
/// Returns 0 when all efforts are 0.
pub fn team_output(config: &TeamConfig, actions: &ActionProfile) -> Result<f64, ModelError> {
    actions.validate_for(config)?;
    Ok(output_of_total(config, actions.total()))
}

/// Team output at a given total effort; 0 at or below zero total.
pub fn output_of_total(config: &TeamConfig, total_effort: f64) -> f64 {
    if total_effort <= 0.0 {
        0.0
    } else {
        config.productivity() * total_effort.powf(config.returns_exponent())
    }
}

/// Member's payoff under pure self-interest: an equal `1/n` share of team
/// output minus the private cost of own effort.
pub fn base_payoff(
    config: &TeamConfig,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    actions.validate_for(config)?;
    check_member(config, member)?;
    let q = output_of_total(config, actions.total());
    Ok(q / config.team_size() as f64 - config.effort_cost() * actions.efforts()[member])
}

/// Aggregate payoff of everyone except `member`: an `(n-1)/n` output share
/// minus the teammates' own effort costs.
pub fn teammates_payoff(
    config: &TeamConfig,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    actions.validate_for(config)?;
    check_member(config, member)?;
    let n = config.team_size() as f64;
    let total = actions.total();
    let q = output_of_total(config, total);
    let others_effort = total - actions.efforts()[member];
    Ok((n - 1.0) / n * q - config.effort_cost() * others_effort)
}

/// Loyalty modifier: `loyalty * (benefit * teammates_payoff + tolerance * cost * own_effort)`.
pub fn loyalty_modifier(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    let mates = teammates_payoff(config, actions, member)?;
    let own_cost = config.effort_cost() * actions.efforts()[member];
    Ok(loyalty * (mech.loyalty_benefit() * mates + mech.cost_tolerance() * own_cost))
}

/// Loyalty-augmented utility: base payoff plus loyalty modifier.
pub fn utility(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    let base = base_payoff(config, actions, member)?;
    let modifier = loyalty_modifier(config, mech, loyalty, actions, member)?;
    Ok(base + modifier)
}

/// The same utility in expanded form:
/// `(1/n) Q - c (1 - tolerance * loyalty) a_i + benefit * loyalty * teammates_payoff`.
///
/// Algebraically identical to [`utility`]; kept separate so the identity can
/// be checked rather than assumed.
pub fn utility_expanded(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    actions.validate_for(config)?;
    check_member(config, member)?;
    let n = config.team_size() as f64;
    let q = output_of_total(config, actions.total());
    let own = actions.efforts()[member];
    let effective_cost = config.effort_cost() * (1.0 - mech.cost_tolerance() * loyalty);
    let mates = teammates_payoff(config, actions, member)?;
    Ok(q / n - effective_cost * own + mech.loyalty_benefit() * loyalty * mates)
}

/// Fast-path utility used by solvers: no validation, caller guarantees
/// `efforts` matches the config and `loyalty` is in range.
pub(crate) fn utility_unchecked(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    efforts: &[f64],
    member: usize,
) -> f64 {
    let n = config.team_size() as f64;
    let total: f64 = efforts.iter().sum();
    let q = output_of_total(config, total);
    let own = efforts[member];
    let base = q / n - config.effort_cost() * own;
    let mates = (n - 1.0) / n * q - config.effort_cost() * (total - own);
    base + loyalty
        * (mech.loyalty_benefit() * mates + mech.cost_tolerance() * config.effort_cost() * own)
}

/// Marginal loyalty-augmented utility with respect to own effort:
///
/// `(omega*beta/n) * A^(beta-1) * (1 + benefit*loyalty*(n-1)) - c*(1 - tolerance*loyalty)`
///
/// where `A` is total effort. Errors when `A = 0`: with `beta < 1` the
/// derivative is unbounded there.
pub fn marginal_utility(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    actions.validate_for(config)?;
    check_member(config, member)?;
    let total = actions.total();
    if total <= 0.0 {
        return Err(ModelError::SingularTotalEffort);
    }
    let n = config.team_size() as f64;
    let benefit_multiplier = 1.0 + mech.loyalty_benefit() * loyalty * (n - 1.0);
    let cost_multiplier = 1.0 - mech.cost_tolerance() * loyalty;
    Ok(config.productivity() * config.returns_exponent() / n
        * total.powf(config.returns_exponent() - 1.0)
        * benefit_multiplier
        - config.effort_cost() * cost_multiplier)
}
