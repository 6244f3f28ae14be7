//! Four-mechanism loyalty decomposition: welfare internalization, warm
//! glow, cost tolerance, and quadratic guilt. With warm glow and guilt
//! switched off this reduces exactly to the consolidated two-mechanism
//! utility; the guilt reference point is the effort cap.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{iterate_best_responses, EquilibriumResult, SolverSettings};
use crate::model::{
    check_loyalty, ActionProfile, LoyaltyProfile, MechanismStrengths, ModelError, TeamConfig,
};
use crate::optimize::golden_section_max;

/// Strengths of the four decomposed mechanisms. The constructor enforces
/// only hard validity (non-negative, cost tolerance below 1); the
/// recommended calibration ranges are surfaced as warnings instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExtendedStrengths", into = "RawExtendedStrengths")]
pub struct ExtendedStrengths {
    internalization: f64,
    warm_glow: f64,
    cost_tolerance: f64,
    guilt: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RawExtendedStrengths {
    internalization: f64,
    warm_glow: f64,
    cost_tolerance: f64,
    guilt: f64,
}

impl TryFrom<RawExtendedStrengths> for ExtendedStrengths {
    type Error = ModelError;
    fn try_from(raw: RawExtendedStrengths) -> Result<Self, ModelError> {
        ExtendedStrengths::new(
            raw.internalization,
            raw.warm_glow,
            raw.cost_tolerance,
            raw.guilt,
        )
    }
}

impl From<ExtendedStrengths> for RawExtendedStrengths {
    fn from(e: ExtendedStrengths) -> Self {
        RawExtendedStrengths {
            internalization: e.internalization,
            warm_glow: e.warm_glow,
            cost_tolerance: e.cost_tolerance,
            guilt: e.guilt,
        }
    }
}

impl ExtendedStrengths {
    pub fn new(
        internalization: f64,
        warm_glow: f64,
        cost_tolerance: f64,
        guilt: f64,
    ) -> Result<Self, ModelError> {
        for (name, v) in [
            ("internalization", internalization),
            ("warm_glow", warm_glow),
            ("guilt", guilt),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(ModelError::InvalidParameter {
                    name: match name {
                        "internalization" => "internalization",
                        "warm_glow" => "warm_glow",
                        _ => "guilt",
                    },
                    requirement: ">= 0",
                    value: v,
                });
            }
        }
        if !cost_tolerance.is_finite() || !(0.0..1.0).contains(&cost_tolerance) {
            return Err(ModelError::InvalidParameter {
                name: "cost_tolerance",
                requirement: "in [0, 1)",
                value: cost_tolerance,
            });
        }
        Ok(Self {
            internalization,
            warm_glow,
            cost_tolerance,
            guilt,
        })
    }

    /// Consolidated strengths expressed in the four-mechanism form:
    /// internalization carries the whole loyalty benefit, warm glow and
    /// guilt are zero.
    pub fn from_consolidated(mech: &MechanismStrengths) -> Self {
        Self {
            internalization: mech.loyalty_benefit(),
            warm_glow: 0.0,
            cost_tolerance: mech.cost_tolerance(),
            guilt: 0.0,
        }
    }

    pub fn internalization(&self) -> f64 {
        self.internalization
    }
    pub fn warm_glow(&self) -> f64 {
        self.warm_glow
    }
    pub fn cost_tolerance(&self) -> f64 {
        self.cost_tolerance
    }
    pub fn guilt(&self) -> f64 {
        self.guilt
    }

    /// Human-readable warnings for strengths outside the recommended
    /// calibration ranges. Advisory only.
    pub fn range_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        let checks = [
            ("internalization", self.internalization, 0.4, 0.8),
            ("warm_glow", self.warm_glow, 0.1, 0.4),
            ("cost_tolerance", self.cost_tolerance, 0.0, 0.99),
            ("guilt", self.guilt, 0.05, 0.25),
        ];
        for (name, value, lo, hi) in checks {
            if value < lo || value > hi {
                warnings.push(format!(
                    "{name} = {value} outside recommended range [{lo}, {hi}]"
                ));
            }
        }
        warnings
    }
}

/// Four-mechanism utility:
///
/// `(1/n) Q - c (1 - cost*theta) a_i + intern*theta*teammates_payoff
///  + warm*theta*a_i - guilt*theta*max(0, cap - a_i)^2`
pub fn extended_utility(
    config: &TeamConfig,
    ext: &ExtendedStrengths,
    loyalty: f64,
    actions: &ActionProfile,
    member: usize,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    actions.validate_for(config)?;
    if member >= config.team_size() {
        return Err(ModelError::MemberOutOfRange {
            index: member,
            size: config.team_size(),
        });
    }
    Ok(extended_utility_unchecked(
        config,
        ext,
        loyalty,
        actions.efforts(),
        member,
    ))
}

fn extended_utility_unchecked(
    config: &TeamConfig,
    ext: &ExtendedStrengths,
    loyalty: f64,
    efforts: &[f64],
    member: usize,
) -> f64 {
    let n = config.team_size() as f64;
    let total: f64 = efforts.iter().sum();
    let q = crate::model::output_of_total(config, total);
    let own = efforts[member];
    let mates = (n - 1.0) / n * q - config.effort_cost() * (total - own);
    let shortfall = (config.effort_cap() - own).max(0.0);
    q / n - config.effort_cost() * (1.0 - ext.cost_tolerance * loyalty) * own
        + ext.internalization * loyalty * mates
        + ext.warm_glow * loyalty * own
        - ext.guilt * loyalty * shortfall * shortfall
}

/// Best response under the four-mechanism utility, found by golden-section
/// maximisation over `[0, effort_cap]` (there is no closed form once guilt
/// is active). Bracket width 1e-8.
pub fn extended_best_response(
    config: &TeamConfig,
    ext: &ExtendedStrengths,
    loyalty: f64,
    others_total: f64,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    if !others_total.is_finite() || others_total < 0.0 {
        return Err(ModelError::InvalidParameter {
            name: "others_total",
            requirement: ">= 0",
            value: others_total,
        });
    }
    Ok(extended_best_response_unchecked(
        config,
        ext,
        loyalty,
        others_total,
    ))
}

fn extended_best_response_unchecked(
    config: &TeamConfig,
    ext: &ExtendedStrengths,
    loyalty: f64,
    others_total: f64,
) -> f64 {
    let n = config.team_size() as f64;
    let cap = config.effort_cap();
    let objective = |own: f64| {
        let total = others_total + own;
        let q = crate::model::output_of_total(config, total);
        let mates = (n - 1.0) / n * q - config.effort_cost() * others_total;
        let shortfall = (cap - own).max(0.0);
        q / n - config.effort_cost() * (1.0 - ext.cost_tolerance * loyalty) * own
            + ext.internalization * loyalty * mates
            + ext.warm_glow * loyalty * own
            - ext.guilt * loyalty * shortfall * shortfall
    };
    golden_section_max(objective, 0.0, cap, 1e-8)
}

/// Equilibrium of the four-mechanism model: the generic damped
/// best-response iteration with the numeric response rule plugged in.
pub fn solve_extended_tpe(
    config: &TeamConfig,
    ext: &ExtendedStrengths,
    loyalties: &LoyaltyProfile,
    settings: &SolverSettings,
) -> Result<EquilibriumResult, ModelError> {
    if loyalties.len() != config.team_size() {
        return Err(ModelError::DimensionMismatch {
            expected: config.team_size(),
            actual: loyalties.len(),
        });
    }
    let thetas = loyalties.values().to_vec();
    let (efforts, iterations, converged, residual) =
        iterate_best_responses(config, settings, |member, others_total| {
            extended_best_response_unchecked(config, ext, thetas[member], others_total)
        })?;
    let utilities = (0..config.team_size())
        .map(|i| extended_utility_unchecked(config, ext, thetas[i], &efforts, i))
        .collect();
    Ok(EquilibriumResult {
        profile: ActionProfile::new(efforts),
        utilities,
        iterations,
        converged,
        residual,
    })
}
