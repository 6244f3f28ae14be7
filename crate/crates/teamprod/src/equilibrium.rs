//! Best responses and the team production equilibrium.
//!
//! The solver iterates the closed-form best response with damped
//! simultaneous updates until the profile is a fixed point. Damping factor
//! `1/n` keeps the aggregate-effort component contracting while leaving a
//! symmetric start exactly symmetric, so homogeneous-loyalty teams converge
//! to the symmetric equilibrium rather than an arbitrary point on the
//! equilibrium continuum.

use serde::{Deserialize, Serialize};

use crate::model::{
    check_loyalty, utility_unchecked, ActionProfile, LoyaltyProfile, MechanismStrengths,
    ModelError, TeamConfig,
};

/// Convergence controls for the fixed-point solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Infinity-norm tolerance on the best-response residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Start profile; defaults to the midpoint `effort_cap / 2` everywhere.
    pub initial_profile: Option<ActionProfile>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            max_iterations: 1000,
            initial_profile: None,
        }
    }
}

impl SolverSettings {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_initial_profile(mut self, profile: ActionProfile) -> Self {
        self.initial_profile = Some(profile);
        self
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "tolerance",
                requirement: "> 0",
                value: self.tolerance,
            });
        }
        if self.max_iterations == 0 {
            return Err(ModelError::InvalidParameter {
                name: "max_iterations",
                requirement: ">= 1",
                value: 0.0,
            });
        }
        Ok(())
    }
}

/// Converged (or stalled) action profile with diagnostics.
///
/// `converged` means the final best-response residual is at most the
/// requested tolerance; non-convergence is reported here, never as an error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumResult {
    pub profile: ActionProfile,
    pub utilities: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final `max_i |a_i - BR_i(a)|`.
    pub residual: f64,
}

impl EquilibriumResult {
    pub fn total_effort(&self) -> f64 {
        self.profile.total()
    }
}

/// Unclamped best-response target: the total team effort at which the
/// member's marginal utility vanishes.
///
/// `(omega * beta * (1 + benefit*loyalty*(n-1)) / (n * c * (1 - tolerance*loyalty)))^(1/(1-beta))`
pub(crate) fn response_target(config: &TeamConfig, mech: &MechanismStrengths, loyalty: f64) -> f64 {
    let n = config.team_size() as f64;
    let benefit_multiplier = 1.0 + mech.loyalty_benefit() * loyalty * (n - 1.0);
    let cost_multiplier = 1.0 - mech.cost_tolerance() * loyalty;
    let base = config.productivity() * config.returns_exponent() * benefit_multiplier
        / (n * config.effort_cost() * cost_multiplier);
    base.powf(config.elasticity())
}

/// Closed-form best response to the rest of the team contributing
/// `others_total`, clamped to `[0, effort_cap]` after the exponentiation.
pub fn best_response(
    config: &TeamConfig,
    mech: &MechanismStrengths,
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
    let target = response_target(config, mech, loyalty);
    Ok((target - others_total).clamp(0.0, config.effort_cap()))
}

/// Damped simultaneous best-response iteration, generic over the response
/// rule so the extended-mechanism model can reuse it.
///
/// `respond(member, others_total)` must return the member's utility-maximising
/// effort in `[0, effort_cap]`.
pub(crate) fn iterate_best_responses<F>(
    config: &TeamConfig,
    settings: &SolverSettings,
    respond: F,
) -> Result<(Vec<f64>, usize, bool, f64), ModelError>
where
    F: Fn(usize, f64) -> f64,
{
    settings.validate()?;
    let n = config.team_size();
    let mut efforts = match &settings.initial_profile {
        Some(profile) => {
            profile.validate_for(config)?;
            profile.efforts().to_vec()
        }
        None => vec![config.effort_cap() / 2.0; n],
    };
    let relaxation = 1.0 / n as f64;
    let mut responses = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for iteration in 0..settings.max_iterations {
        let total: f64 = efforts.iter().sum();
        residual = 0.0;
        for i in 0..n {
            responses[i] = respond(i, total - efforts[i]);
            residual = residual.max((responses[i] - efforts[i]).abs());
        }
        if residual < settings.tolerance {
            return Ok((efforts, iteration, true, residual));
        }
        for i in 0..n {
            efforts[i] += relaxation * (responses[i] - efforts[i]);
        }
    }
    Ok((efforts, settings.max_iterations, false, residual))
}

/// Solves for a team production equilibrium: a profile where every member's
/// effort is a best response to the rest of the team.
pub fn solve_tpe(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalties: &LoyaltyProfile,
    settings: &SolverSettings,
) -> Result<EquilibriumResult, ModelError> {
    if loyalties.len() != config.team_size() {
        return Err(ModelError::DimensionMismatch {
            expected: config.team_size(),
            actual: loyalties.len(),
        });
    }
    for &theta in loyalties.values() {
        check_loyalty(theta)?;
    }
    let targets: Vec<f64> = loyalties
        .values()
        .iter()
        .map(|&theta| response_target(config, mech, theta))
        .collect();
    let cap = config.effort_cap();
    let (efforts, iterations, converged, residual) =
        iterate_best_responses(config, settings, |member, others_total| {
            (targets[member] - others_total).clamp(0.0, cap)
        })?;
    let utilities = (0..config.team_size())
        .map(|i| utility_unchecked(config, mech, loyalties.values()[i], &efforts, i))
        .collect();
    Ok(EquilibriumResult {
        profile: ActionProfile::new(efforts),
        utilities,
        iterations,
        converged,
        residual,
    })
}

/// Symmetric equilibrium effort per member before the cap is applied:
/// `(1/n) * response_target`.
///
/// Carries the `1/n` factor the first-order condition implies for the
/// symmetric profile; see [`printed_symmetric_equilibrium`] for the variant
/// without it.
pub fn symmetric_equilibrium_unclamped(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    Ok(response_target(config, mech, loyalty) / config.team_size() as f64)
}

/// Symmetric equilibrium effort per member, clamped to `[0, effort_cap]`.
/// At zero loyalty this is the free-riding baseline.
pub fn analytic_symmetric_equilibrium(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
) -> Result<f64, ModelError> {
    Ok(symmetric_equilibrium_unclamped(config, mech, loyalty)?.clamp(0.0, config.effort_cap()))
}

/// Comparison variant that omits the `1/n` factor, i.e. reads the
/// closed-form response target itself as the per-member effort. Kept only
/// so reports can show both candidates next to the numeric solver; the
/// brute-force oracle agrees with [`analytic_symmetric_equilibrium`].
pub fn printed_symmetric_equilibrium(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
) -> Result<f64, ModelError> {
    check_loyalty(loyalty)?;
    Ok(response_target(config, mech, loyalty).clamp(0.0, config.effort_cap()))
}

/// Socially optimal symmetric effort per member before the cap:
/// `(1/n) * (omega*beta/c)^(1/(1-beta))`, the argmax of `Q - c * total`.
pub fn social_optimum_unclamped(config: &TeamConfig) -> f64 {
    let base = config.productivity() * config.returns_exponent() / config.effort_cost();
    base.powf(config.elasticity()) / config.team_size() as f64
}

/// Socially optimal symmetric effort per member, clamped to `[0, effort_cap]`.
pub fn social_optimum(config: &TeamConfig) -> f64 {
    social_optimum_unclamped(config).clamp(0.0, config.effort_cap())
}

/// Total utility gap between the social-optimum profile and the equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareLoss {
    /// `sum_i [U_i(social) - U_i(equilibrium)]` under loyalty-augmented utilities.
    pub loss: f64,
    /// Loss as a fraction of total utility at the social optimum; `None`
    /// when that total is not positive.
    pub loss_fraction: Option<f64>,
    pub social_welfare: f64,
    pub equilibrium_welfare: f64,
    pub social_effort: f64,
    pub equilibrium: EquilibriumResult,
}

/// Depth of the free-riding well: how much total utility the team leaves on
/// the table by playing the equilibrium instead of the symmetric social
/// optimum.
pub fn welfare_loss(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalties: &LoyaltyProfile,
    settings: &SolverSettings,
) -> Result<WelfareLoss, ModelError> {
    let equilibrium = solve_tpe(config, mech, loyalties, settings)?;
    let social_effort = social_optimum(config);
    let social_profile = vec![social_effort; config.team_size()];
    let social_welfare: f64 = (0..config.team_size())
        .map(|i| utility_unchecked(config, mech, loyalties.values()[i], &social_profile, i))
        .sum();
    let equilibrium_welfare: f64 = equilibrium.utilities.iter().sum();
    let loss = social_welfare - equilibrium_welfare;
    let loss_fraction = if social_welfare > 0.0 {
        Some(loss / social_welfare)
    } else {
        None
    };
    Ok(WelfareLoss {
        loss,
        loss_fraction,
        social_welfare,
        equilibrium_welfare,
        social_effort,
        equilibrium,
    })
}
