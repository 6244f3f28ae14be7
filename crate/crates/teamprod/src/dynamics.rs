//! Loyalty evolution coupled to equilibrium output.
//!
//! Each period the team plays the equilibrium at its current loyalty
//! profile; loyalty then moves with the gap between realised output and a
//! target, synchronously for all members, clamped to `[0, 1]`. Depending on
//! which side of the target the initial output falls, trajectories run to a
//! high-loyalty or low-loyalty attractor.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{analytic_symmetric_equilibrium, solve_tpe, SolverSettings};
use crate::model::{output_of_total, LoyaltyProfile, MechanismStrengths, ModelError, TeamConfig};

/// Controls for the loyalty-evolution simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSettings {
    pub periods: usize,
    pub learning_rate: f64,
    /// Output level separating loyalty growth from decay.
    pub output_target: f64,
}

impl DynamicsSettings {
    pub fn new(periods: usize, learning_rate: f64, output_target: f64) -> Result<Self, ModelError> {
        if periods == 0 {
            return Err(ModelError::InvalidParameter {
                name: "periods",
                requirement: ">= 1",
                value: 0.0,
            });
        }
        if !learning_rate.is_finite() || learning_rate < 0.0 {
            return Err(ModelError::InvalidParameter {
                name: "learning_rate",
                requirement: ">= 0",
                value: learning_rate,
            });
        }
        if !output_target.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "output_target",
                requirement: "finite",
                value: output_target,
            });
        }
        Ok(Self {
            periods,
            learning_rate,
            output_target,
        })
    }

    /// 50 periods at learning rate 0.02 with the default output target for
    /// the given environment.
    pub fn defaults_for(
        config: &TeamConfig,
        mech: &MechanismStrengths,
    ) -> Result<Self, ModelError> {
        Self::new(50, 0.02, default_output_target(config, mech)?)
    }
}

/// Default output target: the midpoint between symmetric-equilibrium team
/// output at loyalty 0 and at loyalty 0.9. Placing the target between the
/// low- and high-loyalty outputs is what produces the bifurcation.
pub fn default_output_target(
    config: &TeamConfig,
    mech: &MechanismStrengths,
) -> Result<f64, ModelError> {
    let n = config.team_size() as f64;
    let low = output_of_total(
        config,
        n * analytic_symmetric_equilibrium(config, mech, 0.0)?,
    );
    let high = output_of_total(
        config,
        n * analytic_symmetric_equilibrium(config, mech, 0.9)?,
    );
    Ok(0.5 * (low + high))
}

/// State at one period: the loyalty profile in force, the equilibrium
/// played under it, and the resulting output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub period: usize,
    pub loyalties: Vec<f64>,
    pub efforts: Vec<f64>,
    pub output: f64,
    pub solver_converged: bool,
}

/// Full simulation record: `periods + 1` steps including the initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<TrajectoryStep>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn mean_loyalty_at(&self, period: usize) -> f64 {
        let thetas = &self.steps[period].loyalties;
        thetas.iter().sum::<f64>() / thetas.len() as f64
    }

    /// Mean loyalty over the final quarter of recorded steps.
    pub fn final_quartile_mean_loyalty(&self) -> f64 {
        let count = (self.steps.len() / 4).max(1);
        let tail = &self.steps[self.steps.len() - count..];
        let total: f64 = tail
            .iter()
            .map(|s| s.loyalties.iter().sum::<f64>() / s.loyalties.len() as f64)
            .sum();
        total / count as f64
    }
}

/// Runs the coupled loyalty-output simulation. Deterministic; solver
/// non-convergence in a period is recorded on that step, not raised.
pub fn simulate_loyalty_evolution(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    initial: &LoyaltyProfile,
    dynamics: &DynamicsSettings,
    solver: &SolverSettings,
) -> Result<Trajectory, ModelError> {
    if initial.len() != config.team_size() {
        return Err(ModelError::DimensionMismatch {
            expected: config.team_size(),
            actual: initial.len(),
        });
    }
    let mut loyalties = initial.clone();
    let mut steps = Vec::with_capacity(dynamics.periods + 1);
    for period in 0..=dynamics.periods {
        let equilibrium = solve_tpe(config, mech, &loyalties, solver)?;
        let output = output_of_total(config, equilibrium.total_effort());
        steps.push(TrajectoryStep {
            period,
            loyalties: loyalties.values().to_vec(),
            efforts: equilibrium.profile.efforts().to_vec(),
            output,
            solver_converged: equilibrium.converged,
        });
        if period < dynamics.periods {
            // synchronous update: every member reacts to the same output gap
            let delta = dynamics.learning_rate * (output - dynamics.output_target);
            loyalties = loyalties.shifted(delta);
        }
    }
    Ok(Trajectory { steps })
}

/// Trajectory classification by where loyalty ends up relative to where it
/// started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Virtuous,
    Vicious,
    Stationary,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Virtuous => write!(f, "virtuous"),
            Regime::Vicious => write!(f, "vicious"),
            Regime::Stationary => write!(f, "stationary"),
        }
    }
}

/// Virtuous when the final-quartile mean loyalty sits more than 0.05 above
/// the initial mean, vicious when more than 0.05 below, else stationary.
pub fn classify_regime(trajectory: &Trajectory) -> Result<Regime, ModelError> {
    if trajectory.len() < 2 {
        return Err(ModelError::InvalidParameter {
            name: "trajectory",
            requirement: "at least 2 steps",
            value: trajectory.len() as f64,
        });
    }
    let initial = trajectory.mean_loyalty_at(0);
    let terminal = trajectory.final_quartile_mean_loyalty();
    Ok(if terminal > initial + 0.05 {
        Regime::Virtuous
    } else if terminal < initial - 0.05 {
        Regime::Vicious
    } else {
        Regime::Stationary
    })
}
