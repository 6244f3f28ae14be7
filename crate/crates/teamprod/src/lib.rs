//! Team production with loyalty mechanisms.
//!
//! A numerical laboratory for the collective-action problem inside teams:
//! output is produced from pooled effort with diminishing returns and shared
//! equally, so purely self-interested members free-ride. Loyalty enters
//! through two mechanisms (internalising teammates' payoffs and tolerating
//! effort cost) that reshape best responses and lift the equilibrium.
//!
//! The crate provides:
//!
//! - [`model`]: production, payoffs, the loyalty modifier, utilities, and
//!   marginal analysis as pure functions.
//! - [`equilibrium`]: the closed-form best response, a damped fixed-point
//!   solver for team production equilibria, analytic symmetric baselines,
//!   the social optimum, and welfare loss.
//! - [`translation`]: loyalty scoring from weighted factors, dependency
//!   coefficients, team cohesion, bargaining power, and the loyalty gap.
//! - [`extended`]: the four-mechanism decomposition with warm glow and
//!   quadratic guilt.
//! - [`dynamics`]: output-coupled loyalty evolution with virtuous/vicious
//!   regime classification.
//! - [`harness`]: the factorial validation sweep, six behavioral targets,
//!   mechanism synergy, and Monte Carlo robustness.
//! - [`stats`]: bootstrap intervals, paired t-test, Cohen's d, and
//!   correlation, self-contained.
//! - [`scenario`]: versioned scenario files, case studies with an automated
//!   scoring rubric, and counterfactuals.
//! - [`report`]: deterministic CSV/JSON writers with atomic file output.
//!
//! Start with the runnable examples (`cargo run --example solve_equilibrium`,
//! `--example validation_sweep`, `--example apache_case_study`, ...); each
//! one exercises a major capability end to end.

pub mod dynamics;
pub mod equilibrium;
pub mod extended;
pub mod harness;
pub mod model;
pub mod optimize;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod translation;

pub use equilibrium::{
    analytic_symmetric_equilibrium, best_response, social_optimum, solve_tpe, welfare_loss,
    EquilibriumResult, SolverSettings,
};
pub use model::{
    base_payoff, loyalty_modifier, marginal_utility, team_output, teammates_payoff, utility,
    ActionProfile, LoyaltyProfile, MechanismStrengths, ModelError, TeamConfig,
};
