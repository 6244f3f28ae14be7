//! Factorial validation sweep, behavioral-target evaluation, mechanism
//! synergy decomposition, and Monte Carlo robustness testing.
//!
//! A sweep enumerates the production grid, solves the symmetric equilibrium
//! at every loyalty level (plus the 0, 0.1 and 0.9 auxiliaries), and scores
//! six behavioral targets. Monotone targets treat ties at the effort cap as
//! consistent: once the cap binds, effort cannot keep rising by
//! construction. Differentiation and synergy are evaluated on the solver's
//! capped equilibria, with the uncapped closed-form ratios reported
//! alongside for comparison against published headline magnitudes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{
    analytic_symmetric_equilibrium, solve_tpe, symmetric_equilibrium_unclamped, SolverSettings,
};
use crate::model::{
    output_of_total, utility_unchecked, LoyaltyProfile, MechanismStrengths, ModelError, TeamConfig,
};
use crate::stats::{bootstrap_mean_ci, cohens_d, mean, paired_t_test, BootstrapResult, StatsError};

/// Efforts within this distance of the cap count as saturated when the
/// monotone targets decide whether a tie is acceptable.
const CAP_TOL: f64 = 1e-6;
/// Numerical slack for comparing two solved efforts.
const EFFORT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("grid parameter `{0}` has no values")]
    EmptyGrid(&'static str),
    #[error("grid parameter `{name}` has invalid value {value}")]
    InvalidGridValue { name: &'static str, value: f64 },
    #[error("auxiliary solution at loyalty {0} missing")]
    MissingAuxiliary(f64),
    #[error("noise fraction {0} outside [0, 1)")]
    InvalidNoise(f64),
    #[error("trial count must be >= 1")]
    NoTrials,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Value lists for the factorial sweep. The grid is the Cartesian product,
/// ordered with `productivity` varying slowest and `loyalty` fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub productivity: Vec<f64>,
    pub returns_exponent: Vec<f64>,
    pub effort_cost: Vec<f64>,
    pub team_size: Vec<usize>,
    pub loyalty: Vec<f64>,
    pub mech: MechanismStrengths,
    pub effort_cap: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            productivity: vec![10.0, 15.0, 20.0, 25.0, 30.0],
            returns_exponent: vec![0.40, 0.45, 0.50, 0.55, 0.60],
            effort_cost: vec![1.5, 2.0, 2.5, 3.0, 3.5],
            team_size: vec![3, 4, 5, 6, 8],
            loyalty: vec![0.0, 0.225, 0.45, 0.675, 0.9],
            mech: MechanismStrengths::default(),
            effort_cap: 10.0,
        }
    }
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.productivity.len()
            * self.returns_exponent.len()
            * self.effort_cost.len()
            * self.team_size.len()
            * self.loyalty.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<(), HarnessError> {
        for (name, list) in [
            ("productivity", &self.productivity),
            ("returns_exponent", &self.returns_exponent),
            ("effort_cost", &self.effort_cost),
            ("loyalty", &self.loyalty),
        ] {
            if list.is_empty() {
                return Err(HarnessError::EmptyGrid(name));
            }
        }
        if self.team_size.is_empty() {
            return Err(HarnessError::EmptyGrid("team_size"));
        }
        for &theta in &self.loyalty {
            if !theta.is_finite() || !(0.0..=1.0).contains(&theta) {
                return Err(HarnessError::InvalidGridValue {
                    name: "loyalty",
                    value: theta,
                });
            }
        }
        Ok(())
    }

    /// Midpoint element of each value list: the trial base for robustness
    /// testing. For the default grid this is `(20, 0.5, 2.5, 5)`.
    pub fn base_point(&self) -> (f64, f64, f64, usize) {
        (
            self.productivity[self.productivity.len() / 2],
            self.returns_exponent[self.returns_exponent.len() / 2],
            self.effort_cost[self.effort_cost.len() / 2],
            self.team_size[self.team_size.len() / 2],
        )
    }
}

/// One enumerated grid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub index: usize,
    pub productivity: f64,
    pub returns_exponent: f64,
    pub effort_cost: f64,
    pub team_size: usize,
    pub loyalty: f64,
}

/// Enumerates the full grid in a stable, documented order: the Cartesian
/// product with parameters varying fastest from the right of
/// (productivity, returns_exponent, effort_cost, team_size, loyalty).
pub fn generate_grid(spec: &GridSpec) -> Result<Vec<GridPoint>, HarnessError> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.len());
    let mut index = 0;
    for &omega in &spec.productivity {
        for &beta in &spec.returns_exponent {
            for &cost in &spec.effort_cost {
                for &n in &spec.team_size {
                    for &theta in &spec.loyalty {
                        points.push(GridPoint {
                            index,
                            productivity: omega,
                            returns_exponent: beta,
                            effort_cost: cost,
                            team_size: n,
                            loyalty: theta,
                        });
                        index += 1;
                    }
                }
            }
        }
    }
    Ok(points)
}

/// Symmetric equilibrium summary at one loyalty level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolvedPoint {
    pub loyalty: f64,
    /// Per-member equilibrium effort (capped).
    pub effort: f64,
    /// Closed-form per-member effort before the cap.
    pub effort_unclamped: f64,
    pub total_effort: f64,
    pub output: f64,
    pub utility: f64,
    pub converged: bool,
    pub residual: f64,
    pub at_cap: bool,
}

/// All solutions for one production-parameter combination: the grid
/// loyalty levels plus the 0 / 0.1 / 0.9 auxiliaries, sorted by loyalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboSolutions {
    pub combo_index: usize,
    pub param_indices: [usize; 4],
    pub productivity: f64,
    pub returns_exponent: f64,
    pub effort_cost: f64,
    pub team_size: usize,
    pub solutions: Vec<SolvedPoint>,
    pub synergy: Vec<SynergyResult>,
}

impl ComboSolutions {
    pub fn config(&self, cap: f64) -> Result<TeamConfig, ModelError> {
        TeamConfig::new(
            self.productivity,
            self.returns_exponent,
            self.effort_cost,
            self.team_size,
            cap,
        )
    }

    pub fn solution_at(&self, loyalty: f64) -> Result<&SolvedPoint, HarnessError> {
        self.solutions
            .iter()
            .find(|s| s.loyalty == loyalty)
            .ok_or(HarnessError::MissingAuxiliary(loyalty))
    }
}

/// Equilibrium efforts with each mechanism active alone and in combination,
/// all at the same loyalty level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynergyResult {
    pub loyalty: f64,
    pub baseline_effort: f64,
    pub benefit_only_effort: f64,
    pub cost_only_effort: f64,
    pub combined_effort: f64,
    /// `(combined - baseline) / ((benefit - baseline) + (cost - baseline))`;
    /// `None` when the individual effects do not add up to a positive
    /// denominator.
    pub synergy_ratio: Option<f64>,
}

fn solve_symmetric(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    settings: &SolverSettings,
) -> Result<SolvedPoint, ModelError> {
    let loyalties = LoyaltyProfile::uniform(config.team_size(), loyalty)?;
    let result = solve_tpe(config, mech, &loyalties, settings)?;
    let effort = result.profile.efforts()[0];
    let total = result.total_effort();
    let profile = result.profile.efforts().to_vec();
    Ok(SolvedPoint {
        loyalty,
        effort,
        effort_unclamped: symmetric_equilibrium_unclamped(config, mech, loyalty)?,
        total_effort: total,
        output: output_of_total(config, total),
        utility: utility_unchecked(config, mech, loyalty, &profile, 0),
        converged: result.converged,
        residual: result.residual,
        at_cap: effort >= config.effort_cap() - CAP_TOL,
    })
}

/// Decomposes the loyalty effect at one configuration: solves the symmetric
/// equilibrium with no mechanism, each mechanism alone, and both together.
pub fn synergy_analysis(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    loyalty: f64,
    settings: &SolverSettings,
) -> Result<SynergyResult, HarnessError> {
    if !loyalty.is_finite() || loyalty <= 0.0 || loyalty > 1.0 {
        return Err(HarnessError::InvalidGridValue {
            name: "loyalty",
            value: loyalty,
        });
    }
    let none = MechanismStrengths::none();
    let benefit_only = MechanismStrengths::new(mech.loyalty_benefit(), 0.0)?;
    let cost_only = MechanismStrengths::new(0.0, mech.cost_tolerance())?;
    let baseline = solve_symmetric(config, &none, loyalty, settings)?.effort;
    let benefit = solve_symmetric(config, &benefit_only, loyalty, settings)?.effort;
    let cost = solve_symmetric(config, &cost_only, loyalty, settings)?.effort;
    let combined = solve_symmetric(config, mech, loyalty, settings)?.effort;
    let denominator = (benefit - baseline) + (cost - baseline);
    let synergy_ratio = if denominator > 0.0 {
        Some((combined - baseline) / denominator)
    } else {
        None
    };
    Ok(SynergyResult {
        loyalty,
        baseline_effort: baseline,
        benefit_only_effort: benefit,
        cost_only_effort: cost,
        combined_effort: combined,
        synergy_ratio,
    })
}

/// Ratio of symmetric equilibrium effort at loyalty 0.9 to loyalty 0.1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentiationResult {
    pub high_effort: f64,
    pub low_effort: f64,
    /// Capped-equilibrium ratio; infinite when the low effort is zero.
    pub ratio: f64,
    /// Closed-form ratio before the cap binds.
    pub unclamped_ratio: f64,
    /// True when the cap binds at either endpoint.
    pub capped: bool,
}

/// Effort differentiation between high (0.9) and low (0.1) loyalty for one
/// configuration.
pub fn effort_differentiation(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    settings: &SolverSettings,
) -> Result<DifferentiationResult, HarnessError> {
    let high = solve_symmetric(config, mech, 0.9, settings)?;
    let low = solve_symmetric(config, mech, 0.1, settings)?;
    let ratio = if low.effort > 0.0 {
        high.effort / low.effort
    } else {
        f64::INFINITY
    };
    Ok(DifferentiationResult {
        high_effort: high.effort,
        low_effort: low.effort,
        ratio,
        unclamped_ratio: high.effort_unclamped / low.effort_unclamped,
        capped: high.at_cap || low.at_cap,
    })
}

/// Execution controls for the sweep.
#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Worker threads; `None` leaves the choice to the global pool.
    pub workers: Option<usize>,
    pub solver: SolverSettings,
    pub bootstrap_resamples: usize,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            workers: None,
            solver: SolverSettings::default(),
            bootstrap_resamples: 10_000,
            seed: 20250901,
        }
    }
}

/// Achievement of one behavioral target over its evaluation units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub achieved: usize,
    pub units: usize,
    pub fraction: f64,
    /// Fraction the original study reports for the same target.
    pub reference_fraction: f64,
}

fn summarize(achieved: usize, units: usize, reference_fraction: f64) -> TargetSummary {
    TargetSummary {
        achieved,
        units,
        fraction: if units == 0 {
            0.0
        } else {
            achieved as f64 / units as f64
        },
        reference_fraction,
    }
}

/// Six behavioral targets scored over the grid.
///
/// Units differ by target: the free-riding baseline, monotonicity and
/// differentiation are judged once per production combination; the team-size
/// effect once per (productivity, returns, cost, low loyalty) group; synergy
/// once per (combination, positive loyalty); bounds once per grid row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub free_riding_baseline: TargetSummary,
    pub loyalty_monotonicity: TargetSummary,
    pub effort_differentiation: TargetSummary,
    pub team_size_effect: TargetSummary,
    pub mechanism_synergy: TargetSummary,
    pub bounded_outcomes: TargetSummary,
}

/// Per-combination target detail used to build rows and the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComboTargets {
    pub combo_index: usize,
    pub baseline_ok: bool,
    pub baseline_relative_error: f64,
    pub monotone_ok: bool,
    pub differentiation_ratio: f64,
    pub differentiation_unclamped_ratio: f64,
    pub differentiation_ok: bool,
}

/// Monotone comparison that tolerates ties once the cap has been reached:
/// strictly increasing while interior, non-decreasing always.
fn monotone_increasing_with_cap(values: &[f64], cap: f64) -> bool {
    values.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        b >= a - EFFORT_TOL && (b > a + EFFORT_TOL || b >= cap - CAP_TOL)
    })
}

/// Strictly decreasing allowing ties only while both values sit at the cap.
fn monotone_decreasing_with_cap(values: &[f64], cap: f64) -> bool {
    values.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        b <= a + EFFORT_TOL && (a - b > EFFORT_TOL || a >= cap - CAP_TOL)
    })
}

// (combo index, parameter indices, productivity, returns, cost, team size)
type ComboKey = (usize, [usize; 4], f64, f64, f64, usize);

/// Solves every production combination of the grid at all required loyalty
/// levels (grid values plus the 0 / 0.1 / 0.9 auxiliaries) and the synergy
/// decompositions. Parallel over combinations; output order is fixed.
pub fn solve_grid(
    spec: &GridSpec,
    options: &SweepOptions,
) -> Result<Vec<ComboSolutions>, HarnessError> {
    spec.validate()?;
    let mut theta_set: Vec<f64> = spec.loyalty.clone();
    for aux in [0.0, 0.1, 0.9] {
        if !theta_set.contains(&aux) {
            theta_set.push(aux);
        }
    }
    theta_set.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut combos = Vec::new();
    let mut combo_index = 0;
    for (iw, &omega) in spec.productivity.iter().enumerate() {
        for (ib, &beta) in spec.returns_exponent.iter().enumerate() {
            for (ic, &cost) in spec.effort_cost.iter().enumerate() {
                for (in_, &n) in spec.team_size.iter().enumerate() {
                    combos.push((combo_index, [iw, ib, ic, in_], omega, beta, cost, n));
                    combo_index += 1;
                }
            }
        }
    }

    let solve_all = |combos: &[ComboKey]| {
        combos
            .par_iter()
            .map(|&(combo_index, param_indices, omega, beta, cost, n)| {
                let config = TeamConfig::new(omega, beta, cost, n, spec.effort_cap)?;
                let solutions = theta_set
                    .iter()
                    .map(|&theta| solve_symmetric(&config, &spec.mech, theta, &options.solver))
                    .collect::<Result<Vec<_>, _>>()?;
                let synergy = spec
                    .loyalty
                    .iter()
                    .filter(|&&theta| theta > 0.0)
                    .map(|&theta| synergy_analysis(&config, &spec.mech, theta, &options.solver))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(ComboSolutions {
                    combo_index,
                    param_indices,
                    productivity: omega,
                    returns_exponent: beta,
                    effort_cost: cost,
                    team_size: n,
                    solutions,
                    synergy,
                })
            })
            .collect::<Result<Vec<_>, HarnessError>>()
    };

    let mut solved = match options.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(|| solve_all(&combos)),
        None => solve_all(&combos),
    }?;
    solved.sort_by_key(|c| c.combo_index);
    Ok(solved)
}

/// Scores the six behavioral targets over solved grid results.
pub fn evaluate_targets(
    spec: &GridSpec,
    solved: &[ComboSolutions],
) -> Result<(TargetReport, Vec<ComboTargets>), HarnessError> {
    let cap = spec.effort_cap;
    let mut combo_targets = Vec::with_capacity(solved.len());
    let mut baseline_hits = 0;
    let mut monotone_hits = 0;
    let mut differentiation_hits = 0;
    let mut synergy_hits = 0;
    let mut synergy_units = 0;
    let mut bounded_hits = 0;
    let mut bounded_units = 0;

    for combo in solved {
        let config = combo.config(cap)?;
        let mech = &spec.mech;

        let zero = combo.solution_at(0.0)?;
        let analytic = analytic_symmetric_equilibrium(&config, mech, 0.0)?;
        let baseline_relative_error = (zero.effort - analytic).abs() / analytic;
        let baseline_ok = baseline_relative_error < 0.05;
        baseline_hits += baseline_ok as usize;

        let efforts: Vec<f64> = combo.solutions.iter().map(|s| s.effort).collect();
        let monotone_ok = monotone_increasing_with_cap(&efforts, cap);
        monotone_hits += monotone_ok as usize;

        let high = combo.solution_at(0.9)?;
        let low = combo.solution_at(0.1)?;
        let differentiation_ratio = if low.effort > 0.0 {
            high.effort / low.effort
        } else {
            f64::INFINITY
        };
        let differentiation_ok = differentiation_ratio > 2.0;
        differentiation_hits += differentiation_ok as usize;

        for s in &combo.synergy {
            synergy_units += 1;
            if matches!(s.synergy_ratio, Some(r) if r > 1.1) {
                synergy_hits += 1;
            }
        }

        for &theta in &spec.loyalty {
            let point = combo.solution_at(theta)?;
            bounded_units += 1;
            if point.effort >= 0.0 && point.effort <= cap {
                bounded_hits += 1;
            }
        }

        combo_targets.push(ComboTargets {
            combo_index: combo.combo_index,
            baseline_ok,
            baseline_relative_error,
            monotone_ok,
            differentiation_ratio,
            differentiation_unclamped_ratio: high.effort_unclamped / low.effort_unclamped,
            differentiation_ok,
        });
    }

    // Team-size effect: group combos by (productivity, returns, cost) and
    // check effort decreasing in team size at every low loyalty level.
    let low_thetas: Vec<f64> = spec.loyalty.iter().copied().filter(|&t| t < 0.3).collect();
    let mut team_size_hits = 0;
    let mut team_size_units = 0;
    let triples = spec.productivity.len() * spec.returns_exponent.len() * spec.effort_cost.len();
    let n_count = spec.team_size.len();
    if n_count > 1 {
        for triple in 0..triples {
            let group: Vec<&ComboSolutions> = solved[triple * n_count..(triple + 1) * n_count]
                .iter()
                .collect();
            for &theta in &low_thetas {
                team_size_units += 1;
                let series: Vec<f64> = group
                    .iter()
                    .map(|c| c.solution_at(theta).map(|s| s.effort))
                    .collect::<Result<_, _>>()?;
                if monotone_decreasing_with_cap(&series, cap) {
                    team_size_hits += 1;
                }
            }
        }
    }

    let report = TargetReport {
        free_riding_baseline: summarize(baseline_hits, solved.len(), 0.965),
        loyalty_monotonicity: summarize(monotone_hits, solved.len(), 1.0),
        effort_differentiation: summarize(differentiation_hits, solved.len(), 1.0),
        team_size_effect: summarize(team_size_hits, team_size_units, 1.0),
        mechanism_synergy: summarize(synergy_hits, synergy_units, 0.995),
        bounded_outcomes: summarize(bounded_hits, bounded_units, 1.0),
    };
    Ok((report, combo_targets))
}

/// One output row per grid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub config_index: usize,
    pub productivity: f64,
    pub returns_exponent: f64,
    pub effort_cost: f64,
    pub team_size: usize,
    pub loyalty: f64,
    pub effort: f64,
    pub effort_unclamped: f64,
    pub total_effort: f64,
    pub output: f64,
    pub utility: f64,
    pub converged: bool,
    pub at_cap: bool,
    pub baseline_ok: bool,
    pub monotone_ok: bool,
    pub differentiation_ratio: f64,
    pub differentiation_ok: bool,
    pub team_size_ok: Option<bool>,
    pub synergy_ratio: Option<f64>,
    pub synergy_ok: Option<bool>,
    pub bounded_ok: bool,
}

/// Sweep-level statistics over per-combination differentiation. The test
/// statistics are `None` on degenerate grids (fewer than two combinations
/// or zero variance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStatistics {
    pub median_differentiation: f64,
    pub mean_differentiation: f64,
    /// Median of the closed-form (uncapped) ratios; comparable to the
    /// published headline median.
    pub median_differentiation_unclamped: f64,
    pub bootstrap_differentiation: BootstrapResult,
    pub paired_t_high_vs_low: Option<f64>,
    pub paired_t_p_value: Option<f64>,
    pub cohens_d_high_vs_low: Option<f64>,
}

/// Reference magnitudes reported by the original study, carried in the
/// summary for side-by-side comparison. Never asserted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReferences {
    pub median_differentiation: f64,
    pub t_statistic: f64,
    pub cohens_d: f64,
    pub monte_carlo_monotonicity_fraction: f64,
    pub monte_carlo_differentiation_fraction: f64,
    pub monte_carlo_mean_differentiation: f64,
    pub monte_carlo_sd_differentiation: f64,
}

impl Default for StudyReferences {
    fn default() -> Self {
        Self {
            median_differentiation: 15.04,
            t_statistic: 17.86,
            cohens_d: 0.71,
            monte_carlo_monotonicity_fraction: 1.0,
            monte_carlo_differentiation_fraction: 0.411,
            monte_carlo_mean_differentiation: 2.70,
            monte_carlo_sd_differentiation: 2.43,
        }
    }
}

/// Full sweep output: rows, target report, statistics, references.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub grid_size: usize,
    pub rows: Vec<SweepRow>,
    pub targets: TargetReport,
    pub statistics: SweepStatistics,
    pub references: StudyReferences,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n.is_multiple_of(2) {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    } else {
        values[n / 2]
    }
}

/// Runs the full factorial sweep: solve, score targets, aggregate
/// statistics. Deterministic for a given spec, seed and solver settings,
/// regardless of worker count.
pub fn run_sweep(spec: &GridSpec, options: &SweepOptions) -> Result<SweepReport, HarnessError> {
    let solved = solve_grid(spec, options)?;
    let (targets, combo_targets) = evaluate_targets(spec, &solved)?;

    // Team-size pass/fail per (triple, theta) group, redistributed to rows.
    let low_thetas: Vec<f64> = spec.loyalty.iter().copied().filter(|&t| t < 0.3).collect();
    let n_count = spec.team_size.len();
    let triples = spec.productivity.len() * spec.returns_exponent.len() * spec.effort_cost.len();
    let mut group_ok = vec![std::collections::BTreeMap::new(); triples];
    if n_count > 1 {
        for (triple, flags) in group_ok.iter_mut().enumerate() {
            let group = &solved[triple * n_count..(triple + 1) * n_count];
            for (ti, &theta) in low_thetas.iter().enumerate() {
                let series: Vec<f64> = group
                    .iter()
                    .map(|c| c.solution_at(theta).map(|s| s.effort))
                    .collect::<Result<_, _>>()?;
                flags.insert(ti, monotone_decreasing_with_cap(&series, spec.effort_cap));
            }
        }
    }

    let theta_count = spec.loyalty.len();
    let mut rows = Vec::with_capacity(solved.len() * theta_count);
    for (combo, flags) in solved.iter().zip(&combo_targets) {
        let triple = combo.combo_index / n_count;
        for (ti, &theta) in spec.loyalty.iter().enumerate() {
            let point = combo.solution_at(theta)?;
            let synergy = combo.synergy.iter().find(|s| s.loyalty == theta);
            let low_index = low_thetas.iter().position(|&t| t == theta);
            let team_size_ok = if n_count > 1 {
                low_index.map(|li| group_ok[triple][&li])
            } else {
                None
            };
            rows.push(SweepRow {
                config_index: combo.combo_index * theta_count + ti,
                productivity: combo.productivity,
                returns_exponent: combo.returns_exponent,
                effort_cost: combo.effort_cost,
                team_size: combo.team_size,
                loyalty: theta,
                effort: point.effort,
                effort_unclamped: point.effort_unclamped,
                total_effort: point.total_effort,
                output: point.output,
                utility: point.utility,
                converged: point.converged,
                at_cap: point.at_cap,
                baseline_ok: flags.baseline_ok,
                monotone_ok: flags.monotone_ok,
                differentiation_ratio: flags.differentiation_ratio,
                differentiation_ok: flags.differentiation_ok,
                team_size_ok,
                synergy_ratio: synergy.and_then(|s| s.synergy_ratio),
                synergy_ok: synergy.map(|s| matches!(s.synergy_ratio, Some(r) if r > 1.1)),
                bounded_ok: point.effort >= 0.0 && point.effort <= spec.effort_cap,
            });
        }
    }

    let mut ratios: Vec<f64> = combo_targets
        .iter()
        .map(|c| c.differentiation_ratio)
        .collect();
    let mut unclamped: Vec<f64> = combo_targets
        .iter()
        .map(|c| c.differentiation_unclamped_ratio)
        .collect();
    let high: Vec<f64> = solved
        .iter()
        .map(|c| c.solution_at(0.9).map(|s| s.effort))
        .collect::<Result<_, _>>()?;
    let low: Vec<f64> = solved
        .iter()
        .map(|c| c.solution_at(0.1).map(|s| s.effort))
        .collect::<Result<_, _>>()?;
    let bootstrap = bootstrap_mean_ci(&ratios, options.bootstrap_resamples, 0.95, options.seed)?;
    let t_test = paired_t_test(&high, &low).ok();
    let d = cohens_d(&high, &low).ok();
    let statistics = SweepStatistics {
        median_differentiation: median(&mut ratios),
        mean_differentiation: mean(&ratios),
        median_differentiation_unclamped: median(&mut unclamped),
        bootstrap_differentiation: bootstrap,
        paired_t_high_vs_low: t_test.map(|(t, _)| t),
        paired_t_p_value: t_test.map(|(_, p)| p),
        cohens_d_high_vs_low: d,
    };

    Ok(SweepReport {
        grid_size: spec.len(),
        rows,
        targets,
        statistics,
        references: StudyReferences::default(),
    })
}

/// One robustness trial: the perturbed parameters and what they produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub productivity: f64,
    pub returns_exponent: f64,
    pub effort_cost: f64,
    pub team_size: usize,
    pub loyalty_benefit: f64,
    pub cost_tolerance: f64,
    pub low_loyalty: f64,
    pub high_loyalty: f64,
    pub monotone_ok: bool,
    pub differentiation_ratio: f64,
}

/// Monte Carlo robustness summary; bit-identical for identical seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub trials: usize,
    pub noise_fraction: f64,
    pub seed: u64,
    pub monotonicity_fraction: f64,
    pub differentiation_gt2_fraction: f64,
    pub mean_differentiation: f64,
    pub sd_differentiation: f64,
    pub rows: Vec<TrialRow>,
    pub references: StudyReferences,
}

/// Perturbs the grid's base configuration with multiplicative uniform noise
/// on (productivity, returns, cost, both mechanism strengths, and the 0.1 /
/// 0.9 loyalty endpoints), then re-checks loyalty monotonicity and the
/// differentiation threshold. Team size is never perturbed. Each trial
/// draws from its own seeded stream, so results do not depend on execution
/// order.
pub fn monte_carlo_robustness(
    spec: &GridSpec,
    noise_fraction: f64,
    trials: usize,
    seed: u64,
) -> Result<RobustnessReport, HarnessError> {
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    spec.validate()?;
    if !(0.0..1.0).contains(&noise_fraction) {
        return Err(HarnessError::InvalidNoise(noise_fraction));
    }
    if trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let (base_omega, base_beta, base_cost, n) = spec.base_point();
    let mut thetas = spec.loyalty.clone();
    thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let settings = SolverSettings::default();

    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64 + 1);
            let factor = |rng: &mut ChaCha8Rng| {
                if noise_fraction == 0.0 {
                    1.0
                } else {
                    rng.random_range(1.0 - noise_fraction..=1.0 + noise_fraction)
                }
            };
            let omega = base_omega * factor(&mut rng);
            let beta = (base_beta * factor(&mut rng)).clamp(0.01, 0.99);
            let cost = base_cost * factor(&mut rng);
            let benefit = spec.mech.loyalty_benefit() * factor(&mut rng);
            let tolerance = (spec.mech.cost_tolerance() * factor(&mut rng)).clamp(0.0, 0.99);
            let low_loyalty = (0.1 * factor(&mut rng)).clamp(0.0, 1.0);
            let high_loyalty = (0.9 * factor(&mut rng)).clamp(0.0, 1.0);

            let config = TeamConfig::new(omega, beta, cost, n, spec.effort_cap)?;
            let mech = MechanismStrengths::new(benefit, tolerance)?;
            let efforts: Vec<f64> = thetas
                .iter()
                .map(|&t| solve_symmetric(&config, &mech, t, &settings).map(|s| s.effort))
                .collect::<Result<_, _>>()?;
            let monotone_ok = monotone_increasing_with_cap(&efforts, spec.effort_cap);
            let high = solve_symmetric(&config, &mech, high_loyalty, &settings)?.effort;
            let low = solve_symmetric(&config, &mech, low_loyalty, &settings)?.effort;
            let differentiation_ratio = if low > 0.0 { high / low } else { f64::INFINITY };
            Ok(TrialRow {
                trial,
                productivity: omega,
                returns_exponent: beta,
                effort_cost: cost,
                team_size: n,
                loyalty_benefit: benefit,
                cost_tolerance: tolerance,
                low_loyalty,
                high_loyalty,
                monotone_ok,
                differentiation_ratio,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;

    let mut rows = rows;
    rows.sort_by_key(|r| r.trial);
    let monotone = rows.iter().filter(|r| r.monotone_ok).count();
    let above = rows
        .iter()
        .filter(|r| r.differentiation_ratio > 2.0)
        .count();
    let finite: Vec<f64> = rows
        .iter()
        .map(|r| r.differentiation_ratio)
        .filter(|r| r.is_finite())
        .collect();
    let mean_diff = mean(&finite);
    let sd = if finite.len() > 1 {
        crate::stats::sample_variance(&finite).sqrt()
    } else {
        0.0
    };
    Ok(RobustnessReport {
        trials,
        noise_fraction,
        seed,
        monotonicity_fraction: monotone as f64 / trials as f64,
        differentiation_gt2_fraction: above as f64 / trials as f64,
        mean_differentiation: mean_diff,
        sd_differentiation: sd,
        rows,
        references: StudyReferences::default(),
    })
}
