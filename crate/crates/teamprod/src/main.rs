//! Command-line surface: batch analysis with deterministic, file-based
//! outputs. Exit codes: 0 success, 1 usage error, 2 validation error,
//! 3 runtime or convergence error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use teamprod::dynamics::{
    classify_regime, default_output_target, simulate_loyalty_evolution, DynamicsSettings,
};
use teamprod::equilibrium::{analytic_symmetric_equilibrium, SolverSettings};
use teamprod::harness::{
    monte_carlo_robustness, run_sweep, synergy_analysis, GridSpec, SweepOptions,
};
use teamprod::model::{LoyaltyProfile, MechanismStrengths, TeamConfig};
use teamprod::report::{
    robustness_csv, sig9, sweep_csv, to_json_bytes, trajectory_csv, write_atomic, write_json,
};
use teamprod::scenario::{
    builtin_scenario, case_study_csv, load_scenario, parse_scenario, run_case_study,
    run_counterfactual, Counterfactual, Scenario, ScenarioError,
};

#[derive(Parser)]
#[command(
    name = "teamprod",
    version,
    about = "Team production equilibria under loyalty mechanisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Productivity factor.
    #[arg(long, default_value_t = 20.0)]
    productivity: f64,
    /// Returns-to-scale exponent in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    returns_exponent: f64,
    /// Marginal effort cost.
    #[arg(long, default_value_t = 2.5)]
    effort_cost: f64,
    /// Team size.
    #[arg(long, default_value_t = 5)]
    team_size: usize,
    /// Maximum effort per member.
    #[arg(long, default_value_t = 10.0)]
    effort_cap: f64,
    /// Loyalty benefit strength.
    #[arg(long, default_value_t = 0.8)]
    loyalty_benefit: f64,
    /// Cost tolerance strength.
    #[arg(long, default_value_t = 0.3)]
    cost_tolerance: f64,
}

impl ConfigArgs {
    fn build(&self) -> Result<(TeamConfig, MechanismStrengths), CliError> {
        let config = TeamConfig::new(
            self.productivity,
            self.returns_exponent,
            self.effort_cost,
            self.team_size,
            self.effort_cap,
        )
        .map_err(CliError::validation)?;
        let mech = MechanismStrengths::new(self.loyalty_benefit, self.cost_tolerance)
            .map_err(CliError::validation)?;
        Ok((config, mech))
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Convergence tolerance on the best-response residual.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 1000)]
    max_iterations: usize,
}

impl SolverArgs {
    fn build(&self) -> SolverSettings {
        SolverSettings::default()
            .with_tolerance(self.tolerance)
            .with_max_iterations(self.max_iterations)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve a team production equilibrium from a scenario file or inline
    /// parameters.
    Solve {
        /// Scenario path or builtin name (team_t, system_s, apache).
        #[arg(long)]
        scenario: Option<String>,
        /// Uniform loyalty level used with inline parameters.
        #[arg(long, default_value_t = 0.0)]
        loyalty: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the equilibrium report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the factorial validation sweep and score the behavioral targets.
    Sweep {
        /// Output directory for sweep.csv and summary.json.
        #[arg(long, default_value = "sweep_out")]
        out_dir: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Seed for the bootstrap statistics.
        #[arg(long, default_value_t = 20250901)]
        seed: u64,
        /// Grid overrides, e.g. --team-sizes 3,5,8.
        #[arg(long, value_delimiter = ',')]
        productivities: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        returns_exponents: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        effort_costs: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        team_sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        loyalties: Option<Vec<f64>>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Monte Carlo robustness testing with multiplicative parameter noise.
    Robustness {
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        /// Noise fraction delta; factors are uniform on [1-delta, 1+delta].
        #[arg(long, default_value_t = 0.15)]
        noise: f64,
        #[arg(long, default_value_t = 20250901)]
        seed: u64,
        /// Output directory for robustness.json and trials.csv.
        #[arg(long, default_value = "robustness_out")]
        out_dir: PathBuf,
    },
    /// Simulate output-coupled loyalty evolution.
    Dynamics {
        #[arg(long, default_value_t = 50)]
        periods: usize,
        /// Learning rate for loyalty updates.
        #[arg(long, default_value_t = 0.02)]
        rate: f64,
        /// Output target; defaults to the midpoint rule.
        #[arg(long)]
        target: Option<f64>,
        /// Initial uniform loyalty.
        #[arg(long, default_value_t = 0.3)]
        initial_loyalty: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory for trajectory.csv and dynamics.json.
        #[arg(long, default_value = "dynamics_out")]
        out_dir: PathBuf,
    },
    /// Run a phased case study with optional counterfactuals.
    CaseStudy {
        /// Scenario path or builtin name.
        scenario: String,
        /// Scale mechanism strengths by this factor (counterfactual).
        #[arg(long)]
        scale_mechanisms: Option<f64>,
        /// Cap phase team sizes (counterfactual).
        #[arg(long)]
        cap_team_size: Option<usize>,
        /// Shift phase mean loyalty (counterfactual).
        #[arg(long)]
        shift_loyalty: Option<f64>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Output directory for case_study.json and series.csv.
        #[arg(long, default_value = "case_study_out")]
        out_dir: PathBuf,
    },
    /// Mechanism decomposition at one configuration.
    Synergy {
        /// Loyalty level for the decomposition.
        #[arg(long, default_value_t = 0.7)]
        loyalty: f64,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Optional JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Error with the exit code it maps to.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(err: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            message: err.to_string(),
        }
    }
    fn runtime(err: impl std::fmt::Display) -> Self {
        Self {
            code: 3,
            message: err.to_string(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(err: ScenarioError) -> Self {
        match err {
            ScenarioError::Io { .. } => CliError::runtime(err),
            _ => CliError::validation(err),
        }
    }
}

impl From<teamprod::report::ReportError> for CliError {
    fn from(err: teamprod::report::ReportError) -> Self {
        CliError::runtime(err)
    }
}

fn resolve_scenario(spec: &str) -> Result<Scenario, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        Ok(load_scenario(path)?)
    } else if let Some(text) = builtin_scenario(spec) {
        Ok(parse_scenario(text)?)
    } else {
        Err(CliError::validation(format!(
            "no scenario file at `{spec}` and no builtin scenario with that name"
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap prints help/version through the error path with status 0
            use clap::error::ErrorKind;
            let kind = err.kind();
            let _ = err.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            scenario,
            loyalty,
            config,
            solver,
            out,
        } => cmd_solve(scenario, loyalty, config, solver, out),
        Command::Sweep {
            out_dir,
            workers,
            seed,
            productivities,
            returns_exponents,
            effort_costs,
            team_sizes,
            loyalties,
            solver,
        } => cmd_sweep(
            out_dir,
            workers,
            seed,
            productivities,
            returns_exponents,
            effort_costs,
            team_sizes,
            loyalties,
            solver,
        ),
        Command::Robustness {
            trials,
            noise,
            seed,
            out_dir,
        } => cmd_robustness(trials, noise, seed, out_dir),
        Command::Dynamics {
            periods,
            rate,
            target,
            initial_loyalty,
            config,
            solver,
            out_dir,
        } => cmd_dynamics(
            periods,
            rate,
            target,
            initial_loyalty,
            config,
            solver,
            out_dir,
        ),
        Command::CaseStudy {
            scenario,
            scale_mechanisms,
            cap_team_size,
            shift_loyalty,
            solver,
            out_dir,
        } => cmd_case_study(
            scenario,
            scale_mechanisms,
            cap_team_size,
            shift_loyalty,
            solver,
            out_dir,
        ),
        Command::Synergy {
            loyalty,
            config,
            solver,
            out,
        } => cmd_synergy(loyalty, config, solver, out),
    }
}

fn cmd_solve(
    scenario: Option<String>,
    loyalty: f64,
    config_args: ConfigArgs,
    solver: SolverArgs,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let settings = solver.build();
    let (label, config, result, loyalties) = match scenario {
        Some(spec) => {
            let s = resolve_scenario(&spec)?;
            let result = s.solve(&settings).map_err(CliError::runtime)?;
            (
                s.name.clone(),
                s.config.clone(),
                result,
                s.loyalties.clone(),
            )
        }
        None => {
            let (config, mech) = config_args.build()?;
            let loyalties = LoyaltyProfile::uniform(config.team_size(), loyalty)
                .map_err(CliError::validation)?;
            let result = teamprod::equilibrium::solve_tpe(&config, &mech, &loyalties, &settings)
                .map_err(CliError::runtime)?;
            ("inline".to_string(), config, result, loyalties)
        }
    };

    println!("scenario: {label}");
    println!(
        "team: n={} productivity={} returns={} cost={} cap={}",
        config.team_size(),
        sig9(config.productivity()),
        sig9(config.returns_exponent()),
        sig9(config.effort_cost()),
        sig9(config.effort_cap()),
    );
    println!(
        "converged: {} after {} iterations (residual {:.3e})",
        result.converged, result.iterations, result.residual
    );
    println!("member  loyalty    effort     utility");
    for (i, (&effort, &util)) in result
        .profile
        .efforts()
        .iter()
        .zip(&result.utilities)
        .enumerate()
    {
        println!(
            "{:>6}  {:>7}  {:>8}  {:>10}",
            i,
            sig9(loyalties.values()[i]),
            sig9(effort),
            sig9(util),
        );
    }
    println!(
        "total effort: {}  output: {}",
        sig9(result.total_effort()),
        sig9(teamprod::model::output_of_total(
            &config,
            result.total_effort()
        )),
    );

    if let Some(path) = out {
        write_json(&path, &result)?;
        println!("wrote {}", path.display());
    }
    if !result.converged {
        return Err(CliError::runtime("solver did not converge"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    out_dir: PathBuf,
    workers: Option<usize>,
    seed: u64,
    productivities: Option<Vec<f64>>,
    returns_exponents: Option<Vec<f64>>,
    effort_costs: Option<Vec<f64>>,
    team_sizes: Option<Vec<usize>>,
    loyalties: Option<Vec<f64>>,
    solver: SolverArgs,
) -> Result<(), CliError> {
    let mut spec = GridSpec::default();
    if let Some(v) = productivities {
        spec.productivity = v;
    }
    if let Some(v) = returns_exponents {
        spec.returns_exponent = v;
    }
    if let Some(v) = effort_costs {
        spec.effort_cost = v;
    }
    if let Some(v) = team_sizes {
        spec.team_size = v;
    }
    if let Some(v) = loyalties {
        spec.loyalty = v;
    }
    let options = SweepOptions {
        workers,
        solver: solver.build(),
        bootstrap_resamples: 10_000,
        seed,
    };
    let report = run_sweep(&spec, &options).map_err(CliError::validation)?;

    let t = &report.targets;
    println!("grid: {} configurations", report.grid_size);
    for (name, summary) in [
        ("free-riding baseline (<5% error)", &t.free_riding_baseline),
        ("loyalty monotonicity", &t.loyalty_monotonicity),
        ("effort differentiation (>2.0)", &t.effort_differentiation),
        ("team-size effect (low loyalty)", &t.team_size_effect),
        ("mechanism synergy (>1.1)", &t.mechanism_synergy),
        ("bounded outcomes", &t.bounded_outcomes),
    ] {
        println!(
            "{name:<34} {:>7.4}  ({}/{}; reference {:.3})",
            summary.fraction, summary.achieved, summary.units, summary.reference_fraction
        );
    }
    let s = &report.statistics;
    println!(
        "differentiation median {} (uncapped {}; reference {})",
        sig9(s.median_differentiation),
        sig9(s.median_differentiation_unclamped),
        sig9(report.references.median_differentiation),
    );
    let fmt_opt = |v: Option<f64>| v.map(sig9).unwrap_or_else(|| "n/a".to_string());
    println!(
        "paired t = {} (p = {}), Cohen's d = {}",
        fmt_opt(s.paired_t_high_vs_low),
        fmt_opt(s.paired_t_p_value),
        fmt_opt(s.cohens_d_high_vs_low),
    );

    let csv_path = out_dir.join("sweep.csv");
    write_atomic(&csv_path, sweep_csv(&report).as_bytes())?;
    let mut summary = report.clone();
    summary.rows.clear();
    let json_path = out_dir.join("summary.json");
    write_atomic(&json_path, &to_json_bytes(&summary)?)?;
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

fn cmd_robustness(trials: usize, noise: f64, seed: u64, out_dir: PathBuf) -> Result<(), CliError> {
    let spec = GridSpec::default();
    let report =
        monte_carlo_robustness(&spec, noise, trials, seed).map_err(CliError::validation)?;
    println!(
        "trials: {}  noise: +/-{}%  seed: {}",
        report.trials,
        sig9(noise * 100.0),
        seed
    );
    println!(
        "loyalty monotonicity: {:.4} (reference {:.3})",
        report.monotonicity_fraction, report.references.monte_carlo_monotonicity_fraction
    );
    println!(
        "differentiation > 2: {:.4} (reference {:.3})",
        report.differentiation_gt2_fraction, report.references.monte_carlo_differentiation_fraction
    );
    println!(
        "mean differentiation: {} +/- {} (reference {} +/- {})",
        sig9(report.mean_differentiation),
        sig9(report.sd_differentiation),
        sig9(report.references.monte_carlo_mean_differentiation),
        sig9(report.references.monte_carlo_sd_differentiation),
    );
    let json_path = out_dir.join("robustness.json");
    write_json(&json_path, &report)?;
    let csv_path = out_dir.join("trials.csv");
    write_atomic(&csv_path, robustness_csv(&report).as_bytes())?;
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

fn cmd_dynamics(
    periods: usize,
    rate: f64,
    target: Option<f64>,
    initial_loyalty: f64,
    config_args: ConfigArgs,
    solver: SolverArgs,
    out_dir: PathBuf,
) -> Result<(), CliError> {
    let (config, mech) = config_args.build()?;
    let target = match target {
        Some(t) => t,
        None => default_output_target(&config, &mech).map_err(CliError::validation)?,
    };
    let dynamics = DynamicsSettings::new(periods, rate, target).map_err(CliError::validation)?;
    let initial = LoyaltyProfile::uniform(config.team_size(), initial_loyalty)
        .map_err(CliError::validation)?;
    let trajectory =
        simulate_loyalty_evolution(&config, &mech, &initial, &dynamics, &solver.build())
            .map_err(CliError::runtime)?;
    let regime = classify_regime(&trajectory).map_err(CliError::runtime)?;

    let first = trajectory.steps.first().unwrap();
    let last = trajectory.steps.last().unwrap();
    println!("output target: {}", sig9(target));
    println!(
        "initial loyalty {} output {}",
        sig9(trajectory.mean_loyalty_at(0)),
        sig9(first.output)
    );
    println!(
        "final loyalty {} output {} after {} periods",
        sig9(trajectory.mean_loyalty_at(trajectory.len() - 1)),
        sig9(last.output),
        periods
    );
    println!("regime: {regime}");

    #[derive(serde::Serialize)]
    struct DynamicsSummary<'a> {
        regime: String,
        output_target: f64,
        periods: usize,
        learning_rate: f64,
        trajectory: &'a teamprod::dynamics::Trajectory,
    }
    let json_path = out_dir.join("dynamics.json");
    write_json(
        &json_path,
        &DynamicsSummary {
            regime: regime.to_string(),
            output_target: target,
            periods,
            learning_rate: rate,
            trajectory: &trajectory,
        },
    )?;
    let csv_path = out_dir.join("trajectory.csv");
    write_atomic(&csv_path, trajectory_csv(&trajectory).as_bytes())?;
    println!("wrote {} and {}", json_path.display(), csv_path.display());
    Ok(())
}

fn cmd_case_study(
    scenario: String,
    scale_mechanisms: Option<f64>,
    cap_team_size: Option<usize>,
    shift_loyalty: Option<f64>,
    solver: SolverArgs,
    out_dir: PathBuf,
) -> Result<(), CliError> {
    let s = resolve_scenario(&scenario)?;
    let settings = solver.build();
    let report = run_case_study(&s, &settings)?;

    println!("case study: {}", report.scenario);
    println!("phase         n   loyalty   effort   prediction   output      rank (exp)");
    for p in &report.phases {
        println!(
            "{:<12} {:>3}  {:>7}  {:>7}  {:>11}  {:>9}  {:>4} ({})",
            p.name,
            p.team_size,
            sig9(p.mean_loyalty),
            sig9(p.effort),
            sig9(p.prediction),
            sig9(p.output),
            p.predicted_rank,
            p.expected_rank,
        );
    }
    match report.rank_correlation {
        Some(rho) => println!("rank correlation: {}", sig9(rho)),
        None => println!("rank correlation: undefined"),
    }
    println!("monotone decline: {}", report.monotone_decline);
    println!(
        "rubric: {}/{} (convergence/magnitude/pattern/trend per phase)",
        report.rubric.total, report.rubric.max_total
    );

    write_json(&out_dir.join("case_study.json"), &report)?;
    write_atomic(
        &out_dir.join("series.csv"),
        case_study_csv(&report).as_bytes(),
    )?;

    let mut counterfactuals = Vec::new();
    if let Some(scale) = scale_mechanisms {
        counterfactuals.push((
            "cf1_scale_mechanisms",
            Counterfactual::ScaleMechanisms(scale),
        ));
    }
    if let Some(cap) = cap_team_size {
        counterfactuals.push(("cf2_cap_team_size", Counterfactual::CapTeamSize(cap)));
    }
    if let Some(delta) = shift_loyalty {
        counterfactuals.push(("cf3_shift_loyalty", Counterfactual::ShiftLoyalty(delta)));
    }
    for (name, modifier) in counterfactuals {
        let cf = run_counterfactual(&s, modifier, &settings)?;
        println!(
            "{name}: effort direction consistent = {}, output direction consistent = {}",
            cf.effort_direction_consistent, cf.output_direction_consistent
        );
        for p in &cf.phases {
            println!(
                "  {:<12} prediction {} -> {} ({:+.1}%)  output {} -> {} ({:+.1}%)",
                p.name,
                sig9(p.baseline_prediction),
                sig9(p.counterfactual_prediction),
                p.prediction_change_pct,
                sig9(p.baseline_output),
                sig9(p.counterfactual_output),
                p.output_change_pct,
            );
        }
        write_json(&out_dir.join(format!("{name}.json")), &cf)?;
    }
    println!("wrote reports to {}", out_dir.display());
    Ok(())
}

fn cmd_synergy(
    loyalty: f64,
    config_args: ConfigArgs,
    solver: SolverArgs,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let (config, mech) = config_args.build()?;
    let result =
        synergy_analysis(&config, &mech, loyalty, &solver.build()).map_err(CliError::validation)?;
    println!("mechanism decomposition at loyalty {}", sig9(loyalty));
    println!(
        "baseline (no mechanisms):   {}",
        sig9(result.baseline_effort)
    );
    println!(
        "loyalty benefit only:       {}",
        sig9(result.benefit_only_effort)
    );
    println!(
        "cost tolerance only:        {}",
        sig9(result.cost_only_effort)
    );
    println!(
        "combined:                   {}",
        sig9(result.combined_effort)
    );
    match result.synergy_ratio {
        Some(ratio) => println!("synergy ratio:              {}", sig9(ratio)),
        None => println!("synergy ratio:              undefined (no individual gains)"),
    }
    // analytic cross-check for the table footer
    let analytic =
        analytic_symmetric_equilibrium(&config, &mech, loyalty).map_err(CliError::validation)?;
    println!("analytic combined check:    {}", sig9(analytic));
    if let Some(path) = out {
        write_json(&path, &result)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
