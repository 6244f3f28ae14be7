//! Acceptance suite: one test per acceptance criterion, each printing a
//! pass/fail line. Every tolerance is pinned here; reference magnitudes
//! from the original study are printed for comparison but never asserted.
//!
//! Run with `cargo test -p teamprod --test acceptance -- --nocapture`.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teamprod::dynamics::{classify_regime, simulate_loyalty_evolution, DynamicsSettings, Regime};
use teamprod::equilibrium::{
    analytic_symmetric_equilibrium, best_response, solve_tpe, SolverSettings,
};
use teamprod::harness::{monte_carlo_robustness, run_sweep, GridSpec, SweepOptions};
use teamprod::model::{
    base_payoff, marginal_utility, team_output, teammates_payoff, utility, ActionProfile,
    LoyaltyProfile, MechanismStrengths, TeamConfig,
};
use teamprod::optimize::golden_section_max;
use teamprod::scenario::{builtin_scenario, parse_scenario, run_case_study};
use teamprod::stats::{bootstrap_mean_ci, paired_t_test, pearson_r, student_t_cdf};
use teamprod::translation::team_cohesion;

struct Criterion {
    name: &'static str,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str) -> Self {
        Self {
            name,
            started: Instant::now(),
        }
    }

    fn finish(self, pass: bool, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "acceptance {:<28} {}  [{:.2}s] {}",
            self.name,
            verdict,
            self.started.elapsed().as_secs_f64(),
            detail
        );
        assert!(pass, "{} failed: {}", self.name, detail);
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

/// High-precision numeric argmax of a member's utility over own effort:
/// golden-section search followed by one parabolic refinement on a wider
/// stencil to beat the floating-point noise floor near flat optima.
fn precise_argmax<F: Fn(f64) -> f64>(f: F, cap: f64) -> f64 {
    let rough = golden_section_max(&f, 0.0, cap, 1e-7);
    let h = 1e-5;
    if rough < h || rough > cap - h {
        return golden_section_max(&f, 0.0, cap, 1e-9);
    }
    let (fl, fm, fr) = (f(rough - h), f(rough), f(rough + h));
    let denom = fl - 2.0 * fm + fr;
    if denom >= 0.0 {
        return rough;
    }
    (rough + 0.5 * h * (fl - fr) / denom).clamp(0.0, cap)
}

fn member_utility(
    config: &TeamConfig,
    mech: &MechanismStrengths,
    theta: f64,
    efforts: &[f64],
    member: usize,
    own: f64,
) -> f64 {
    let mut trial = efforts.to_vec();
    trial[member] = own;
    utility(config, mech, theta, &ActionProfile::new(trial), member).unwrap()
}

// Criterion 1: the solver's profile is unimprovable on a 21-per-axis grid
// and matches the golden-section per-member argmax within 1e-4, for 50
// random small teams. Runtime < 10 s.
#[test]
fn criterion_1_oracle_equivalence() {
    let c = Criterion::start("1 oracle equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mech = MechanismStrengths::default();
    let settings = SolverSettings::default()
        .with_tolerance(1e-10)
        .with_max_iterations(400_000);
    let mut worst_grid_gain: f64 = 0.0;
    let mut worst_argmax_gap: f64 = 0.0;
    for _ in 0..50 {
        let n = if rng.random_range(0..2) == 0 { 2 } else { 3 };
        let config = TeamConfig::new(
            uniform(&mut rng, 10.0, 30.0),
            uniform(&mut rng, 0.40, 0.60),
            uniform(&mut rng, 1.5, 3.5),
            n,
            10.0,
        )
        .unwrap();
        let thetas: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
        let loyalties = LoyaltyProfile::new(thetas.clone()).unwrap();
        let solved = solve_tpe(&config, &mech, &loyalties, &settings).unwrap();
        assert!(solved.converged, "solver failed to converge");
        let efforts = solved.profile.efforts();
        for member in 0..n {
            let here = member_utility(
                &config,
                &mech,
                thetas[member],
                efforts,
                member,
                efforts[member],
            );
            // unimprovable at every grid point
            for step in 0..=20 {
                let candidate = 10.0 * step as f64 / 20.0;
                let there =
                    member_utility(&config, &mech, thetas[member], efforts, member, candidate);
                worst_grid_gain = worst_grid_gain.max(there - here);
            }
            // golden-section argmax agreement
            let argmax = golden_section_max(
                |own| member_utility(&config, &mech, thetas[member], efforts, member, own),
                0.0,
                10.0,
                1e-9,
            );
            worst_argmax_gap = worst_argmax_gap.max((argmax - efforts[member]).abs());
        }
    }
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = worst_grid_gain <= 1e-7 && worst_argmax_gap <= 1e-4 && elapsed < 10.0;
    c.finish(
        pass,
        format!(
            "max grid gain {worst_grid_gain:.2e} (<=1e-7), max argmax gap {worst_argmax_gap:.2e} (<=1e-4)"
        ),
    );
}

// Criterion 2: closed-form best response matches the numeric argmax within
// 1e-6 on 200 random draws; the analytic symmetric equilibrium matches the
// solver within 1e-5 on 100 random symmetric instances. Runtime < 5 s.
#[test]
fn criterion_2_closed_form_fidelity() {
    let c = Criterion::start("2 closed-form fidelity");
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_br: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let cap = uniform(&mut rng, 5.0, 15.0);
        let config = TeamConfig::new(
            uniform(&mut rng, 5.0, 40.0),
            uniform(&mut rng, 0.2, 0.8),
            uniform(&mut rng, 0.5, 4.0),
            n,
            cap,
        )
        .unwrap();
        let mech =
            MechanismStrengths::new(uniform(&mut rng, 0.0, 1.2), uniform(&mut rng, 0.0, 0.9))
                .unwrap();
        let theta = uniform(&mut rng, 0.0, 1.0);
        let others = uniform(&mut rng, 0.0, (n - 1) as f64 * cap);
        let closed = best_response(&config, &mech, theta, others).unwrap();
        let efforts = vec![others / (n as f64 - 1.0); n];
        let numeric = precise_argmax(
            |own| {
                let mut trial = efforts.clone();
                trial[0] = own;
                // fix the rest to sum to `others`
                utility(&config, &mech, theta, &ActionProfile::new(trial), 0).unwrap()
            },
            cap,
        );
        worst_br = worst_br.max((closed - numeric).abs());
    }

    let mut worst_sym: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let config = TeamConfig::new(
            uniform(&mut rng, 5.0, 40.0),
            uniform(&mut rng, 0.2, 0.8),
            uniform(&mut rng, 0.5, 4.0),
            n,
            uniform(&mut rng, 5.0, 15.0),
        )
        .unwrap();
        let mech =
            MechanismStrengths::new(uniform(&mut rng, 0.0, 1.2), uniform(&mut rng, 0.0, 0.9))
                .unwrap();
        let theta = uniform(&mut rng, 0.0, 1.0);
        let analytic = analytic_symmetric_equilibrium(&config, &mech, theta).unwrap();
        let loyalties = LoyaltyProfile::uniform(n, theta).unwrap();
        let solved = solve_tpe(&config, &mech, &loyalties, &SolverSettings::default()).unwrap();
        assert!(solved.converged);
        for &a in solved.profile.efforts() {
            worst_sym = worst_sym.max((a - analytic).abs());
        }
    }
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = worst_br <= 1e-6 && worst_sym <= 1e-5 && elapsed < 5.0;
    c.finish(
        pass,
        format!("max BR gap {worst_br:.2e} (<=1e-6), max symmetric gap {worst_sym:.2e} (<=1e-5)"),
    );
}

// Criterion 3: behavioral targets on the default 3,125-configuration grid.
// Monotonicity, bounds and the team-size effect must reach 1.00; the
// free-riding baseline and differentiation fractions at least 0.95; synergy
// at least 0.90. Runtime < 60 s.
#[test]
fn criterion_3_behavioral_targets() {
    let c = Criterion::start("3 behavioral targets");
    let spec = GridSpec::default();
    let report = run_sweep(&spec, &SweepOptions::default()).unwrap();
    assert_eq!(report.grid_size, 3125);
    let t = &report.targets;
    println!(
        "  baseline {:.4} (ref {:.3}) | monotone {:.4} (ref 1.000) | diff>2 {:.4} (ref 1.000)",
        t.free_riding_baseline.fraction,
        t.free_riding_baseline.reference_fraction,
        t.loyalty_monotonicity.fraction,
        t.effort_differentiation.fraction,
    );
    println!(
        "  teamsize {:.4} (ref 1.000) | synergy {:.4} (ref {:.3}) | bounded {:.4} (ref 1.000)",
        t.team_size_effect.fraction,
        t.mechanism_synergy.fraction,
        t.mechanism_synergy.reference_fraction,
        t.bounded_outcomes.fraction,
    );
    println!(
        "  median differentiation: capped {:.2}, uncapped {:.2} (ref {:.2}); t {:?} d {:?}",
        report.statistics.median_differentiation,
        report.statistics.median_differentiation_unclamped,
        report.references.median_differentiation,
        report.statistics.paired_t_high_vs_low,
        report.statistics.cohens_d_high_vs_low,
    );
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = t.loyalty_monotonicity.fraction == 1.0
        && t.bounded_outcomes.fraction == 1.0
        && t.team_size_effect.fraction == 1.0
        && t.free_riding_baseline.fraction >= 0.95
        && t.effort_differentiation.fraction >= 0.95
        && t.mechanism_synergy.fraction >= 0.90
        && elapsed < 60.0;
    c.finish(
        pass,
        format!(
            "fractions: baseline {:.4}, monotone {:.4}, diff {:.4}, teamsize {:.4}, synergy {:.4}, bounded {:.4}, {:.1}s",
            t.free_riding_baseline.fraction,
            t.loyalty_monotonicity.fraction,
            t.effort_differentiation.fraction,
            t.team_size_effect.fraction,
            t.mechanism_synergy.fraction,
            t.bounded_outcomes.fraction,
            elapsed
        ),
    );
}

// Criterion 4: Monte Carlo robustness at 15% noise over 2,000 trials keeps
// loyalty monotonicity at 1.00, and reports are bit-identical for equal
// seeds. Runtime < 60 s.
#[test]
fn criterion_4_monte_carlo_robustness() {
    let c = Criterion::start("4 monte carlo robustness");
    let spec = GridSpec::default();
    let first = monte_carlo_robustness(&spec, 0.15, 2000, 424242).unwrap();
    let second = monte_carlo_robustness(&spec, 0.15, 2000, 424242).unwrap();
    let bytes_a = serde_json::to_vec(&first).unwrap();
    let bytes_b = serde_json::to_vec(&second).unwrap();
    println!(
        "  monotonicity {:.4} (ref 1.000) | diff>2 {:.4} (ref {:.3}) | mean {:.2}+/-{:.2} (ref {:.2}+/-{:.2})",
        first.monotonicity_fraction,
        first.differentiation_gt2_fraction,
        first.references.monte_carlo_differentiation_fraction,
        first.mean_differentiation,
        first.sd_differentiation,
        first.references.monte_carlo_mean_differentiation,
        first.references.monte_carlo_sd_differentiation,
    );
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = first.monotonicity_fraction == 1.0 && bytes_a == bytes_b && elapsed < 60.0;
    c.finish(
        pass,
        format!(
            "monotonicity {:.4}, identical bytes {}, {:.1}s",
            first.monotonicity_fraction,
            bytes_a == bytes_b,
            elapsed
        ),
    );
}

// Criterion 5: Apache case study: predictions strictly decrease across the
// four phases, Spearman rank correlation is exactly 1.0, and the 60-point
// rubric runs and emits a score. Runtime < 5 s.
#[test]
fn criterion_5_apache_case_study() {
    let c = Criterion::start("5 apache case study");
    let scenario = parse_scenario(builtin_scenario("apache").unwrap()).unwrap();
    let report = run_case_study(&scenario, &SolverSettings::default()).unwrap();
    assert_eq!(report.phases.len(), 4);
    let decreasing = report
        .phases
        .windows(2)
        .all(|w| w[1].prediction < w[0].prediction);
    for p in &report.phases {
        println!(
            "  {:<11} n={:<2} loyalty {:.2}: prediction {:>8.2} (reference {:>5.1}), capped effort {:>5.2}",
            p.name,
            p.team_size,
            p.mean_loyalty,
            p.prediction,
            p.reference_prediction.unwrap_or(f64::NAN),
            p.effort,
        );
    }
    println!(
        "  rubric {}/{} | spearman {:?} | pearson {:?}",
        report.rubric.total, report.rubric.max_total, report.rank_correlation, report.pearson_r
    );
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = decreasing
        && report.rank_correlation == Some(1.0)
        && report.monotone_decline
        && report.rubric.max_total == 60
        && report.rubric.total == 60
        && elapsed < 5.0;
    c.finish(
        pass,
        format!(
            "decline {decreasing}, spearman {:?}, rubric {}/60",
            report.rank_correlation, report.rubric.total
        ),
    );
}

// Criterion 6: loyalty dynamics bifurcate under the default target rule:
// a 0.6 start reaches the upper attractor, a 0.1 start the lower one,
// within 50 periods; zero learning rate freezes the trajectory. Runtime < 5 s.
#[test]
fn criterion_6_dynamics_bifurcation() {
    let c = Criterion::start("6 dynamics bifurcation");
    let config = TeamConfig::new(20.0, 0.5, 2.5, 5, 10.0).unwrap();
    let mech = MechanismStrengths::default();
    let solver = SolverSettings::default();
    let dynamics = DynamicsSettings::defaults_for(&config, &mech).unwrap();

    let up = simulate_loyalty_evolution(
        &config,
        &mech,
        &LoyaltyProfile::uniform(5, 0.6).unwrap(),
        &dynamics,
        &solver,
    )
    .unwrap();
    let down = simulate_loyalty_evolution(
        &config,
        &mech,
        &LoyaltyProfile::uniform(5, 0.1).unwrap(),
        &dynamics,
        &solver,
    )
    .unwrap();
    let frozen = simulate_loyalty_evolution(
        &config,
        &mech,
        &LoyaltyProfile::uniform(5, 0.3).unwrap(),
        &DynamicsSettings::new(50, 0.0, dynamics.output_target).unwrap(),
        &solver,
    )
    .unwrap();

    let up_final = up.final_quartile_mean_loyalty();
    let down_final = down.final_quartile_mean_loyalty();
    let frozen_constant = frozen
        .steps
        .iter()
        .all(|s| s.loyalties == frozen.steps[0].loyalties && s.efforts == frozen.steps[0].efforts);
    println!(
        "  target {:.2}: start 0.6 -> {:.3} ({:?}), start 0.1 -> {:.3} ({:?})",
        dynamics.output_target,
        up_final,
        classify_regime(&up).unwrap(),
        down_final,
        classify_regime(&down).unwrap(),
    );
    let elapsed = c.started.elapsed().as_secs_f64();
    let pass = classify_regime(&up).unwrap() == Regime::Virtuous
        && classify_regime(&down).unwrap() == Regime::Vicious
        && up_final > 0.95
        && down_final < 0.05
        && frozen_constant
        && elapsed < 5.0;
    c.finish(
        pass,
        format!("upper {up_final:.3}, lower {down_final:.3}, frozen constant {frozen_constant}"),
    );
}

// Criterion 7: statistics correctness at stated tolerances.
#[test]
fn criterion_7_statistics() {
    let c = Criterion::start("7 statistics");
    // t CDF against two-sided critical values
    let table: [(f64, f64, f64); 12] = [
        (12.7062, 1.0, 0.975),
        (4.3027, 2.0, 0.975),
        (2.7764, 4.0, 0.975),
        (2.5706, 5.0, 0.975),
        (2.2281, 10.0, 0.975),
        (2.0860, 20.0, 0.975),
        (2.0423, 30.0, 0.975),
        (1.9799, 120.0, 0.975),
        (63.6567, 1.0, 0.995),
        (4.0321, 5.0, 0.995),
        (3.1693, 10.0, 0.995),
        (2.7500, 30.0, 0.995),
    ];
    let mut worst_cdf: f64 = 0.0;
    for (t, df, expected) in table {
        worst_cdf = worst_cdf.max((student_t_cdf(t, df) - expected).abs());
    }

    let x = [2.0, 4.0, 6.0, 8.0, 10.0];
    let y = [1.0, 2.0, 3.0, 4.0, 5.0];
    let (t, p) = paired_t_test(&x, &y).unwrap();
    let t_ok = (t - 4.242640687119285).abs() < 1e-9 && (p - 0.0132356).abs() < 1e-5;

    let samples: Vec<f64> = (1..=100).map(|i| i as f64).collect();
    let boot = bootstrap_mean_ci(&samples, 10_000, 0.95, 7).unwrap();
    let boot_ok = boot.ci_low < 50.5 && 50.5 < boot.ci_high;

    let xs = [1.0, 2.0, 3.0, 4.0];
    let up: Vec<f64> = xs.iter().map(|v| 2.0 * v + 3.0).collect();
    let down: Vec<f64> = xs.iter().map(|v| -v).collect();
    let (r_up, _) = pearson_r(&xs, &up).unwrap();
    let (r_down, _) = pearson_r(&xs, &down).unwrap();
    let pearson_ok = (r_up - 1.0).abs() < 1e-9 && (r_down + 1.0).abs() < 1e-9;

    let pass = worst_cdf < 1e-4 && t_ok && boot_ok && pearson_ok;
    c.finish(
        pass,
        format!(
            "t-cdf max err {worst_cdf:.2e} (<1e-4), paired t {t:.4}, CI [{:.2}, {:.2}], pearson ok {pearson_ok}",
            boot.ci_low, boot.ci_high
        ),
    );
}

// Criterion 8: numerical identities over 1,000 seeded random draws:
// compact vs expanded utility (1e-12 relative), material conservation
// (1e-12 relative), cohesion scale invariance (1e-12), and marginal vs
// central finite difference (1e-4 absolute).
#[test]
fn criterion_8_numerical_identities() {
    let c = Criterion::start("8 numerical identities");
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_identity: f64 = 0.0;
    let mut worst_conservation: f64 = 0.0;
    let mut worst_cohesion: f64 = 0.0;
    let mut worst_marginal: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(2..=8);
        let cap = uniform(&mut rng, 5.0, 15.0);
        let config = TeamConfig::new(
            uniform(&mut rng, 5.0, 40.0),
            uniform(&mut rng, 0.2, 0.8),
            uniform(&mut rng, 0.5, 4.0),
            n,
            cap,
        )
        .unwrap();
        let mech =
            MechanismStrengths::new(uniform(&mut rng, 0.0, 1.2), uniform(&mut rng, 0.0, 0.9))
                .unwrap();
        let theta = uniform(&mut rng, 0.0, 1.0);
        let member = rng.random_range(0..n);
        // interior profile, bounded away from zero total effort
        let efforts: Vec<f64> = (0..n)
            .map(|_| uniform(&mut rng, 0.05, cap - 0.05))
            .collect();
        let actions = ActionProfile::new(efforts.clone());

        // compact vs expanded form
        let compact = utility(&config, &mech, theta, &actions, member).unwrap();
        let expanded =
            teamprod::model::utility_expanded(&config, &mech, theta, &actions, member).unwrap();
        worst_identity = worst_identity.max((compact - expanded).abs() / compact.abs().max(1.0));

        // material conservation: sum of base payoffs = output - total cost
        let total_base: f64 = (0..n)
            .map(|i| base_payoff(&config, &actions, i).unwrap())
            .sum();
        let q = team_output(&config, &actions).unwrap();
        let conserved = q - config.effort_cost() * actions.total();
        worst_conservation =
            worst_conservation.max((total_base - conserved).abs() / conserved.abs().max(1.0));

        // teammates identity feeds the same pot
        let mates = teammates_payoff(&config, &actions, member).unwrap();
        let identity = total_base - base_payoff(&config, &actions, member).unwrap();
        worst_conservation =
            worst_conservation.max((mates - identity).abs() / identity.abs().max(1.0));

        // cohesion scale invariance
        let weights: std::collections::BTreeMap<String, f64> = (0..n)
            .map(|i| (format!("m{i}"), uniform(&mut rng, 0.01, 5.0)))
            .collect();
        let loyalties: std::collections::BTreeMap<String, f64> = (0..n)
            .map(|i| (format!("m{i}"), uniform(&mut rng, 0.0, 1.0)))
            .collect();
        let scale = uniform(&mut rng, 0.1, 250.0);
        let scaled: std::collections::BTreeMap<String, f64> = weights
            .iter()
            .map(|(k, v)| (k.clone(), v * scale))
            .collect();
        let c1 = team_cohesion(&weights, &loyalties).unwrap();
        let c2 = team_cohesion(&scaled, &loyalties).unwrap();
        worst_cohesion = worst_cohesion.max((c1 - c2).abs());

        // marginal against central finite difference
        let h = 1e-5;
        if efforts[member] > h && efforts[member] < cap - h {
            let m = marginal_utility(&config, &mech, theta, &actions, member).unwrap();
            let mut hi = efforts.clone();
            let mut lo = efforts.clone();
            hi[member] += h;
            lo[member] -= h;
            let fd = (utility(&config, &mech, theta, &ActionProfile::new(hi), member).unwrap()
                - utility(&config, &mech, theta, &ActionProfile::new(lo), member).unwrap())
                / (2.0 * h);
            worst_marginal = worst_marginal.max((m - fd).abs());
        }
    }
    let pass = worst_identity < 1e-12
        && worst_conservation < 1e-12
        && worst_cohesion < 1e-12
        && worst_marginal < 1e-4;
    c.finish(
        pass,
        format!(
            "identity {worst_identity:.2e}, conservation {worst_conservation:.2e}, cohesion {worst_cohesion:.2e}, marginal {worst_marginal:.2e}"
        ),
    );
}
