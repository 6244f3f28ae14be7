//! The Apache HTTP Server case study: four historical phases, rank
//! validation against documented contribution patterns, the 60-point
//! scoring rubric, and three counterfactuals.
//!
//! Run: `cargo run -p teamprod --example apache_case_study`

use teamprod::equilibrium::SolverSettings;
use teamprod::scenario::{
    builtin_scenario, parse_scenario, run_case_study, run_counterfactual, Counterfactual,
};

fn main() {
    let scenario = parse_scenario(builtin_scenario("apache").unwrap()).unwrap();
    let settings = SolverSettings::default();

    // dependency structure from the criticality records
    let coeffs = scenario.dependency_coefficients().unwrap().unwrap();
    println!("dependency coefficients from criticality records:");
    for (member, weight) in &coeffs {
        println!("  {member:<12} {weight:.4}");
    }

    let report = run_case_study(&scenario, &settings).unwrap();
    println!("\nphase        n    loyalty  prediction  (reference)  capped effort  output");
    for p in &report.phases {
        println!(
            "{:<11} {:>3}   {:>5.2}   {:>9.2}   ({:>5.1})      {:>6.2}      {:>7.1}",
            p.name,
            p.team_size,
            p.mean_loyalty,
            p.prediction,
            p.reference_prediction.unwrap_or(f64::NAN),
            p.effort,
            p.output,
        );
    }
    println!(
        "\nmonotone decline: {} | rank correlation: {:?} | rubric {}/{}",
        report.monotone_decline,
        report.rank_correlation,
        report.rubric.total,
        report.rubric.max_total
    );
    for score in &report.rubric.per_phase {
        println!(
            "  {:<11} convergence {}/3, ranking {}/4, pattern {}/4, trend {}/4",
            score.phase, score.convergence, score.magnitude_ranking, score.pattern, score.trend
        );
    }

    println!("\ncounterfactuals:");
    let cases = [
        (
            "CF1 weaker norms (mechanisms x0.5)",
            Counterfactual::ScaleMechanisms(0.5),
        ),
        (
            "CF2 core team capped at 15",
            Counterfactual::CapTeamSize(15),
        ),
        (
            "CF3 loyalty cultivation (+0.15)",
            Counterfactual::ShiftLoyalty(0.15),
        ),
    ];
    for (label, modifier) in cases {
        let cf = run_counterfactual(&scenario, modifier, &settings).unwrap();
        println!("\n{label}:");
        for p in &cf.phases {
            println!(
                "  {:<11} prediction {:>8.2} -> {:>8.2} ({:+6.1}%)   output {:>7.1} -> {:>7.1} ({:+6.1}%)",
                p.name,
                p.baseline_prediction,
                p.counterfactual_prediction,
                p.prediction_change_pct,
                p.baseline_output,
                p.counterfactual_output,
                p.output_change_pct,
            );
        }
        println!(
            "  effort direction as expected: {} | output direction as expected: {}",
            cf.effort_direction_consistent, cf.output_direction_consistent
        );
    }
}
