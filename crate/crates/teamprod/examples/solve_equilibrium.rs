//! Free-riding and how loyalty lifts a team out of it: solve the
//! equilibrium at several loyalty levels and compare with the analytic
//! baseline and the social optimum.
//!
//! Run: `cargo run -p teamprod --example solve_equilibrium`

use teamprod::equilibrium::{
    analytic_symmetric_equilibrium, social_optimum, solve_tpe, welfare_loss, SolverSettings,
};
use teamprod::model::{output_of_total, LoyaltyProfile, MechanismStrengths, TeamConfig};

fn main() {
    let config = TeamConfig::new(20.0, 0.5, 2.5, 5, 10.0).unwrap();
    let mech = MechanismStrengths::default();
    let settings = SolverSettings::default();

    println!("five-member team, productivity 20, returns 0.5, effort cost 2.5\n");
    println!("loyalty   effort   analytic   output    welfare loss (fraction)");
    for theta in [0.0, 0.3, 0.5, 0.7, 0.9] {
        let loyalties = LoyaltyProfile::uniform(5, theta).unwrap();
        let solved = solve_tpe(&config, &mech, &loyalties, &settings).unwrap();
        let analytic = analytic_symmetric_equilibrium(&config, &mech, theta).unwrap();
        let loss = welfare_loss(&config, &mech, &loyalties, &settings).unwrap();
        println!(
            "  {theta:.1}    {:7.4}   {analytic:8.4}  {:7.2}    {:8.2} ({})",
            solved.profile.efforts()[0],
            output_of_total(&config, solved.total_effort()),
            loss.loss,
            loss.loss_fraction
                .map(|f| format!("{:.1}%", f * 100.0))
                .unwrap_or_else(|| "n/a".into()),
        );
    }

    let optimum = social_optimum(&config);
    println!("\nsocially optimal effort per member: {optimum:.4}");
    println!(
        "free-riding equilibrium captures {:.1}% of it",
        analytic_symmetric_equilibrium(&config, &mech, 0.0).unwrap() / optimum * 100.0
    );

    // heterogeneous team: loyal members carry the load
    let thetas = vec![0.1, 0.3, 0.5, 0.7, 0.9];
    let solved = solve_tpe(
        &config,
        &mech,
        &LoyaltyProfile::new(thetas.clone()).unwrap(),
        &settings,
    )
    .unwrap();
    println!("\nheterogeneous loyalties {thetas:?}:");
    for (theta, (effort, util)) in thetas
        .iter()
        .zip(solved.profile.efforts().iter().zip(&solved.utilities))
    {
        println!("  loyalty {theta:.1}: effort {effort:7.4}, utility {util:8.4}");
    }
    println!(
        "total effort {:.4}, output {:.2}",
        solved.total_effort(),
        output_of_total(&config, solved.total_effort())
    );
}
