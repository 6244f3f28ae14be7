//! The four-mechanism decomposition: welfare internalization, warm glow,
//! cost tolerance, and quadratic guilt. Shows the exact reduction to the
//! consolidated form and how guilt pushes best responses toward the cap.
//!
//! Run: `cargo run -p teamprod --example extended_mechanisms`

use teamprod::equilibrium::{best_response, SolverSettings};
use teamprod::extended::{extended_best_response, solve_extended_tpe, ExtendedStrengths};
use teamprod::model::{LoyaltyProfile, MechanismStrengths, TeamConfig};

fn main() {
    let config = TeamConfig::new(20.0, 0.5, 2.5, 5, 10.0).unwrap();
    let mech = MechanismStrengths::default();

    // reduction: internalization = 0.8, warm glow and guilt off
    let reduced = ExtendedStrengths::from_consolidated(&mech);
    println!("reduction check (warm glow = guilt = 0):");
    for others in [0.0, 0.512, 2.0, 5.0] {
        let closed = best_response(&config, &mech, 0.6, others).unwrap();
        let numeric = extended_best_response(&config, &reduced, 0.6, others).unwrap();
        println!("  others {others:5.3}: closed form {closed:.6}, four-mechanism {numeric:.6}");
    }

    // split the benefit into internalization + warm glow and add guilt;
    // keep the other mechanisms weak so the guilt term is visible
    let ext = ExtendedStrengths::new(0.6, 0.2, 0.3, 0.15).unwrap();
    for warning in ext.range_warnings() {
        println!("warning: {warning}");
    }
    println!("\nguilt pulls the response toward the cap (weak internalization,");
    println!("loyalty 0.5, others_total = 1.0):");
    for guilt in [0.0, 0.05, 0.15, 0.25] {
        let strengths = ExtendedStrengths::new(0.2, 0.0, 0.1, guilt).unwrap();
        let response = extended_best_response(&config, &strengths, 0.5, 1.0).unwrap();
        println!("  guilt {guilt:4.2}: best response {response:.4}");
    }

    // full equilibrium under the four-mechanism utility
    let loyalties = LoyaltyProfile::new(vec![0.2, 0.4, 0.6, 0.8, 1.0]).unwrap();
    let solved = solve_extended_tpe(&config, &ext, &loyalties, &SolverSettings::default()).unwrap();
    println!(
        "\nfour-mechanism equilibrium (converged: {}, {} iterations):",
        solved.converged, solved.iterations
    );
    for (theta, (&effort, &utility)) in loyalties
        .values()
        .iter()
        .zip(solved.profile.efforts().iter().zip(&solved.utilities))
    {
        println!("  loyalty {theta:.1}: effort {effort:7.4}, utility {utility:8.4}");
    }
}
