//! Loyalty mechanisms for a computational agent ensemble: calibrate
//! alignment coefficients from the agent factor table, then compare
//! equilibrium resource allocation with and without loyalty shaping.
//!
//! Run: `cargo run -p teamprod --example agent_ensemble`

use teamprod::equilibrium::{solve_tpe, symmetric_equilibrium_unclamped, SolverSettings};
use teamprod::model::LoyaltyProfile;
use teamprod::scenario::{builtin_scenario, parse_scenario};

fn main() {
    let scenario = parse_scenario(builtin_scenario("system_s").unwrap()).unwrap();
    let config = &scenario.config;
    let mech = scenario.consolidated().copied().unwrap();
    let settings = SolverSettings::default();

    println!(
        "agent ensemble: n = {}, productivity {}, returns {}\n",
        config.team_size(),
        config.productivity(),
        config.returns_exponent()
    );

    println!("alignment calibration (weighted factor sums):");
    for member in &scenario.members {
        println!("  {:<18} theta = {:.4}", member.id, member.loyalty);
        let derived_team_weight = mech.loyalty_benefit() * member.loyalty;
        let derived_cost_discount = 1.0 - mech.cost_tolerance() * member.loyalty;
        println!(
            "      team-reward weight {derived_team_weight:.3}, cost discount {derived_cost_discount:.3}"
        );
    }

    // Under the stated production parameters the resource cap binds at
    // every alignment level, so the visible signal is the unconstrained
    // incentive index and the realised utilities, not capped allocations.
    let selfish = LoyaltyProfile::uniform(config.team_size(), 0.0).unwrap();
    let baseline = solve_tpe(config, &mech, &selfish, &settings).unwrap();
    let aligned = solve_tpe(config, &mech, &scenario.loyalties, &settings).unwrap();

    println!("\nincentive index (unconstrained symmetric response per agent):");
    println!(
        "  no alignment:  {:8.2}",
        symmetric_equilibrium_unclamped(config, &mech, 0.0).unwrap()
    );
    for member in &scenario.members {
        println!(
            "  {:<14} {:8.2}",
            member.id,
            symmetric_equilibrium_unclamped(config, &mech, member.loyalty).unwrap()
        );
    }

    println!("\nallocations hit the resource cap either way; utilities do not:");
    println!("agent               effort   utility (aligned)   utility (selfish)");
    for (i, member) in scenario.members.iter().enumerate() {
        println!(
            "  {:<18} {:5.2}   {:>13.2}   {:>15.2}",
            member.id,
            aligned.profile.efforts()[i],
            aligned.utilities[i],
            baseline.utilities[i],
        );
    }
}
