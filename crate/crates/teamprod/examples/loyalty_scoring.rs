//! Translating a real team into model parameters: weighted-factor loyalty
//! scores, dependency coefficients, cohesion, bargaining power, and loyalty
//! gaps for the six-member development team scenario.
//!
//! Run: `cargo run -p teamprod --example loyalty_scoring`

use teamprod::scenario::{builtin_scenario, parse_scenario};
use teamprod::translation::{
    effective_bargaining_power, is_intervention_candidate, loyalty_gap, tenure_score,
};

fn main() {
    let scenario = parse_scenario(builtin_scenario("team_t").unwrap()).unwrap();
    println!(
        "scenario: {} (n = {})\n",
        scenario.name,
        scenario.config.team_size()
    );

    println!("member                factor score   override   effective");
    for member in &scenario.members {
        println!(
            "{:<22} {:>10.4}   {:>8}   {:>8.2}",
            member.id,
            member.factor_score.unwrap_or(f64::NAN),
            member
                .loyalty_override
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "-".into()),
            member.loyalty,
        );
    }

    let cohesion = scenario.cohesion().unwrap().unwrap();
    println!("\ndependency-weighted team cohesion: {cohesion:.4}");
    let base_power = 0.8;
    println!(
        "effective bargaining power at base {base_power}: {:.4}",
        effective_bargaining_power(base_power, cohesion).unwrap()
    );

    // who needs a loyalty intervention to reach a 0.8 target?
    println!("\nloyalty gaps against target 0.8 (candidates above 0.3):");
    for member in &scenario.members {
        let gap = loyalty_gap(0.8, member.loyalty).unwrap();
        println!(
            "  {:<22} gap {gap:+.2}{}",
            member.id,
            if is_intervention_candidate(gap) {
                "  <- intervention candidate"
            } else {
                ""
            }
        );
    }

    // the tenure helper normalises months of membership
    println!(
        "\ntenure normalisation: 6 months -> {:.2}, 24 months -> {:.2}",
        tenure_score(6.0),
        tenure_score(24.0)
    );
}
