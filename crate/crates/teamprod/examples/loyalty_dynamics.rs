//! Output-coupled loyalty evolution and its bifurcation: teams starting
//! above the output target spiral into a virtuous cycle, teams below it
//! into a vicious one.
//!
//! Run: `cargo run -p teamprod --example loyalty_dynamics`

use teamprod::dynamics::{classify_regime, simulate_loyalty_evolution, DynamicsSettings};
use teamprod::equilibrium::SolverSettings;
use teamprod::model::{LoyaltyProfile, MechanismStrengths, TeamConfig};

fn main() {
    let config = TeamConfig::new(20.0, 0.5, 2.5, 5, 10.0).unwrap();
    let mech = MechanismStrengths::default();
    let solver = SolverSettings::default();
    let dynamics = DynamicsSettings::defaults_for(&config, &mech).unwrap();
    println!(
        "output target {:.2} (midpoint rule), {} periods, learning rate {}\n",
        dynamics.output_target, dynamics.periods, dynamics.learning_rate
    );

    for start in [0.1, 0.3, 0.45, 0.6, 0.9] {
        let initial = LoyaltyProfile::uniform(5, start).unwrap();
        let trajectory =
            simulate_loyalty_evolution(&config, &mech, &initial, &dynamics, &solver).unwrap();
        let regime = classify_regime(&trajectory).unwrap();
        print!("start {start:.2}: ");
        for step in trajectory.steps.iter().step_by(10) {
            print!("{:.2} ", step.loyalties[0]);
        }
        println!(
            "-> {:.2}  output {:6.1} -> {:6.1}  [{regime}]",
            trajectory.steps.last().unwrap().loyalties[0],
            trajectory.steps[0].output,
            trajectory.steps.last().unwrap().output,
        );
    }

    println!("\nloyalty snapshots every 10 periods; the attractor depends on");
    println!("which side of the target the initial output falls.");
}
