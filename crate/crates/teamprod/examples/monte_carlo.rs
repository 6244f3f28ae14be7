//! Monte Carlo robustness: perturb every numeric parameter by +/-15% and
//! check that loyalty monotonicity survives. Fully reproducible from the
//! seed.
//!
//! Run: `cargo run --release -p teamprod --example monte_carlo`

use teamprod::harness::{monte_carlo_robustness, GridSpec};

fn main() {
    let spec = GridSpec::default();
    let report = monte_carlo_robustness(&spec, 0.15, 2000, 20250901).unwrap();

    println!(
        "{} trials at +/-{:.0}% noise (seed {})\n",
        report.trials,
        report.noise_fraction * 100.0,
        report.seed
    );
    println!(
        "loyalty monotonicity held in {:.1}% of trials (reference {:.0}%)",
        report.monotonicity_fraction * 100.0,
        report.references.monte_carlo_monotonicity_fraction * 100.0
    );
    println!(
        "differentiation > 2 in {:.1}% of trials (reference {:.1}%)",
        report.differentiation_gt2_fraction * 100.0,
        report.references.monte_carlo_differentiation_fraction * 100.0
    );
    println!(
        "mean differentiation {:.2} +/- {:.2} (reference {:.2} +/- {:.2})",
        report.mean_differentiation,
        report.sd_differentiation,
        report.references.monte_carlo_mean_differentiation,
        report.references.monte_carlo_sd_differentiation
    );

    println!("\nfirst five trials:");
    for row in report.rows.iter().take(5) {
        println!(
            "  #{:<4} omega {:5.2} beta {:.3} c {:.2} phi_B {:.3} phi_C {:.3}  monotone {}  ratio {:6.2}",
            row.trial,
            row.productivity,
            row.returns_exponent,
            row.effort_cost,
            row.loyalty_benefit,
            row.cost_tolerance,
            row.monotone_ok,
            row.differentiation_ratio
        );
    }
}
