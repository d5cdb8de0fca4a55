//! First-order biases n·Bias(θ̂) and n·Bias(θ̃) for the simulation settings.
//!
//!     cargo run --example bias_theory

use elprior::{first_order_bias, theta0_of, Distribution, EstimatingFunction, MomentOracle};

fn main() -> elprior::Result<()> {
    let settings = [
        (EstimatingFunction::SecondMomentRatio, Distribution::normal(10.0, 2.0)?),
        (EstimatingFunction::SecondMomentRatio, Distribution::exponential(1.0)?),
        (EstimatingFunction::SecondMomentRatio, Distribution::chi_squared(1.0)?),
        (EstimatingFunction::SecondMomentRatio, Distribution::log_normal(0.0, 0.5)?),
        (EstimatingFunction::ExpScale { mu: 0.0 }, Distribution::normal(0.0, 1.0)?),
        (EstimatingFunction::ExpScale { mu: 1.5 }, Distribution::normal(1.5, 1.5f64.sqrt())?),
        (EstimatingFunction::CubicCentered, Distribution::log_normal(0.0, 0.5)?),
    ];
    println!("{:<22} {:<20} {:>9} {:>12} {:>12}", "G", "X", "theta0", "n bias mele", "n bias pmele");
    for (spec, dist) in settings {
        let theta0 = theta0_of(&spec, &dist)?;
        let r = first_order_bias(&spec, &MomentOracle::Analytic(dist), theta0)?;
        println!(
            "{:<22} {:<20} {theta0:>9.4} {:>12.4} {:>12.4}",
            spec.to_string(),
            dist.to_string(),
            r.n_bias_mele,
            r.n_bias_pmele
        );
    }
    Ok(())
}
