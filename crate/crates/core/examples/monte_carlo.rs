//! A small Monte Carlo bias table. Pass the number of replications as the
//! first argument (default 2000).
//!
//!     cargo run --release --example monte_carlo -- 10000

use elprior::{run_table, Distribution, EstimatingFunction, ScenarioSpec};

fn main() -> elprior::Result<()> {
    let reps = std::env::args().nth(1).map_or(2000, |s| s.parse().expect("reps must be an integer"));
    let scenarios = [
        ScenarioSpec::new("Exp(1)", EstimatingFunction::SecondMomentRatio, Distribution::exponential(1.0)?)?,
        ScenarioSpec::new("N(0,1)", EstimatingFunction::ExpScale { mu: 0.0 }, Distribution::normal(0.0, 1.0)?)?,
    ];
    for mut sc in scenarios {
        sc.reps = reps;
        sc.n_list = vec![15, 25, 50];
        println!("{} with G = {}, theta0 = {}, {reps} reps", sc.label, sc.spec, sc.theta0);
        println!("{:>5} {:>10} {:>10} {:>12} {:>12} {:>9} {:>9}", "n", "mele", "pmele", "n bias mele", "n bias pmele", "mse mele", "mse pmele");
        for r in run_table(&sc)? {
            println!(
                "{:>5} {:>10.4} {:>10.4} {:>12.3} {:>12.3} {:>9.4} {:>9.4}",
                r.n, r.mean_mele, r.mean_pmele, r.n_bias_mele, r.n_bias_pmele, r.mse_mele, r.mse_pmele
            );
        }
    }
    Ok(())
}
