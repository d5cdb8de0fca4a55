//! Subsampling study on a generated group: estimate θ from n draws, compare
//! with the root of the held-out values.
//!
//!     cargo run --release --example bootstrap_study -- 2000

use elprior::mc::DEFAULT_SEED;
use elprior::{run_study, Distribution, ElConfig, GroupData};

fn main() -> elprior::Result<()> {
    let reps = std::env::args().nth(1).map_or(1000, |s| s.parse().expect("reps must be an integer"));
    let group = GroupData::synthetic("lognormal", &Distribution::log_normal(0.0, 0.5)?, 2000, DEFAULT_SEED)?;
    let study = run_study(&group, &[25, 50, 75, 100], reps, DEFAULT_SEED, &ElConfig::default())?;
    println!("{} values, {reps} subsamples per size", group.len());
    println!("{:>5} {:>10} {:>12} {:>12} {:>9}", "n", "theta_ref", "bias mele", "bias pmele", "failures");
    for r in &study.rows {
        println!(
            "{:>5} {:>10.5} {:>12.5} {:>12.5} {:>9}",
            r.n, r.theta_ref, r.mean_bias_mele, r.mean_bias_pmele, r.failures
        );
    }
    Ok(())
}
