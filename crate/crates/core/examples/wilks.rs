//! -2 lr(θ₀) is asymptotically χ²₁, so its average should approach 1.
//!
//!     cargo run --release --example wilks

use elprior::mc::DEFAULT_SEED;
use elprior::{wilks_check, Distribution, ElConfig, EstimatingFunction};

fn main() -> elprior::Result<()> {
    let dist = Distribution::exponential(1.0)?;
    for n in [10, 25, 50, 100, 200] {
        let m = wilks_check(&dist, &EstimatingFunction::SecondMomentRatio, 1.0, n, 5000, DEFAULT_SEED, &ElConfig::default())?;
        println!("n = {n:>3}: mean -2 lr(theta0) = {m:.4}");
    }
    Ok(())
}
