//! MELE and penalized MELE on one sample under several priors.
//!
//!     cargo run --example penalized_estimate

use elprior::prior::ScaledPrior;
use elprior::{
    draw_sample, feasible_interval, mele, penalized_mele, Distribution, ElConfig, EstimatingFunction, FlatPrior,
    MomentOracle, PriorSpec, StreamKey,
};

fn main() -> elprior::Result<()> {
    let cfg = ElConfig::default();
    let spec = EstimatingFunction::SecondMomentRatio;

    let tiny = [1.0, 2.0, 3.0];
    println!("{{1,2,3}}: theta_hat = {:.6} (14/12 = {:.6})", mele(&tiny, &spec, 1e-12)?.theta, 14.0 / 12.0);

    let dist = Distribution::exponential(1.0)?;
    let sample = draw_sample(&dist, 25, StreamKey(2017));
    let (lo, hi) = feasible_interval(&sample, &spec)?;
    println!("Exp(1) sample, n = 25, feasible interval ({lo:.4}, {hi:.4})");
    println!("  theta_hat                   {:.6}", mele(&sample, &spec, 1e-12)?.theta);

    let analytic = PriorSpec::new(spec, MomentOracle::Analytic(dist));
    let from_sample = PriorSpec::from_sample(spec, &sample)?;
    println!("  theta_tilde, analytic prior {:.6}", penalized_mele(&sample, &spec, &analytic, &cfg)?.theta);
    println!("  theta_tilde, sample prior   {:.6}", penalized_mele(&sample, &spec, &from_sample, &cfg)?.theta);
    println!("  theta_tilde, flat prior     {:.6}", penalized_mele(&sample, &spec, &FlatPrior, &cfg)?.theta);

    // the prior is used unnormalized; constant factors do not move the argmax
    let scaled = ScaledPrior { inner: analytic, log_scale: 40.0 };
    println!("  theta_tilde, prior x e^40   {:.6}", penalized_mele(&sample, &spec, &scaled, &cfg)?.theta);
    Ok(())
}
