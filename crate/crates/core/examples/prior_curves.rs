//! The EL prior π(θ) ∝ σ²(θ)^(-1/2) for a few families.
//!
//!     cargo run --example prior_curves

use elprior::{Distribution, EstimatingFunction, LogPrior, MomentOracle, PriorSpec};

fn main() -> elprior::Result<()> {
    let curves = [
        ("x^2 - 2θx, Exp(1)", PriorSpec::new(EstimatingFunction::SecondMomentRatio, MomentOracle::Analytic(Distribution::exponential(1.0)?)), 0.2, 2.0),
        ("x - θ, N(0,1)", PriorSpec::new(EstimatingFunction::Mean, MomentOracle::Analytic(Distribution::normal(0.0, 1.0)?)), -2.0, 2.0),
        ("exp(x) - exp(θ/2), N(0,1)", PriorSpec::new(EstimatingFunction::ExpScale { mu: 0.0 }, MomentOracle::Analytic(Distribution::normal(0.0, 1.0)?)), 0.0, 2.0),
        ("(x - θ)^3, lognormal(0,0.5)", PriorSpec::new(EstimatingFunction::CubicCentered, MomentOracle::Analytic(Distribution::log_normal(0.0, 0.5)?)), 0.5, 1.5),
    ];
    for (name, prior, lo, hi) in curves {
        println!("{name}");
        for i in 0..=8 {
            let t = lo + (hi - lo) * i as f64 / 8.0;
            match prior.log_prior(t) {
                Ok(lp) => println!("  theta {t:>6.3}  sigma2 {:>10.4}  log pi {lp:>8.4}", prior.sigma2(t)?),
                Err(e) => println!("  theta {t:>6.3}  {e}"),
            }
        }
    }
    Ok(())
}
