//! Empirical likelihood at a fixed θ: multiplier bracket, weights, log ratio.
//!
//!     cargo run --example el_at_theta

use elprior::el::{el_evaluate, gvalues, lambda_bounds, solve_lambda};
use elprior::{ElConfig, EstimatingFunction};

fn main() -> elprior::Result<()> {
    let cfg = ElConfig::default();

    // two points with g = {-1, 3}: λ = 2/3, weights 3/4 and 1/4
    let g = [-1.0, 3.0];
    let (lo, hi) = lambda_bounds(&g)?;
    println!("g = {g:?}: lambda in [{lo}, {hi}], solved {:.12}", solve_lambda(&g, &cfg)?);

    let sample = [0.8, 1.1, 1.9, 2.4, 3.3, 0.4, 1.2];
    let spec = EstimatingFunction::SecondMomentRatio;
    println!("\n{:>6} {:>10} {:>10} {:>9}", "theta", "lambda", "lr", "feasible");
    for theta in [0.3, 0.8, 1.0, 1.2, 1.5, 2.0] {
        let ev = el_evaluate(&sample, &spec, theta, &cfg)?;
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.5}"));
        println!(
            "{theta:>6.2} {:>10} {:>10} {:>9}   g = {:?}",
            show(ev.lambda),
            show(ev.log_ratio),
            ev.feasible,
            gvalues(&sample, &spec, theta).iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>()
        );
    }
    // outside the hull the adjusted ratio falls back to -c0·n
    let ev = el_evaluate(&sample, &spec, 5.0, &cfg)?;
    println!("\ntheta = 5: lr_e = {}", ev.adjusted_log_ratio(&cfg));
    Ok(())
}
