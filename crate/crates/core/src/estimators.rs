//! The maximum EL estimate θ̂ and the prior-penalized estimate θ̃.

use crate::el::{adjusted_log_ratio_gvalues, ElConfig};
use crate::error::{ElError, Result};
use crate::estimating_function::EstimatingFunction;
use crate::numeric::{brent_root, compensated_sum, golden_section_max};
use crate::prior::LogPrior;

/// Points in the coarse scan preceding golden-section refinement.
pub const SCAN_POINTS: usize = 256;
/// Relative margin trimmed from each end of the feasible interval.
pub const BOUNDARY_MARGIN: f64 = 1e-6;
/// Final bracket width of the golden-section refinement.
pub const REFINE_WIDTH: f64 = 1e-10;
/// Default residual tolerance for θ̂.
pub const ROOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Mele,
    PenalizedMele,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateResult {
    pub theta: f64,
    pub kind: EstimateKind,
    /// Residual n⁻¹ΣG for the MELE, penalized log EL for the penalized MELE.
    pub objective_at_theta: f64,
    pub feasible_interval: (f64, f64),
    pub iterations: usize,
}

/// Open interval of θ on which min G(Xᵢ, θ) < 0 < max G(Xᵢ, θ).
///
/// G is decreasing in θ, so the interval runs between the smallest and largest
/// per-observation roots.
pub fn feasible_interval(sample: &[f64], spec: &EstimatingFunction) -> Result<(f64, f64)> {
    spec.check_support(sample)?;
    let (lo, hi) = sample
        .iter()
        .map(|&x| spec.point_root(x))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    if lo < hi {
        Ok((lo, hi))
    } else {
        Err(ElError::EmptyInterval)
    }
}

fn mean_g(sample: &[f64], spec: &EstimatingFunction, theta: f64) -> f64 {
    compensated_sum(sample.iter().map(|&x| spec.g(x, theta))) / sample.len() as f64
}

/// Root of n⁻¹ΣG(Xᵢ, θ) = 0, at which the EL weights are uniform.
///
/// `tol` bounds the residual relative to the average |G| at the root (or
/// absolutely when that average is below one).
pub fn mele(sample: &[f64], spec: &EstimatingFunction, tol: f64) -> Result<EstimateResult> {
    let (lo, hi) = feasible_interval(sample, spec)?;
    let f = |t: f64| mean_g(sample, spec, t);
    let sol = brent_root(f, lo, hi, 0.0, 500)?;
    let scale = sample.iter().map(|&x| spec.g(x, sol.x).abs()).sum::<f64>() / sample.len() as f64;
    let residual = f(sol.x);
    if residual.abs() > tol * scale.max(1.0) {
        return Err(ElError::NoConvergence { iterations: sol.iterations });
    }
    Ok(EstimateResult {
        theta: sol.x,
        kind: EstimateKind::Mele,
        objective_at_theta: residual,
        feasible_interval: (lo, hi),
        iterations: sol.iterations,
    })
}

/// lr_e(θ) + log π(θ).
pub fn penalized_objective<P: LogPrior + ?Sized>(
    sample: &[f64],
    spec: &EstimatingFunction,
    prior: &P,
    config: &ElConfig,
    theta: f64,
) -> Result<f64> {
    let g: Vec<f64> = sample.iter().map(|&x| spec.g(x, theta)).collect();
    Ok(adjusted_log_ratio_gvalues(&g, config) + prior.log_prior(theta)?)
}

/// The feasible interval with `BOUNDARY_MARGIN` trimmed from each side; lr
/// diverges to -∞ at the true endpoints.
pub fn search_interval(feasible: (f64, f64)) -> (f64, f64) {
    let margin = BOUNDARY_MARGIN * (feasible.1 - feasible.0);
    (feasible.0 + margin, feasible.1 - margin)
}

/// argmax of lr_e(θ) + log π(θ) over the feasible interval.
pub fn penalized_mele<P: LogPrior + ?Sized>(
    sample: &[f64],
    spec: &EstimatingFunction,
    prior: &P,
    config: &ElConfig,
) -> Result<EstimateResult> {
    let feasible = feasible_interval(sample, spec)?;
    let (lo, hi) = search_interval(feasible);
    let objective = |t: f64| penalized_objective(sample, spec, prior, config, t);

    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid = |i: usize| if i + 1 == SCAN_POINTS { hi } else { lo + step * i as f64 };
    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..SCAN_POINTS {
        let v = objective(grid(i))?;
        // leftmost of (near-)equal maxima
        if v > best_f + 1e-12 {
            best_i = i;
            best_f = v;
        }
    }

    let a = grid(best_i.saturating_sub(1));
    let b = grid((best_i + 1).min(SCAN_POINTS - 1));
    let refined = golden_section_max(objective, a, b, REFINE_WIDTH, 500)?;
    let (theta, value) = if refined.fx >= best_f { (refined.x, refined.fx) } else { (grid(best_i), best_f) };

    Ok(EstimateResult {
        theta,
        kind: EstimateKind::PenalizedMele,
        objective_at_theta: value,
        feasible_interval: feasible,
        iterations: SCAN_POINTS + refined.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Distribution;
    use crate::el::adjusted_log_el_ratio;
    use crate::estimating_function::MomentOracle;
    use crate::prior::{FlatPrior, PriorSpec, ScaledPrior};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const SRR: EstimatingFunction = EstimatingFunction::SecondMomentRatio;

    #[test]
    fn feasible_interval_examples() {
        assert_eq!(feasible_interval(&[1.0, 2.0, 3.0], &EstimatingFunction::Mean).unwrap(), (1.0, 3.0));
        assert_eq!(feasible_interval(&[1.0, 2.0, 3.0], &SRR).unwrap(), (0.5, 1.5));
        assert_eq!(feasible_interval(&[5.0; 3], &EstimatingFunction::Mean), Err(ElError::EmptyInterval));
        assert!(matches!(feasible_interval(&[1.0, -2.0], &SRR), Err(ElError::InvalidSample(_))));
        let exp = EstimatingFunction::ExpScale { mu: 1.0 };
        assert_eq!(feasible_interval(&[0.5, 2.0], &exp).unwrap(), (-1.0, 2.0));
    }

    #[test]
    fn mele_examples() {
        let r = mele(&[1.0, 2.0, 3.0], &SRR, ROOT_TOL).unwrap();
        assert_relative_eq!(r.theta, 14.0 / 12.0, max_relative = 1e-14);
        assert!(r.objective_at_theta.abs() < 1e-12);
        let m = mele(&[0.3, 1.7, 2.2, 9.0], &EstimatingFunction::Mean, ROOT_TOL).unwrap();
        assert_relative_eq!(m.theta, 13.2 / 4.0, max_relative = 1e-14);
        let c = mele(&[-1.0, 0.0, 1.0], &EstimatingFunction::CubicCentered, ROOT_TOL).unwrap();
        assert!(c.theta.abs() < 1e-14);
    }

    #[test]
    fn lr_vanishes_at_mele() {
        let x = [0.4, 1.1, 2.5, 0.9, 3.3];
        let r = mele(&x, &SRR, ROOT_TOL).unwrap();
        let lr = adjusted_log_el_ratio(&x, &SRR, r.theta, &ElConfig::default());
        assert!(lr.abs() < 1e-20, "{lr}");
    }

    #[test]
    fn flat_prior_gives_the_mele() {
        let x = [1.0, 2.0, 3.0];
        let cfg = ElConfig::default();
        let p = penalized_mele(&x, &SRR, &FlatPrior, &cfg).unwrap();
        assert!((p.theta - 14.0 / 12.0).abs() < 1e-9, "{}", p.theta);
        assert_eq!(p.kind, EstimateKind::PenalizedMele);
    }

    #[test]
    fn analytic_prior_on_three_points_matches_dense_grid() {
        // reference: argmax of lr(θ) - 0.5 log(2θ² - 6θ + 6) over 10⁵ grid points
        let x = [1.0, 2.0, 3.0];
        let cfg = ElConfig::default();
        let prior = PriorSpec::new(SRR, MomentOracle::Analytic(Distribution::exponential(1.0).unwrap()));
        let (lo, hi) = search_interval((0.5, 1.5));
        let pts = 100_000;
        let h = (hi - lo) / (pts - 1) as f64;
        let mut best = (lo, f64::NEG_INFINITY);
        for i in 0..pts {
            let t = lo + h * i as f64;
            let v = adjusted_log_el_ratio(&x, &SRR, t, &cfg) - 0.5 * (2.0 * t * t - 6.0 * t + 6.0).ln();
            if v > best.1 {
                best = (t, v);
            }
        }
        let est = penalized_mele(&x, &SRR, &prior, &cfg).unwrap();
        assert!((est.theta - best.0).abs() <= h, "{} vs {}", est.theta, best.0);
        // σ² decreases on (0.5, 1.5), so the prior pulls θ̃ right of θ̂
        assert!(est.theta > 14.0 / 12.0);
        assert!(est.theta > est.feasible_interval.0 && est.theta < est.feasible_interval.1);
    }

    #[test]
    fn prior_scale_does_not_move_the_argmax() {
        let x = [0.8, 1.3, 0.2, 2.9, 1.7, 0.6];
        let cfg = ElConfig::default();
        let prior = PriorSpec::from_sample(SRR, &x).unwrap();
        let a = penalized_mele(&x, &SRR, &prior, &cfg).unwrap();
        for log_scale in [-7.5, 3.0, 40.0] {
            let scaled = ScaledPrior { inner: prior.clone(), log_scale };
            let b = penalized_mele(&x, &SRR, &scaled, &cfg).unwrap();
            // the objective is flat to rounding within ~sqrt(eps) of the peak
            assert!((a.theta - b.theta).abs() < 1e-6, "{} vs {}", a.theta, b.theta);
        }
    }

    #[test]
    fn degenerate_sample_errors() {
        let cfg = ElConfig::default();
        assert_eq!(mele(&[5.0; 3], &EstimatingFunction::Mean, ROOT_TOL), Err(ElError::EmptyInterval));
        assert_eq!(
            penalized_mele(&[5.0; 3], &EstimatingFunction::Mean, &FlatPrior, &cfg),
            Err(ElError::EmptyInterval)
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn lr_is_unimodal_around_mele(sample in prop::collection::vec(0.1f64..5.0, 4..25), delta in 1e-3f64..0.2) {
            let cfg = ElConfig::default();
            let r = mele(&sample, &SRR, ROOT_TOL).unwrap();
            let (lo, hi) = r.feasible_interval;
            let width = hi - lo;
            prop_assume!(width > 1e-3);
            let d = delta * width;
            let at = |t: f64| adjusted_log_el_ratio(&sample, &SRR, t, &cfg);
            let center = at(r.theta);
            if r.theta - d > lo { prop_assert!(at(r.theta - d) < center); }
            if r.theta + d < hi { prop_assert!(at(r.theta + d) < center); }
        }

        #[test]
        fn estimates_are_permutation_invariant(sample in prop::collection::vec(0.1f64..5.0, 5..20), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let cfg = ElConfig::default();
            let mut shuffled = sample.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let m1 = mele(&sample, &SRR, ROOT_TOL).unwrap().theta;
            let m2 = mele(&shuffled, &SRR, ROOT_TOL).unwrap().theta;
            prop_assert!((m1 - m2).abs() <= 1e-12 * m1.abs().max(1.0));
            let p1 = penalized_mele(&sample, &SRR, &PriorSpec::from_sample(SRR, &sample).unwrap(), &cfg).unwrap().theta;
            let p2 = penalized_mele(&shuffled, &SRR, &PriorSpec::from_sample(SRR, &shuffled).unwrap(), &cfg).unwrap().theta;
            prop_assert!((p1 - p2).abs() <= 1e-8 * p1.abs().max(1.0));
        }
    }
}
