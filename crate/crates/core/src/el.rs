//! Empirical likelihood at a fixed θ.
//!
//! For values gᵢ = G(Xᵢ, θ) the maximizing weights are pᵢ = 1/(n + λgᵢ), where
//! the Lagrange multiplier λ solves Σ gᵢ/(n + λgᵢ) = 0. That residual is
//! strictly decreasing in λ, λ carries the sign of Σgᵢ, and it is bounded by
//!
//! ```text
//! Σg >= 0:  0 <= λ <= n Σg / Σ g² I(g < 0)
//! Σg <  0:  n Σg / Σ g² I(g > 0) <= λ <= 0
//! ```
//!
//! so a safeguarded Newton iteration on that bracket always converges.

use serde::{Deserialize, Serialize};

use crate::error::{ElError, Result};
use crate::estimating_function::EstimatingFunction;

/// Every n + λgᵢ is kept at least this fraction of n.
const POSITIVITY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElConfig {
    /// Threshold M on the one-sided sums w₁, w₂.
    pub m_threshold: f64,
    /// The penalty branch returns log Dₙ = -c0·n.
    pub c0: f64,
    /// Tolerance on |n⁻¹ Σ gᵢ/(n + λgᵢ)|.
    pub lambda_tol: f64,
    pub max_iter: usize,
}

impl Default for ElConfig {
    fn default() -> Self {
        Self { m_threshold: 1e-8, c0: 1.0, lambda_tol: 1e-12, max_iter: 200 }
    }
}

impl ElConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.m_threshold) || !positive(self.c0) || !positive(self.lambda_tol) || self.max_iter == 0 {
            return Err(ElError::InvalidParameter(format!(
                "EL configuration fields must be strictly positive: {self:?}"
            )));
        }
        Ok(())
    }

    /// log Dₙ for a sample of size n.
    pub fn log_penalty(&self, n: usize) -> f64 {
        -self.c0 * n as f64
    }
}

/// Result of one EL solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ElEvaluation {
    /// `None` unless the solve was attempted (that is, `feasible`).
    pub lambda: Option<f64>,
    /// Empty unless `feasible`.
    pub weights: Vec<f64>,
    /// lr(θ) = Σ log(n pᵢ); `None` unless `feasible`.
    pub log_ratio: Option<f64>,
    /// Zero is strictly inside the hull of the gᵢ and w₁ > M, w₂ > M.
    pub feasible: bool,
    /// Σ g² I(g < 0)
    pub w1: f64,
    /// Σ g² I(g > 0)
    pub w2: f64,
    pub n: usize,
}

impl ElEvaluation {
    /// lr(θ) when the one-sided mass condition holds, otherwise log Dₙ.
    pub fn adjusted_log_ratio(&self, config: &ElConfig) -> f64 {
        match self.log_ratio {
            Some(lr) if self.feasible => lr,
            _ => config.log_penalty(self.n),
        }
    }
}

pub fn gvalues(sample: &[f64], spec: &EstimatingFunction, theta: f64) -> Vec<f64> {
    sample.iter().map(|&x| spec.g(x, theta)).collect()
}

fn one_sided_masses(gvals: &[f64]) -> (f64, f64) {
    gvals.iter().fold((0.0, 0.0), |(w1, w2), &g| {
        if g < 0.0 {
            (w1 + g * g, w2)
        } else if g > 0.0 {
            (w1, w2 + g * g)
        } else {
            (w1, w2)
        }
    })
}

fn in_hull(gvals: &[f64]) -> bool {
    let (lo, hi) = gvals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    lo < 0.0 && hi > 0.0
}

/// Exact bracket for λ. Requires min gᵢ < 0 < max gᵢ.
pub fn lambda_bounds(gvals: &[f64]) -> Result<(f64, f64)> {
    if !in_hull(gvals) {
        return Err(ElError::OutOfHull);
    }
    let n = gvals.len() as f64;
    let total: f64 = gvals.iter().sum();
    let (w1, w2) = one_sided_masses(gvals);
    Ok(if total >= 0.0 { (0.0, n * total / w1) } else { (n * total / w2, 0.0) })
}

/// Outcome of [`solve_lambda_detailed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaSolution {
    pub lambda: f64,
    /// n⁻¹ Σ gᵢ/(n + λgᵢ) at `lambda`.
    pub residual: f64,
    pub iterations: usize,
}

pub fn solve_lambda(gvals: &[f64], config: &ElConfig) -> Result<f64> {
    solve_lambda_detailed(gvals, config).map(|s| s.lambda)
}

pub fn solve_lambda_detailed(gvals: &[f64], config: &ElConfig) -> Result<LambdaSolution> {
    let (bound_lo, bound_hi) = lambda_bounds(gvals)?;
    let n = gvals.len() as f64;
    let total: f64 = gvals.iter().sum();
    if total == 0.0 {
        return Ok(LambdaSolution { lambda: 0.0, residual: 0.0, iterations: 0 });
    }

    // admissible region n + λg >= margin·n for every g
    let (gmin, gmax) = gvals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &g| (lo.min(g), hi.max(g)));
    let keep = 1.0 - POSITIVITY_MARGIN;
    let (mut a, mut b) = if total > 0.0 {
        (bound_lo, bound_hi.min(n * keep / -gmin))
    } else {
        (bound_lo.max(-n * keep / gmax), bound_hi)
    };

    // r(λ) = Σ g/(n + λg), strictly decreasing; r(a) > 0 > r(b)
    let eval = |lam: f64| {
        let mut r = 0.0;
        let mut dr = 0.0;
        for &g in gvals {
            let q = g / (n + lam * g);
            r += q;
            dr -= q * q;
        }
        (r, dr)
    };

    let sum_sq: f64 = gvals.iter().map(|g| g * g).sum();
    let mut x = (n * total / sum_sq).clamp(a, b);
    if x == a || x == b {
        x = 0.5 * (a + b);
    }

    let tol = config.lambda_tol * n;
    let mut best = (x, f64::INFINITY);
    let mut polish = 0;
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < config.max_iter {
        iterations += 1;
        let (r, dr) = eval(x);
        if r.abs() < best.1.abs() {
            best = (x, r);
        }
        if r == 0.0 {
            break;
        }
        if r > 0.0 {
            a = x;
        } else {
            b = x;
        }
        if r.abs() < tol {
            // a couple of extra Newton steps drive the residual to rounding level
            polish += 1;
            if polish > 2 {
                break;
            }
        }
        let newton = x - r / dr;
        let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if next == x || next <= a || next >= b {
            // bracket exhausted at floating-point resolution
            stalled = true;
            break;
        }
        x = next;
    }

    let (lambda, r) = best;
    if r.abs() >= tol && !stalled {
        return Err(ElError::NoConvergence { iterations });
    }
    Ok(LambdaSolution { lambda, residual: r / n, iterations })
}

/// Solves the EL problem for precomputed values gᵢ = G(Xᵢ, θ).
pub fn evaluate_gvalues(gvals: &[f64], config: &ElConfig) -> Result<ElEvaluation> {
    let n = gvals.len();
    let (w1, w2) = one_sided_masses(gvals);
    let mut out = ElEvaluation { lambda: None, weights: Vec::new(), log_ratio: None, feasible: false, w1, w2, n };
    if n == 0 || w1 <= config.m_threshold || w2 <= config.m_threshold {
        return Ok(out);
    }
    let lambda = solve_lambda(gvals, config)?;
    let nf = n as f64;
    out.weights = gvals.iter().map(|&g| 1.0 / (nf + lambda * g)).collect();
    let lr: f64 = -gvals.iter().map(|&g| (lambda * g / nf).ln_1p()).sum::<f64>();
    out.lambda = Some(lambda);
    // lr is at most zero; clamp rounding noise at λ ≈ 0
    out.log_ratio = Some(lr.min(0.0));
    out.feasible = true;
    Ok(out)
}

/// Solves the EL problem at θ. Infeasibility is reported through the flag.
pub fn el_evaluate(
    sample: &[f64],
    spec: &EstimatingFunction,
    theta: f64,
    config: &ElConfig,
) -> Result<ElEvaluation> {
    evaluate_gvalues(&gvalues(sample, spec, theta), config)
}

/// lr(θ) if w₁ > M and w₂ > M, otherwise -c0·n.
pub fn adjusted_log_el_ratio(sample: &[f64], spec: &EstimatingFunction, theta: f64, config: &ElConfig) -> f64 {
    adjusted_log_ratio_gvalues(&gvalues(sample, spec, theta), config)
}

pub fn adjusted_log_ratio_gvalues(gvals: &[f64], config: &ElConfig) -> f64 {
    match evaluate_gvalues(gvals, config) {
        Ok(e) => e.adjusted_log_ratio(config),
        // the bracket makes a non-converged solve practically impossible;
        // treat it like a failed mass condition
        Err(_) => config.log_penalty(gvals.len()),
    }
}
