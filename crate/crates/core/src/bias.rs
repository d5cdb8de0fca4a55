//! Closed-form first-order biases of θ̂ and θ̃, reported as n·bias.
//!
//! With A = E{GG'}/[E{G'}]² and B = ½E{G²}E{G''}/[E{G'}]³ at θ₀:
//! n·Bias(θ̂) = A - B and n·Bias(θ̃) = B.

use crate::error::{ElError, Result};
use crate::estimating_function::{EstimatingFunction, MomentOracle};

/// |E G(θ₀)| above this is rejected.
pub const ROOT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasReport {
    pub n_bias_mele: f64,
    pub n_bias_pmele: f64,
}

impl BiasReport {
    pub fn bias_mele(&self, n: usize) -> f64 {
        self.n_bias_mele / n as f64
    }

    pub fn bias_pmele(&self, n: usize) -> f64 {
        self.n_bias_pmele / n as f64
    }
}

pub fn first_order_bias(spec: &EstimatingFunction, oracle: &MomentOracle, theta0: f64) -> Result<BiasReport> {
    let f = spec.moment_functionals(oracle, theta0)?;
    if f.eg.is_nan() || f.eg.abs() > ROOT_TOLERANCE {
        return Err(ElError::NotARoot { theta0, residual: f.eg });
    }
    if f.eg1 == 0.0 || !f.eg1.is_finite() {
        return Err(ElError::DegenerateDenominator);
    }
    let d2 = f.eg1 * f.eg1;
    // exact zero rather than rounding noise in E{G} at θ₀
    let a = if spec.derivative_free_of_data() { 0.0 } else { f.egg1 / d2 };
    let b = if f.eg2nd == 0.0 { 0.0 } else { 0.5 * f.eg2 * f.eg2nd / (d2 * f.eg1) };
    Ok(BiasReport { n_bias_mele: a - b, n_bias_pmele: b })
}
