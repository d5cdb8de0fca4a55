//! The EL prior π(θ) ∝ σ²(θ)^(-1/2), with σ²(θ) = E{G²} / [E{G'}]².
//!
//! The prior is only ever used unnormalized, since the penalized estimate
//! depends on it through an argmax.

use crate::error::{ElError, Result};
use crate::estimating_function::{EstimatingFunction, MomentOracle};

/// Anything usable as an (unnormalized) log prior density over θ.
pub trait LogPrior: Sync {
    fn log_prior(&self, theta: f64) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub spec: EstimatingFunction,
    pub oracle: MomentOracle,
}

impl PriorSpec {
    pub fn new(spec: EstimatingFunction, oracle: MomentOracle) -> Self {
        Self { spec, oracle }
    }

    /// Prior built from the empirical moments of `sample`.
    pub fn from_sample(spec: EstimatingFunction, sample: &[f64]) -> Result<Self> {
        Ok(Self::new(spec, sample_moment_oracle(sample)?))
    }

    pub fn sigma2(&self, theta: f64) -> Result<f64> {
        let f = self.spec.moment_functionals(&self.oracle, theta)?;
        let degenerate = |reason: &str| ElError::DegeneratePrior { theta, reason: reason.into() };
        if f.eg1 == 0.0 || !f.eg1.is_finite() {
            return Err(degenerate("E G' is zero"));
        }
        if f.eg2.is_nan() || f.eg2 <= 0.0 || f.eg2.is_infinite() {
            return Err(degenerate("E G^2 is not positive"));
        }
        Ok(f.eg2 / (f.eg1 * f.eg1))
    }
}

impl LogPrior for PriorSpec {
    fn log_prior(&self, theta: f64) -> Result<f64> {
        Ok(-0.5 * self.sigma2(theta)?.ln())
    }
}

/// Constant prior; the penalized estimate reduces to the MELE.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FlatPrior;

impl LogPrior for FlatPrior {
    fn log_prior(&self, _theta: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// A prior multiplied by the constant exp(offset).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledPrior<P> {
    pub inner: P,
    pub log_scale: f64,
}

impl<P: LogPrior> LogPrior for ScaledPrior<P> {
    fn log_prior(&self, theta: f64) -> Result<f64> {
        Ok(self.inner.log_prior(theta)? + self.log_scale)
    }
}

pub fn sample_moment_oracle(sample: &[f64]) -> Result<MomentOracle> {
    MomentOracle::sample(sample)
}
