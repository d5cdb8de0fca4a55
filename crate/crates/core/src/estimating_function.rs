//! Scalar estimating functions G(x, θ), their θ-derivatives, and the moment
//! functionals E{G}, E{G²}, E{G'}, E{GG'}, E{G''} used by the prior and the
//! bias formulas.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::distribution::{Distribution, MAX_RAW_MOMENT};
use crate::error::{ElError, Result};
use crate::numeric::compensated_sum;

/// The supported estimating-function families. Every family is strictly
/// decreasing in θ on its data support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatingFunction {
    /// G = x - θ
    Mean,
    /// G = x² - 2θx, for positive data; θ₀ = E(X²) / 2E(X)
    SecondMomentRatio,
    /// G = exp(x) - exp(μ + θ/2); θ₀ is the variance of normal data with mean μ
    ExpScale { mu: f64 },
    /// G = (x - θ)³
    CubicCentered,
}

impl EstimatingFunction {
    #[inline]
    pub fn g(&self, x: f64, theta: f64) -> f64 {
        match *self {
            Self::Mean => x - theta,
            Self::SecondMomentRatio => x * x - 2.0 * theta * x,
            Self::ExpScale { mu } => x.exp() - (mu + 0.5 * theta).exp(),
            Self::CubicCentered => {
                let d = x - theta;
                d * d * d
            }
        }
    }

    #[inline]
    pub fn g_dtheta(&self, x: f64, theta: f64) -> f64 {
        match *self {
            Self::Mean => -1.0,
            Self::SecondMomentRatio => -2.0 * x,
            Self::ExpScale { mu } => -0.5 * (mu + 0.5 * theta).exp(),
            Self::CubicCentered => {
                let d = x - theta;
                -3.0 * d * d
            }
        }
    }

    #[inline]
    pub fn g_dtheta2(&self, x: f64, theta: f64) -> f64 {
        match *self {
            Self::Mean | Self::SecondMomentRatio => 0.0,
            Self::ExpScale { mu } => -0.25 * (mu + 0.5 * theta).exp(),
            Self::CubicCentered => 6.0 * (x - theta),
        }
    }

    /// G'(x, θ) does not depend on x, so E{GG'} = G'·E{G} vanishes at θ₀.
    pub fn derivative_free_of_data(&self) -> bool {
        matches!(self, Self::Mean | Self::ExpScale { .. })
    }

    /// The θ at which G(x, θ) = 0. Because G decreases in θ, G(x, θ) > 0
    /// exactly when θ is below this root.
    pub fn point_root(&self, x: f64) -> f64 {
        match *self {
            Self::Mean | Self::CubicCentered => x,
            Self::SecondMomentRatio => 0.5 * x,
            Self::ExpScale { mu } => 2.0 * (x - mu),
        }
    }

    /// Checks that every observation lies in the family's support.
    pub fn check_support(&self, sample: &[f64]) -> Result<()> {
        if sample.is_empty() {
            return Err(ElError::InvalidSample("sample is empty".into()));
        }
        if let Some(x) = sample.iter().find(|x| !x.is_finite()) {
            return Err(ElError::InvalidSample(format!("non-finite observation {x}")));
        }
        if matches!(self, Self::SecondMomentRatio) {
            if let Some(x) = sample.iter().find(|&&x| x <= 0.0) {
                return Err(ElError::InvalidSample(format!(
                    "second-moment-ratio requires positive data, found {x}"
                )));
            }
        }
        Ok(())
    }

    /// Computes the five moment functionals at θ.
    pub fn moment_functionals(&self, oracle: &MomentOracle, theta: f64) -> Result<MomentFunctionals> {
        if let MomentOracle::Sample(s) = oracle {
            return Ok(s.functionals(self, theta));
        }
        let raw = |k: u32| oracle.raw_moment(k);
        Ok(match *self {
            Self::Mean => {
                let (m1, m2) = (raw(1)?, raw(2)?);
                MomentFunctionals {
                    eg: m1 - theta,
                    eg2: m2 - 2.0 * theta * m1 + theta * theta,
                    eg1: -1.0,
                    egg1: theta - m1,
                    eg2nd: 0.0,
                }
            }
            Self::SecondMomentRatio => {
                let (m1, m2, m3, m4) = (raw(1)?, raw(2)?, raw(3)?, raw(4)?);
                MomentFunctionals {
                    eg: m2 - 2.0 * theta * m1,
                    eg2: 4.0 * theta * theta * m2 - 4.0 * theta * m3 + m4,
                    eg1: -2.0 * m1,
                    egg1: -2.0 * m3 + 4.0 * theta * m2,
                    eg2nd: 0.0,
                }
            }
            Self::ExpScale { mu } => {
                let c = (mu + 0.5 * theta).exp();
                let e1 = oracle.exp_moment(1, theta)?;
                let e2 = oracle.exp_moment(2, theta)?;
                MomentFunctionals {
                    eg: e1 - c,
                    eg2: e2 - 2.0 * c * e1 + c * c,
                    eg1: -0.5 * c,
                    egg1: -0.5 * c * (e1 - c),
                    eg2nd: -0.25 * c,
                }
            }
            Self::CubicCentered => {
                let m: Vec<f64> = (0..=MAX_RAW_MOMENT).map(raw).collect::<Result<_>>()?;
                let central = |k: u32| central_from_raw(&m, k, theta);
                MomentFunctionals {
                    eg: central(3),
                    eg2: central(6),
                    eg1: -3.0 * central(2),
                    egg1: -3.0 * central(5),
                    eg2nd: 6.0 * central(1),
                }
            }
        })
    }
}

/// E(X - θ)^k from raw moments `m[0..=k]`.
fn central_from_raw(m: &[f64], k: u32, theta: f64) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        total += binom * m[j as usize] * (-theta).powi((k - j) as i32);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    total
}

impl fmt::Display for EstimatingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Mean => f.write_str("mean"),
            Self::SecondMomentRatio => f.write_str("second-moment-ratio"),
            Self::ExpScale { mu } => write!(f, "exp-scale:{mu}"),
            Self::CubicCentered => f.write_str("cubic"),
        }
    }
}

/// Parses `mean`, `second-moment-ratio`, `exp-scale:MU` or `cubic`.
impl FromStr for EstimatingFunction {
    type Err = ElError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("mean", None) => Ok(Self::Mean),
            ("second-moment-ratio", None) => Ok(Self::SecondMomentRatio),
            ("cubic", None) => Ok(Self::CubicCentered),
            ("exp-scale", Some(a)) => a
                .parse::<f64>()
                .ok()
                .filter(|mu| mu.is_finite())
                .map(|mu| Self::ExpScale { mu })
                .ok_or_else(|| ElError::InvalidParameter(format!("bad exp-scale mu '{a}'"))),
            _ => Err(ElError::InvalidParameter(format!("unknown estimating function '{s}'"))),
        }
    }
}

/// E{G}, E{G²}, E{G'}, E{GG'} and E{G''} at a fixed θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentFunctionals {
    pub eg: f64,
    pub eg2: f64,
    pub eg1: f64,
    pub egg1: f64,
    pub eg2nd: f64,
}

/// Empirical moments of a sample. Keeps the data so that functionals can be
/// averaged pointwise instead of expanded from raw moments.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMoments {
    data: Arc<[f64]>,
    raw: [f64; MAX_RAW_MOMENT as usize],
    exp: [f64; 2],
}

impl SampleMoments {
    pub fn new(sample: &[f64]) -> Result<Self> {
        if sample.is_empty() {
            return Err(ElError::InvalidSample("sample is empty".into()));
        }
        let n = sample.len() as f64;
        let mut raw = [0.0; MAX_RAW_MOMENT as usize];
        for (k, slot) in raw.iter_mut().enumerate() {
            *slot = compensated_sum(sample.iter().map(|x| x.powi(k as i32 + 1))) / n;
        }
        let exp = [
            compensated_sum(sample.iter().map(|x| x.exp())) / n,
            compensated_sum(sample.iter().map(|x| (2.0 * x).exp())) / n,
        ];
        Ok(Self { data: sample.into(), raw, exp })
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn functionals(&self, spec: &EstimatingFunction, theta: f64) -> MomentFunctionals {
        let n = self.data.len() as f64;
        let avg = |f: &dyn Fn(f64) -> f64| compensated_sum(self.data.iter().map(|&x| f(x))) / n;
        MomentFunctionals {
            eg: avg(&|x| spec.g(x, theta)),
            eg2: avg(&|x| spec.g(x, theta).powi(2)),
            eg1: avg(&|x| spec.g_dtheta(x, theta)),
            egg1: avg(&|x| spec.g(x, theta) * spec.g_dtheta(x, theta)),
            eg2nd: avg(&|x| spec.g_dtheta2(x, theta)),
        }
    }
}

/// Source of the population moments entering the prior and bias formulas.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentOracle {
    /// Closed-form moments of a known distribution, fixed in θ.
    Analytic(Distribution),
    /// Normal data with known mean whose variance is taken to be θ itself,
    /// so E exp(kX) = exp(kμ + k²θ/2). Only exponential moments exist.
    NormalVarianceAsTheta { mean: f64 },
    /// Empirical moments n⁻¹Σxᵢᵏ.
    Sample(SampleMoments),
}

impl MomentOracle {
    pub fn sample(sample: &[f64]) -> Result<Self> {
        SampleMoments::new(sample).map(Self::Sample)
    }

    /// E(X^k), 1 <= k <= 6.
    pub fn raw_moment(&self, k: u32) -> Result<f64> {
        match self {
            Self::Analytic(d) => d.raw_moment(k),
            Self::Sample(_) if k == 0 => Ok(1.0),
            Self::Sample(s) if k <= MAX_RAW_MOMENT => Ok(s.raw[k as usize - 1]),
            _ => Err(ElError::MissingMoment(format!("E(X^{k})"))),
        }
    }

    /// E(exp(kX)), k in {1, 2}. `theta` is only consulted by
    /// [`MomentOracle::NormalVarianceAsTheta`].
    pub fn exp_moment(&self, k: u32, theta: f64) -> Result<f64> {
        match self {
            Self::Analytic(d) => d.exp_moment(k),
            Self::NormalVarianceAsTheta { mean } => {
                let kf = k as f64;
                Ok((kf * mean + 0.5 * kf * kf * theta).exp())
            }
            Self::Sample(s) if (1..=2).contains(&k) => Ok(s.exp[k as usize - 1]),
            Self::Sample(_) => Err(ElError::MissingMoment(format!("E(exp({k}X))"))),
        }
    }
}
