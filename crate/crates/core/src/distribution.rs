//! Data-generating distributions used by the Monte Carlo harness, with
//! their closed-form raw and exponential moments.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution as _, Exp, LogNormal, Normal, StandardNormal};

use crate::error::{ElError, Result};

/// Largest raw moment order any oracle is asked for (E(X-θ)^6 in the cubic case).
pub const MAX_RAW_MOMENT: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// `sd` is the standard deviation, not the variance.
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
    ChiSquared { df: f64 },
    /// Parameters of the underlying normal on the log scale.
    LogNormal { log_mean: f64, log_sd: f64 },
}

impl Distribution {
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::Normal { mean, sd }.validated()
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::Exponential { rate }.validated()
    }

    pub fn chi_squared(df: f64) -> Result<Self> {
        Self::ChiSquared { df }.validated()
    }

    pub fn log_normal(log_mean: f64, log_sd: f64) -> Result<Self> {
        Self::LogNormal { log_mean, log_sd }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            Self::Exponential { rate } => rate.is_finite() && rate > 0.0,
            Self::ChiSquared { df } => df.is_finite() && df > 0.0,
            Self::LogNormal { log_mean, log_sd } => {
                log_mean.is_finite() && log_sd.is_finite() && log_sd > 0.0
            }
        };
        if ok {
            Ok(self)
        } else {
            Err(ElError::InvalidParameter(format!("invalid distribution parameters: {self}")))
        }
    }

    /// E(X^k) for 1 <= k <= 6.
    pub fn raw_moment(&self, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        if k > MAX_RAW_MOMENT {
            return Err(ElError::MissingMoment(format!("E(X^{k}) for {self}")));
        }
        let kf = k as f64;
        Ok(match *self {
            Self::Normal { mean, sd } => {
                // sum over even j of C(k, j) mean^(k-j) sd^j (j-1)!!
                let mut total = 0.0;
                let mut j = 0;
                while j <= k {
                    let dfact = (1..j).step_by(2).map(|i| i as f64).product::<f64>();
                    total += binomial(k, j) * mean.powi((k - j) as i32) * sd.powi(j as i32) * dfact;
                    j += 2;
                }
                total
            }
            Self::Exponential { rate } => (1..=k).map(|i| i as f64).product::<f64>() / rate.powi(k as i32),
            Self::ChiSquared { df } => (0..k).map(|j| df + 2.0 * j as f64).product(),
            Self::LogNormal { log_mean, log_sd } => {
                (kf * log_mean + 0.5 * kf * kf * log_sd * log_sd).exp()
            }
        })
    }

    /// E(exp(kX)), when finite.
    pub fn exp_moment(&self, k: u32) -> Result<f64> {
        let kf = k as f64;
        match *self {
            Self::Normal { mean, sd } => Ok((kf * mean + 0.5 * kf * kf * sd * sd).exp()),
            Self::Exponential { rate } if rate > kf => Ok(rate / (rate - kf)),
            Self::ChiSquared { df } if 2.0 * kf < 1.0 => Ok((1.0 - 2.0 * kf).powf(-0.5 * df)),
            _ => Err(ElError::MissingMoment(format!("E(exp({k}X)) is infinite for {self}"))),
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1).expect("first moment always exists")
    }

    pub fn variance(&self) -> f64 {
        let m1 = self.mean();
        self.raw_moment(2).expect("second moment always exists") - m1 * m1
    }

    /// Draws `n` i.i.d. variates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        match *self {
            Self::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Self::Exponential { rate } => {
                let d = Exp::new(rate).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Self::ChiSquared { df } if df.fract() == 0.0 && df <= 64.0 => {
                // integer df: sum of squared standard normals
                let k = df as usize;
                (0..n)
                    .map(|_| {
                        (0..k)
                            .map(|_| {
                                let z: f64 = rng.sample(StandardNormal);
                                z * z
                            })
                            .sum()
                    })
                    .collect()
            }
            Self::ChiSquared { df } => {
                let d = ChiSquared::new(df).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            Self::LogNormal { log_mean, log_sd } => {
                let d = LogNormal::new(log_mean, log_sd).expect("validated");
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
    }

    /// Stable 64-bit identifier used to derive random streams.
    pub fn stream_id(&self) -> u64 {
        let (tag, a, b) = match *self {
            Self::Normal { mean, sd } => (1u64, mean, sd),
            Self::Exponential { rate } => (2, rate, 0.0),
            Self::ChiSquared { df } => (3, df, 0.0),
            Self::LogNormal { log_mean, log_sd } => (4, log_mean, log_sd),
        };
        crate::mc::mix(&[tag, a.to_bits(), b.to_bits()])
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Normal { mean, sd } => write!(f, "normal:{mean},{sd}"),
            Self::Exponential { rate } => write!(f, "exp:{rate}"),
            Self::ChiSquared { df } => write!(f, "chisq:{df}"),
            Self::LogNormal { log_mean, log_sd } => write!(f, "lognormal:{log_mean},{log_sd}"),
        }
    }
}

/// Parses `normal:MEAN,SD`, `exp:RATE`, `chisq:DF` or `lognormal:LOGMEAN,LOGSD`.
impl FromStr for Distribution {
    type Err = ElError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || ElError::InvalidParameter(format!("cannot parse distribution '{s}'"));
        let (name, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let params: Vec<f64> = args
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (name.trim().to_ascii_lowercase().as_str(), params.as_slice()) {
            ("normal", [m, s]) => Self::normal(*m, *s),
            ("exp" | "exponential", [r]) => Self::exponential(*r),
            ("chisq" | "chi-squared", [k]) => Self::chi_squared(*k),
            ("lognormal", [m, s]) => Self::log_normal(*m, *s),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_moments_are_factorials() {
        let d = Distribution::exponential(1.0).unwrap();
        let m: Vec<f64> = (1..=4).map(|k| d.raw_moment(k).unwrap()).collect();
        assert_eq!(m, vec![1.0, 2.0, 6.0, 24.0]);
    }

    #[test]
    fn chi_squared_one_moments() {
        let d = Distribution::chi_squared(1.0).unwrap();
        let m: Vec<f64> = (1..=3).map(|k| d.raw_moment(k).unwrap()).collect();
        assert_eq!(m, vec![1.0, 3.0, 15.0]);
    }

    #[test]
    fn normal_moments_match_closed_forms() {
        let d = Distribution::normal(10.0, 2.0).unwrap();
        assert_eq!(d.raw_moment(2).unwrap(), 104.0);
        assert_eq!(d.raw_moment(3).unwrap(), 1000.0 + 3.0 * 10.0 * 4.0);
        assert_eq!(d.raw_moment(4).unwrap(), 1e4 + 6.0 * 100.0 * 4.0 + 3.0 * 16.0);
        let z = Distribution::normal(0.0, 1.0).unwrap();
        assert_eq!(z.raw_moment(6).unwrap(), 15.0);
    }

    #[test]
    fn infinite_exp_moments_are_missing() {
        assert!(Distribution::log_normal(0.0, 0.5).unwrap().exp_moment(1).is_err());
        assert!(Distribution::exponential(1.0).unwrap().exp_moment(1).is_err());
        assert_eq!(Distribution::exponential(3.0).unwrap().exp_moment(1).unwrap(), 1.5);
    }

    #[test]
    fn parse_round_trip() {
        for s in ["normal:10,2", "exp:1", "chisq:1", "lognormal:0,0.5"] {
            let d: Distribution = s.parse().unwrap();
            assert_eq!(d.to_string().parse::<Distribution>().unwrap(), d);
        }
        assert!("normal:0,-1".parse::<Distribution>().is_err());
        assert!("cauchy:0,1".parse::<Distribution>().is_err());
    }
}
