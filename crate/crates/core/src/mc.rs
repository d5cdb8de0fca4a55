//! Seeded Monte Carlo harness for θ̂ and θ̃.
//!
//! Replication `r` of a cell draws its sample from its own ChaCha stream keyed
//! by (seed, distribution, n, r), so results do not depend on how
//! replications are scheduled across threads. Per-replication outcomes are
//! collected in index order and reduced sequentially.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distribution::Distribution;
use crate::el::{adjusted_log_el_ratio, ElConfig};
use crate::error::{ElError, Result};
use crate::estimating_function::{EstimatingFunction, MomentOracle};
use crate::estimators::{mele, penalized_mele, ROOT_TOL};
use crate::numeric::{brent_root, compensated_sum};
use crate::prior::{FlatPrior, LogPrior, PriorSpec};

pub const DEFAULT_SEED: u64 = 20_170_301;

const WILKS_STREAM: u64 = 0x5749_4c4b_5300_0000;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit mix of a sequence of words.
pub fn mix(words: &[u64]) -> u64 {
    words.iter().fold(0x6a09_e667_f3bc_c908, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Key identifying one independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey(pub u64);

impl StreamKey {
    pub fn new(seed: u64, parts: &[u64]) -> Self {
        let mut words = Vec::with_capacity(parts.len() + 1);
        words.push(seed);
        words.extend_from_slice(parts);
        Self(mix(&words))
    }

    /// Stream of replication `rep` in cell (`dist`, `n`).
    pub fn replication(seed: u64, dist: &Distribution, n: usize, rep: usize) -> Self {
        Self::new(seed, &[dist.stream_id(), n as u64, rep as u64])
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

pub fn draw_sample(dist: &Distribution, n: usize, key: StreamKey) -> Vec<f64> {
    dist.sample(&mut key.rng(), n)
}

/// True parameter θ₀ solving E G(X, θ₀) = 0 under `dist`.
pub fn theta0_of(spec: &EstimatingFunction, dist: &Distribution) -> Result<f64> {
    match *spec {
        EstimatingFunction::Mean => dist.raw_moment(1),
        EstimatingFunction::SecondMomentRatio => Ok(dist.raw_moment(2)? / (2.0 * dist.raw_moment(1)?)),
        EstimatingFunction::ExpScale { mu } => Ok(2.0 * (dist.exp_moment(1)?.ln() - mu)),
        EstimatingFunction::CubicCentered => {
            let oracle = MomentOracle::Analytic(*dist);
            let (m, sd) = (dist.mean(), dist.variance().sqrt());
            let f = |t: f64| spec.moment_functionals(&oracle, t).map(|f| f.eg).unwrap_or(f64::NAN);
            Ok(brent_root(f, m - 20.0 * sd, m + 20.0 * sd, 0.0, 500)?.x)
        }
    }
}

/// Where the penalized estimator's prior moments come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriorSource {
    /// True moments of the data-generating distribution.
    Analytic,
    /// Normal data, variance set to θ (exponential-scale family only).
    PlugIn,
    /// Moments of each replication's own sample.
    SampleMoments,
    Flat,
}

impl std::str::FromStr for PriorSource {
    type Err = ElError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "analytic" => Ok(Self::Analytic),
            "plugin" | "plug-in" => Ok(Self::PlugIn),
            "sample" | "sample-moments" => Ok(Self::SampleMoments),
            "flat" => Ok(Self::Flat),
            other => Err(ElError::InvalidParameter(format!("unknown prior source '{other}'"))),
        }
    }
}

impl std::fmt::Display for PriorSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Analytic => "analytic",
            Self::PlugIn => "plugin",
            Self::SampleMoments => "sample",
            Self::Flat => "flat",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub label: String,
    pub spec: EstimatingFunction,
    pub dist: Distribution,
    pub theta0: f64,
    pub prior_source: PriorSource,
    pub n_list: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub el_config: ElConfig,
}

impl ScenarioSpec {
    /// Builds a scenario with θ₀ computed from the distribution.
    pub fn new(label: impl Into<String>, spec: EstimatingFunction, dist: Distribution) -> Result<Self> {
        let theta0 = theta0_of(&spec, &dist)?;
        Ok(Self {
            label: label.into(),
            spec,
            dist,
            theta0,
            prior_source: PriorSource::Analytic,
            n_list: vec![15, 25, 50, 75, 100, 150],
            reps: 10_000,
            seed: DEFAULT_SEED,
            el_config: ElConfig::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.dist.validated()?;
        self.el_config.validate()?;
        if self.reps == 0 {
            return Err(ElError::InvalidParameter("reps must be positive".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(ElError::InvalidParameter(format!("sample size {n} is below 2")));
        }
        let eg = match self.spec.moment_functionals(&MomentOracle::Analytic(self.dist), self.theta0) {
            Ok(f) => f.eg,
            Err(ElError::MissingMoment(m)) => return Err(ElError::InvalidParameter(format!("{}: {m}", self.label))),
            Err(e) => return Err(e),
        };
        if eg.is_nan() || eg.abs() >= 1e-8 {
            return Err(ElError::InvalidParameter(format!(
                "{}: theta0 = {} is not a root of E G (residual {eg:e})",
                self.label, self.theta0
            )));
        }
        if self.prior_source == PriorSource::PlugIn
            && !(matches!(self.spec, EstimatingFunction::ExpScale { .. }) && matches!(self.dist, Distribution::Normal { .. }))
        {
            return Err(ElError::InvalidParameter(
                "plug-in prior needs the exp-scale function with normal data".into(),
            ));
        }
        Ok(())
    }

    fn fixed_prior(&self) -> Option<PriorSpec> {
        match self.prior_source {
            PriorSource::Analytic => Some(PriorSpec::new(self.spec, MomentOracle::Analytic(self.dist))),
            PriorSource::PlugIn => Some(PriorSpec::new(
                self.spec,
                MomentOracle::NormalVarianceAsTheta { mean: self.dist.mean() },
            )),
            PriorSource::SampleMoments | PriorSource::Flat => None,
        }
    }
}

/// θ̂ and θ̃ on one replication's sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationEstimate {
    pub mele: f64,
    pub pmele: f64,
}

/// Computes both estimates on `sample`; `fixed_prior` is used unless the
/// scenario asks for sample moments or a flat prior.
pub fn estimate_pair(
    sample: &[f64],
    scenario: &ScenarioSpec,
    fixed_prior: Option<&PriorSpec>,
) -> Result<ReplicationEstimate> {
    let spec = &scenario.spec;
    let cfg = &scenario.el_config;
    let m = mele(sample, spec, ROOT_TOL)?;
    let p = match (scenario.prior_source, fixed_prior) {
        (PriorSource::Flat, _) => penalized_mele(sample, spec, &FlatPrior, cfg)?,
        (PriorSource::SampleMoments, _) => penalized_mele(sample, spec, &PriorSpec::from_sample(*spec, sample)?, cfg)?,
        (_, Some(prior)) => penalized_mele(sample, spec, prior as &dyn LogPrior, cfg)?,
        (_, None) => return Err(ElError::InvalidParameter("missing prior".into())),
    };
    Ok(ReplicationEstimate { mele: m.theta, pmele: p.theta })
}

/// One row of a Monte Carlo table.
#[derive(Debug, Clone, PartialEq)]
pub struct McCellResult {
    pub n: usize,
    pub theta0: f64,
    /// Replications contributing to the aggregates.
    pub reps: usize,
    pub mean_mele: f64,
    pub mean_pmele: f64,
    pub n_bias_mele: f64,
    pub n_bias_pmele: f64,
    pub mse_mele: f64,
    pub mse_pmele: f64,
    pub mc_se_mele: f64,
    pub replication_failures: usize,
}

/// Aggregates per-replication pairs around a reference value.
pub(crate) fn aggregate(n: usize, theta0: f64, outcomes: &[Option<ReplicationEstimate>]) -> McCellResult {
    let ok: Vec<ReplicationEstimate> = outcomes.iter().flatten().copied().collect();
    let k = ok.len();
    let kf = k as f64;
    let mean = |f: &dyn Fn(&ReplicationEstimate) -> f64| compensated_sum(ok.iter().map(f)) / kf;
    let mean_mele = mean(&|r| r.mele);
    let mean_pmele = mean(&|r| r.pmele);
    let var_mele = if k > 1 {
        compensated_sum(ok.iter().map(|r| (r.mele - mean_mele).powi(2))) / (kf - 1.0)
    } else {
        0.0
    };
    McCellResult {
        n,
        theta0,
        reps: k,
        mean_mele,
        mean_pmele,
        n_bias_mele: n as f64 * (mean_mele - theta0),
        n_bias_pmele: n as f64 * (mean_pmele - theta0),
        mse_mele: mean(&|r| (r.mele - theta0).powi(2)),
        mse_pmele: mean(&|r| (r.pmele - theta0).powi(2)),
        mc_se_mele: (var_mele / kf).sqrt(),
        replication_failures: outcomes.len() - k,
    }
}

/// Runs `scenario.reps` replications at sample size `n` on the current rayon pool.
pub fn run_cell(scenario: &ScenarioSpec, n: usize) -> Result<McCellResult> {
    scenario.validate()?;
    let prior = scenario.fixed_prior();
    let outcomes: Vec<Option<ReplicationEstimate>> = (0..scenario.reps)
        .into_par_iter()
        .map(|r| {
            let sample = draw_sample(&scenario.dist, n, StreamKey::replication(scenario.seed, &scenario.dist, n, r));
            estimate_pair(&sample, scenario, prior.as_ref()).ok()
        })
        .collect();
    Ok(aggregate(n, scenario.theta0, &outcomes))
}

pub fn run_table(scenario: &ScenarioSpec) -> Result<Vec<McCellResult>> {
    scenario.n_list.iter().map(|&n| run_cell(scenario, n)).collect()
}

/// Mean of -2 lr_e(θ₀) over `reps` samples; tends to 1 (the χ²₁ mean).
pub fn wilks_check(
    dist: &Distribution,
    spec: &EstimatingFunction,
    theta0: f64,
    n: usize,
    reps: usize,
    seed: u64,
    config: &ElConfig,
) -> Result<f64> {
    dist.validated()?;
    config.validate()?;
    if reps == 0 || n == 0 {
        return Err(ElError::InvalidParameter("n and reps must be positive".into()));
    }
    let stats: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|r| {
            let key = StreamKey::new(seed, &[WILKS_STREAM, dist.stream_id(), n as u64, r as u64]);
            let sample = draw_sample(dist, n, key);
            -2.0 * adjusted_log_el_ratio(&sample, spec, theta0, config)
        })
        .collect();
    Ok(compensated_sum(stats) / reps as f64)
}
