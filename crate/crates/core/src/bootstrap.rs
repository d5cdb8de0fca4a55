//! Subsample-and-hold-out bias study for the cubic M-estimator.
//!
//! Each replication draws n points without replacement from a data group,
//! estimates θ̂ and θ̃ (G(u, θ) = (u - θ)³, prior from the subsample's own
//! moments) and compares both with the root of Σ(yᵢ - θ)³ over the N - n
//! points left out.

use std::fs;
use std::path::Path;

use rand::seq::index;
use rayon::prelude::*;

use crate::distribution::Distribution;
use crate::el::ElConfig;
use crate::error::{ElError, Result};
use crate::estimating_function::EstimatingFunction;
use crate::estimators::{mele, penalized_mele, ROOT_TOL};
use crate::mc::{draw_sample, mix, StreamKey};
use crate::numeric::{brent_root, compensated_sum};
use crate::prior::PriorSpec;

const BOOTSTRAP_STREAM: u64 = 0x424f_4f54_0000_0000;

#[derive(Debug, Clone, PartialEq)]
pub struct GroupData {
    pub label: String,
    pub values: Vec<f64>,
}

impl GroupData {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(ElError::InvalidSample("group has no values".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ElError::InvalidSample(format!("non-finite value {v}")));
        }
        Ok(Self { label: label.into(), values })
    }

    /// A synthetic group of `size` draws from `dist`.
    pub fn synthetic(label: impl Into<String>, dist: &Distribution, size: usize, seed: u64) -> Result<Self> {
        let label = label.into();
        let key = StreamKey::new(seed, &[BOOTSTRAP_STREAM, label_id(&label), dist.stream_id(), size as u64]);
        Self::new(label, draw_sample(dist, size, key))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn label_id(label: &str) -> u64 {
    let words: Vec<u64> = label
        .as_bytes()
        .chunks(8)
        .map(|c| c.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64))
        .collect();
    mix(&words)
}

/// Reads one value per line. A non-numeric first line is taken as a header;
/// blank lines are skipped; LF and CRLF endings are accepted.
pub fn ingest_csv(path: impl AsRef<Path>) -> Result<GroupData> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| ElError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    let mut values = Vec::new();
    let mut seen_line = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let token = line.split(',').next().unwrap_or("").trim();
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ if !seen_line => {}
            _ => {
                return Err(ElError::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("'{line}' is not a finite number"),
                })
            }
        }
        seen_line = true;
    }
    if values.is_empty() {
        return Err(ElError::EmptyFile(path.to_path_buf()));
    }
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    GroupData::new(label, values)
}

/// The root of θ ↦ Σ(yᵢ - θ)³, which is strictly decreasing when the yᵢ are
/// not all equal. A constant sample returns its common value.
pub fn cubic_root(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(ElError::InvalidSample("sample is empty".into()));
    }
    let (lo, hi) = sample
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    if lo == hi {
        return Ok(lo);
    }
    let f = |t: f64| compensated_sum(sample.iter().map(|&y| (y - t).powi(3)));
    Ok(brent_root(f, lo, hi, 0.0, 500)?.x)
}

/// One row of the study, per subsample size.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    /// Average held-out root over the successful replications.
    pub theta_ref: f64,
    pub mean_mele: f64,
    pub mean_pmele: f64,
    /// Average of θ̂ₙ - θ_ref.
    pub mean_bias_mele: f64,
    /// Average of θ̃ₙ - θ_ref.
    pub mean_bias_pmele: f64,
    pub mse_mele: f64,
    pub mse_pmele: f64,
    pub mc_se_mele: f64,
    pub reps: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyResult {
    pub label: String,
    pub rows: Vec<StudyRow>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleOutcome {
    pub mele: f64,
    pub pmele: f64,
    pub theta_ref: f64,
}

/// Indices of the subsample drawn in replication `rep`.
pub fn subsample_indices(group: &GroupData, n: usize, seed: u64, rep: usize) -> Vec<usize> {
    let key = StreamKey::new(seed, &[BOOTSTRAP_STREAM, label_id(&group.label), n as u64, rep as u64]);
    let mut idx = index::sample(&mut key.rng(), group.len(), n).into_vec();
    idx.sort_unstable();
    idx
}

/// One replication: subsample, both estimates, held-out root.
pub fn run_replication(group: &GroupData, n: usize, seed: u64, rep: usize, config: &ElConfig) -> Result<SubsampleOutcome> {
    let idx = subsample_indices(group, n, seed, rep);
    let mut chosen = Vec::with_capacity(n);
    let mut rest = Vec::with_capacity(group.len() - n);
    let mut next = idx.iter().peekable();
    for (i, &v) in group.values.iter().enumerate() {
        if next.peek() == Some(&&i) {
            chosen.push(v);
            next.next();
        } else {
            rest.push(v);
        }
    }
    let spec = EstimatingFunction::CubicCentered;
    let m = mele(&chosen, &spec, ROOT_TOL)?;
    let prior = PriorSpec::from_sample(spec, &chosen)?;
    let p = penalized_mele(&chosen, &spec, &prior, config)?;
    Ok(SubsampleOutcome { mele: m.theta, pmele: p.theta, theta_ref: cubic_root(&rest)? })
}

fn summarize(n: usize, outcomes: &[Option<SubsampleOutcome>]) -> StudyRow {
    let ok: Vec<&SubsampleOutcome> = outcomes.iter().flatten().collect();
    let k = ok.len() as f64;
    let mean = |f: &dyn Fn(&SubsampleOutcome) -> f64| compensated_sum(ok.iter().map(|o| f(o))) / k;
    let mean_mele = mean(&|o| o.mele);
    let bias_mele = mean(&|o| o.mele - o.theta_ref);
    let var = if ok.len() > 1 {
        compensated_sum(ok.iter().map(|o| (o.mele - o.theta_ref - bias_mele).powi(2))) / (k - 1.0)
    } else {
        0.0
    };
    StudyRow {
        n,
        theta_ref: mean(&|o| o.theta_ref),
        mean_mele,
        mean_pmele: mean(&|o| o.pmele),
        mean_bias_mele: bias_mele,
        mean_bias_pmele: mean(&|o| o.pmele - o.theta_ref),
        mse_mele: mean(&|o| (o.mele - o.theta_ref).powi(2)),
        mse_pmele: mean(&|o| (o.pmele - o.theta_ref).powi(2)),
        mc_se_mele: (var / k).sqrt(),
        reps: ok.len(),
        failures: outcomes.len() - ok.len(),
    }
}

pub fn run_study(group: &GroupData, n_list: &[usize], reps: usize, seed: u64, config: &ElConfig) -> Result<StudyResult> {
    config.validate()?;
    if reps == 0 {
        return Err(ElError::InvalidParameter("reps must be positive".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n < 2 || n >= group.len()) {
        return Err(ElError::InvalidParameter(format!(
            "subsample size {n} must be at least 2 and below the group size {}",
            group.len()
        )));
    }
    let rows = n_list
        .iter()
        .map(|&n| {
            let outcomes: Vec<Option<SubsampleOutcome>> = (0..reps)
                .into_par_iter()
                .map(|r| run_replication(group, n, seed, r, config).ok())
                .collect();
            summarize(n, &outcomes)
        })
        .collect();
    Ok(StudyResult { label: group.label.clone(), rows })
}
