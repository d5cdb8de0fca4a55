//! Command-line front end: `eval`, `estimate`, `simulate`, `bootstrap`.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 for usage,
//! configuration and input-file errors.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bias::first_order_bias;
use crate::bootstrap::{ingest_csv, run_study};
use crate::distribution::Distribution;
use crate::el::{el_evaluate, ElConfig};
use crate::error::{ElError, Result};
use crate::estimating_function::{EstimatingFunction, MomentOracle};
use crate::estimators::{mele, penalized_mele, ROOT_TOL};
use crate::mc::{run_table, theta0_of, PriorSource};
use crate::prior::{FlatPrior, LogPrior, PriorSpec};

pub use config::{ConfigFile, OutputFormat, Overrides};
use output::{render, sig6, Block};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Column names of simulate and bootstrap tables, after the leading
/// `n` and reference-value columns.
const TABLE_COLUMNS: [&str; 8] = [
    "mean_mele",
    "mean_pmele",
    "n_bias_mele",
    "n_bias_pmele",
    "mse_mele",
    "mse_pmele",
    "mc_se_mele",
    "failures",
];

#[derive(Debug, Parser)]
#[command(name = "elprior", version, about = "Empirical likelihood with a bias-reducing prior")]
pub struct Cli {
    /// Base seed for the random streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Replications per table cell.
    #[arg(long, global = true)]
    pub reps: Option<usize>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// λ, lr(θ), lr_e(θ) and the one-sided masses at a fixed θ.
    Eval {
        #[arg(long)]
        data: PathBuf,
        /// mean | second-moment-ratio | exp-scale:MU | cubic
        #[arg(long)]
        kind: String,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        /// File whose [el] section overrides the EL settings.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// θ̂ and θ̃ for one sample.
    Estimate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        kind: String,
        /// analytic | plugin | sample | flat (default: analytic with --dist, else sample)
        #[arg(long)]
        prior: Option<String>,
        /// Model distribution for an analytic prior and the bias report, e.g. `exp:1`.
        #[arg(long)]
        dist: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Monte Carlo bias tables.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Subsampling study against a held-out reference.
    Bootstrap {
        #[arg(long)]
        config: PathBuf,
        /// A single data file replacing the config's groups.
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("elprior: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_COMPUTATION
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    if cli.threads == Some(0) {
        return Err(ElError::InvalidParameter("--threads must be at least 1".into()));
    }
    let overrides = Overrides { seed: cli.seed, reps: cli.reps, format: cli.format };
    let text = match &cli.command {
        Command::Eval { data, kind, theta, config } => cmd_eval(data, kind, *theta, config.as_deref(), &overrides)?,
        Command::Estimate { data, kind, prior, dist, config } => {
            cmd_estimate(data, kind, prior.as_deref(), dist.as_deref(), config.as_deref(), &overrides)?
        }
        Command::Simulate { config } => in_pool(cli.threads, || cmd_simulate(config, &overrides))?,
        Command::Bootstrap { config, data } => {
            in_pool(cli.threads, || cmd_bootstrap(config, data.as_deref(), &overrides))?
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text).map_err(|e| ElError::Io { path: path.clone(), message: e.to_string() }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| ElError::Io { path: "<stdout>".into(), message: e.to_string() }),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| ElError::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn usage<E: std::fmt::Display>(e: E) -> ElError {
    ElError::InvalidParameter(e.to_string())
}

fn el_config_from(config: Option<&Path>) -> Result<ElConfig> {
    let cfg = match config {
        Some(p) => ConfigFile::load(p)?.el,
        None => ElConfig::default(),
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn key_value_block(rows: Vec<(&str, String)>) -> Block {
    let mut b = Block::new(None, &["quantity", "value"]);
    for (k, v) in rows {
        b.push(vec![k.to_string(), v]);
    }
    b
}

fn opt(v: Option<f64>) -> String {
    v.map(sig6).unwrap_or_else(|| "NA".into())
}

pub fn cmd_eval(data: &Path, kind: &str, theta: f64, config: Option<&Path>, o: &Overrides) -> Result<String> {
    let spec: EstimatingFunction = kind.parse().map_err(usage)?;
    if !theta.is_finite() {
        return Err(ElError::InvalidParameter("theta must be finite".into()));
    }
    let cfg = el_config_from(config)?;
    let group = ingest_csv(data)?;
    spec.check_support(&group.values).map_err(usage)?;
    let ev = el_evaluate(&group.values, &spec, theta, &cfg)?;
    let block = key_value_block(vec![
        ("n", ev.n.to_string()),
        ("theta", sig6(theta)),
        ("lambda", opt(ev.lambda)),
        ("lr", opt(ev.log_ratio)),
        ("lr_e", sig6(ev.adjusted_log_ratio(&cfg))),
        ("w1", sig6(ev.w1)),
        ("w2", sig6(ev.w2)),
        ("feasible", ev.feasible.to_string()),
    ]);
    let prov = format!("elprior eval data={} kind={spec} theta={}", data.display(), sig6(theta));
    Ok(render(&prov, &[block], o.format.unwrap_or_default()))
}

/// The prior used by `estimate`.
pub fn build_prior(
    source: PriorSource,
    spec: EstimatingFunction,
    dist: Option<&Distribution>,
    sample: &[f64],
) -> Result<Box<dyn LogPrior>> {
    let need_dist = || dist.copied().ok_or_else(|| usage(format!("--prior {source} needs --dist")));
    Ok(match source {
        PriorSource::Analytic => Box::new(PriorSpec::new(spec, MomentOracle::Analytic(need_dist()?))),
        PriorSource::PlugIn => {
            let d = need_dist()?;
            if !matches!((spec, d), (EstimatingFunction::ExpScale { .. }, Distribution::Normal { .. })) {
                return Err(usage("plug-in prior needs the exp-scale function with normal data"));
            }
            Box::new(PriorSpec::new(spec, MomentOracle::NormalVarianceAsTheta { mean: d.mean() }))
        }
        PriorSource::SampleMoments => Box::new(PriorSpec::from_sample(spec, sample)?),
        PriorSource::Flat => Box::new(FlatPrior),
    })
}

pub fn cmd_estimate(
    data: &Path,
    kind: &str,
    prior: Option<&str>,
    dist: Option<&str>,
    config: Option<&Path>,
    o: &Overrides,
) -> Result<String> {
    let spec: EstimatingFunction = kind.parse().map_err(usage)?;
    let dist: Option<Distribution> = dist.map(str::parse).transpose().map_err(usage)?;
    let source: PriorSource = match prior {
        Some(p) => p.parse().map_err(usage)?,
        None if dist.is_some() => PriorSource::Analytic,
        None => PriorSource::SampleMoments,
    };
    let cfg = el_config_from(config)?;
    let group = ingest_csv(data)?;
    let sample = &group.values;
    spec.check_support(sample).map_err(usage)?;
    let prior = build_prior(source, spec, dist.as_ref(), sample)?;

    let hat = mele(sample, &spec, ROOT_TOL)?;
    let tilde = penalized_mele(sample, &spec, &*prior, &cfg)?;
    let n = sample.len();
    let mut rows = vec![
        ("n", n.to_string()),
        ("prior", source.to_string()),
        ("feasible_lo", sig6(hat.feasible_interval.0)),
        ("feasible_hi", sig6(hat.feasible_interval.1)),
        ("theta_hat", sig6(hat.theta)),
        ("theta_tilde", sig6(tilde.theta)),
        ("objective_tilde", sig6(tilde.objective_at_theta)),
    ];
    if let Some(d) = dist {
        let theta0 = theta0_of(&spec, &d)?;
        let report = first_order_bias(&spec, &MomentOracle::Analytic(d), theta0)?;
        rows.extend([
            ("theta0", sig6(theta0)),
            ("n_bias_mele", sig6(report.n_bias_mele)),
            ("n_bias_pmele", sig6(report.n_bias_pmele)),
            ("bias_mele", sig6(report.bias_mele(n))),
            ("bias_pmele", sig6(report.bias_pmele(n))),
        ]);
    }
    let mut prov = format!("elprior estimate data={} kind={spec} prior={source}", data.display());
    if let Some(d) = dist {
        prov.push_str(&format!(" dist={d}"));
    }
    Ok(render(&prov, &[key_value_block(rows)], o.format.unwrap_or_default()))
}

fn table_header(reference: &str) -> Vec<&str> {
    let mut h = vec!["n", reference];
    h.extend(TABLE_COLUMNS);
    h
}

pub fn cmd_simulate(config: &Path, o: &Overrides) -> Result<String> {
    let file = ConfigFile::load(config)?;
    let (run, scenarios) = config::simulation_plan(&file, o)?;
    let mut blocks = Vec::with_capacity(scenarios.len());
    for sc in &scenarios {
        let title = format!(
            "scenario={} kind={} dist={} prior={} theta0={}",
            sc.label,
            sc.spec,
            sc.dist,
            sc.prior_source,
            sig6(sc.theta0)
        );
        let mut block = Block::new(Some(title), &table_header("theta0"));
        for r in run_table(sc)? {
            block.push(vec![
                r.n.to_string(),
                sig6(r.theta0),
                sig6(r.mean_mele),
                sig6(r.mean_pmele),
                sig6(r.n_bias_mele),
                sig6(r.n_bias_pmele),
                sig6(r.mse_mele),
                sig6(r.mse_pmele),
                sig6(r.mc_se_mele),
                r.replication_failures.to_string(),
            ]);
        }
        blocks.push(block);
    }
    let prov = format!(
        "elprior simulate config={} seed={} reps={} overrides: {}",
        config.display(),
        run.seed,
        run.reps,
        o.describe()
    );
    Ok(render(&prov, &blocks, run.format))
}

pub fn cmd_bootstrap(config: &Path, data: Option<&Path>, o: &Overrides) -> Result<String> {
    let file = ConfigFile::load(config)?;
    let dir = config.parent().unwrap_or(Path::new("."));
    let (run, groups) = config::bootstrap_plan(&file, dir, data, o)?;
    let mut blocks = Vec::with_capacity(groups.len());
    for g in &groups {
        let study = run_study(g, &run.n_list, run.reps, run.seed, &run.el)?;
        let title = format!("group={} size={} kind=cubic", g.label, g.len());
        let mut block = Block::new(Some(title), &table_header("theta_ref"));
        for r in &study.rows {
            let nf = r.n as f64;
            block.push(vec![
                r.n.to_string(),
                sig6(r.theta_ref),
                sig6(r.mean_mele),
                sig6(r.mean_pmele),
                sig6(nf * r.mean_bias_mele),
                sig6(nf * r.mean_bias_pmele),
                sig6(r.mse_mele),
                sig6(r.mse_pmele),
                sig6(r.mc_se_mele),
                r.failures.to_string(),
            ]);
        }
        blocks.push(block);
    }
    let mut prov = format!(
        "elprior bootstrap config={} seed={} reps={} overrides: {}",
        config.display(),
        run.seed,
        run.reps,
        o.describe()
    );
    if let Some(d) = data {
        prov.push_str(&format!(" data={}", d.display()));
    }
    Ok(render(&prov, &blocks, run.format))
}
