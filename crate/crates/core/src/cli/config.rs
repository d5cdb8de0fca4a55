//! Run configuration files.
//!
//! Configs are TOML: a `[run]` section, an optional `[el]` section, and one
//! `[[scenario]]` (simulate) or `[[group]]` (bootstrap) section per table block.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bootstrap::GroupData;
use crate::distribution::Distribution;
use crate::el::ElConfig;
use crate::error::{ElError, Result};
use crate::estimating_function::EstimatingFunction;
use crate::mc::{ScenarioSpec, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub n: Option<Vec<usize>>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub label: String,
    pub kind: String,
    pub dist: String,
    #[serde(default)]
    pub prior: Option<String>,
    #[serde(default)]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub theta0: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub label: String,
    /// Path to a one-value-per-line file, relative to the config file.
    #[serde(default)]
    pub data: Option<PathBuf>,
    /// Distribution for a generated group, e.g. `lognormal:2.9,0.3`.
    #[serde(default)]
    pub synthetic: Option<String>,
    #[serde(default)]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub el: ElConfig,
    #[serde(default)]
    pub scenario: Vec<ScenarioSection>,
    #[serde(default)]
    pub group: Vec<GroupSection>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| ElError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::parse(&text).map_err(|e| match e {
            ElError::Config(m) => ElError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ElError::Config(e.to_string()))
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub format: Option<OutputFormat>,
}

impl Overrides {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = self.seed {
            parts.push(format!("seed={s}"));
        }
        if let Some(r) = self.reps {
            parts.push(format!("reps={r}"));
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Fully validated run settings shared by simulate and bootstrap.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub reps: usize,
    pub n_list: Vec<usize>,
    pub format: OutputFormat,
    pub el: ElConfig,
}

impl RunConfig {
    fn resolve(file: &ConfigFile, overrides: &Overrides, default_n: &[usize]) -> Result<Self> {
        let reps = overrides.reps.or(file.run.reps).unwrap_or(10_000);
        if reps == 0 {
            return Err(ElError::Config("reps must be positive".into()));
        }
        let n_list = file.run.n.clone().unwrap_or_else(|| default_n.to_vec());
        check_sizes(&n_list)?;
        file.el.validate().map_err(|e| ElError::Config(e.to_string()))?;
        Ok(Self {
            seed: overrides.seed.or(file.run.seed).unwrap_or(DEFAULT_SEED),
            reps,
            n_list,
            format: overrides.format.or(file.run.format).unwrap_or_default(),
            el: file.el,
        })
    }
}

fn check_sizes(n_list: &[usize]) -> Result<()> {
    if let Some(n) = n_list.iter().find(|&&n| n < 2) {
        return Err(ElError::Config(format!("sample size {n} is below 2")));
    }
    Ok(())
}

fn config_err(label: &str) -> impl Fn(ElError) -> ElError + '_ {
    move |e| ElError::Config(format!("scenario '{label}': {e}"))
}

pub fn simulation_plan(file: &ConfigFile, overrides: &Overrides) -> Result<(RunConfig, Vec<ScenarioSpec>)> {
    let run = RunConfig::resolve(file, overrides, &[15, 25, 50, 75, 100, 150])?;
    if file.scenario.is_empty() {
        return Err(ElError::Config("no [[scenario]] sections".into()));
    }
    let scenarios = file
        .scenario
        .iter()
        .map(|s| {
            let err = config_err(&s.label);
            let kind: EstimatingFunction = s.kind.parse().map_err(&err)?;
            let dist: Distribution = s.dist.parse().map_err(&err)?;
            let mut spec = ScenarioSpec::new(s.label.clone(), kind, dist).map_err(&err)?;
            if let Some(t) = s.theta0 {
                spec.theta0 = t;
            }
            if let Some(p) = &s.prior {
                spec.prior_source = p.parse().map_err(&err)?;
            }
            spec.n_list = s.n.clone().unwrap_or_else(|| run.n_list.clone());
            check_sizes(&spec.n_list).map_err(&err)?;
            spec.reps = run.reps;
            spec.seed = run.seed;
            spec.el_config = run.el;
            spec.validate().map_err(&err)?;
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((run, scenarios))
}

pub fn bootstrap_plan(
    file: &ConfigFile,
    config_dir: &Path,
    data: Option<&Path>,
    overrides: &Overrides,
) -> Result<(RunConfig, Vec<GroupData>)> {
    let run = RunConfig::resolve(file, overrides, &[25, 50, 75, 100])?;
    let groups = if let Some(path) = data {
        vec![crate::bootstrap::ingest_csv(path)?]
    } else {
        if file.group.is_empty() {
            return Err(ElError::Config("no [[group]] sections and no --data file".into()));
        }
        file.group
            .iter()
            .map(|g| match (&g.data, &g.synthetic) {
                (Some(p), None) => {
                    let mut d = crate::bootstrap::ingest_csv(config_dir.join(p))?;
                    d.label = g.label.clone();
                    Ok(d)
                }
                (None, Some(s)) => {
                    let dist: Distribution = s.parse().map_err(config_err(&g.label))?;
                    let size = g.size.ok_or_else(|| ElError::Config(format!("group '{}': size is required", g.label)))?;
                    GroupData::synthetic(g.label.clone(), &dist, size, run.seed)
                }
                _ => Err(ElError::Config(format!("group '{}': give exactly one of data or synthetic", g.label))),
            })
            .collect::<Result<Vec<_>>>()?
    };
    for g in &groups {
        if let Some(&n) = run.n_list.iter().find(|&&n| n >= g.len()) {
            return Err(ElError::Config(format!(
                "group '{}' has {} values; subsample size {n} leaves nothing held out",
                g.label,
                g.len()
            )));
        }
    }
    Ok((run, groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::PriorSource;

    const SIM: &str = r#"
[run]
seed = 7
reps = 100
n = [15, 25]

[[scenario]]
label = "exp1"
kind = "second-moment-ratio"
dist = "exp:1"

[[scenario]]
label = "n01"
kind = "exp-scale:0"
dist = "normal:0,1"
prior = "sample"
n = [50]
"#;

    #[test]
    fn parses_simulation_config() {
        let f = ConfigFile::parse(SIM).unwrap();
        let (run, sc) = simulation_plan(&f, &Overrides::default()).unwrap();
        assert_eq!(run.seed, 7);
        assert_eq!(sc.len(), 2);
        assert_eq!(sc[0].label, "exp1");
        assert_eq!(sc[0].n_list, vec![15, 25]);
        assert_eq!(sc[1].n_list, vec![50]);
        assert_eq!(sc[1].prior_source, PriorSource::SampleMoments);
        assert!((sc[1].theta0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overrides_take_precedence() {
        let f = ConfigFile::parse(SIM).unwrap();
        let o = Overrides { seed: Some(3), reps: Some(5), format: Some(OutputFormat::Markdown) };
        let (run, sc) = simulation_plan(&f, &o).unwrap();
        assert_eq!((run.seed, run.reps, run.format), (3, 5, OutputFormat::Markdown));
        assert_eq!(sc[0].reps, 5);
        assert_eq!(o.describe(), "seed=3 reps=5");
    }

    #[test]
    fn rejects_bad_configs() {
        let f = ConfigFile::parse(SIM).unwrap();
        assert!(simulation_plan(&f, &Overrides { reps: Some(0), ..Default::default() }).is_err());
        assert!(ConfigFile::parse("[run]\nreps = \"many\"").is_err());
        assert!(ConfigFile::parse("[run]\nbogus = 1").is_err());
        let bad_dist = SIM.replace("exp:1", "exp:-1");
        assert!(simulation_plan(&ConfigFile::parse(&bad_dist).unwrap(), &Overrides::default()).is_err());
        let bad_el = format!("{SIM}\n[el]\nc0 = 0.0\n");
        assert!(simulation_plan(&ConfigFile::parse(&bad_el).unwrap(), &Overrides::default()).is_err());
    }

    #[test]
    fn bootstrap_groups() {
        let text = r#"
[run]
n = [25]
[[group]]
label = "control"
synthetic = "lognormal:2.9,0.3"
size = 400
"#;
        let f = ConfigFile::parse(text).unwrap();
        let (_, groups) = bootstrap_plan(&f, Path::new("."), None, &Overrides::default()).unwrap();
        assert_eq!(groups[0].len(), 400);
        let small = text.replace("400", "20");
        assert!(bootstrap_plan(&ConfigFile::parse(&small).unwrap(), Path::new("."), None, &Overrides::default()).is_err());
    }
}
