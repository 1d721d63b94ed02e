//! `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! dataset.polbooks.edges = data/polbooks.edges
//! dataset.polbooks.labels = data/polbooks.labels
//! dataset.polbooks.directed = false
//! budgets = 0, 1, 5, 10
//! models = pltr, r-pltr
//! mode = constructive
//! targets = all
//! samples = 10000
//! trials = 20
//! seed = 1
//! out = results.csv
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::diffusion::DEFAULT_SAMPLES;
use crate::election::{Mode, Model};
use crate::error::{Error, Result};

pub const DEFAULT_BUDGETS: [usize; 4] = [0, 1, 5, 10];
pub const DEFAULT_TRIALS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetSpec {
    pub name: String,
    pub edges: PathBuf,
    pub labels: PathBuf,
    pub directed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    All,
    /// Label names or candidate indices.
    List(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetSpec>,
    /// Sorted, without duplicates.
    pub budgets: Vec<usize>,
    pub models: Vec<Model>,
    pub mode: Mode,
    pub targets: Targets,
    /// Monte Carlo samples for score evaluation.
    pub samples: usize,
    /// Live-edge samples in the greedy selection pool (GreedyScore and GreedyIM).
    pub selection_samples: usize,
    pub seed: u64,
    pub trials: usize,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    /// Record wall-clock times. Off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            datasets: Vec::new(),
            budgets: DEFAULT_BUDGETS.to_vec(),
            models: Model::ALL.to_vec(),
            mode: Mode::Constructive,
            targets: Targets::All,
            samples: DEFAULT_SAMPLES,
            selection_samples: DEFAULT_SAMPLES,
            seed: 0,
            trials: DEFAULT_TRIALS,
            workers: None,
            out: None,
            timing: false,
        }
    }
}

#[derive(Default)]
struct PartialDataset {
    edges: Option<PathBuf>,
    labels: Option<PathBuf>,
    directed: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let mut datasets: BTreeMap<String, PartialDataset> = BTreeMap::new();
        let mut order: Vec<String> = Vec::new();
        let mut selection_samples = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fail = |message: String| Error::Config(format!("line {}: {message}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(format!("expected `key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let resolve = |v: &str| {
                let p = Path::new(v);
                if p.is_absolute() {
                    p.to_path_buf()
                } else {
                    base.join(p)
                }
            };
            if let Some(rest) = key.strip_prefix("dataset.") {
                let (name, field) = rest
                    .rsplit_once('.')
                    .ok_or_else(|| fail(format!("unknown key {key:?}")))?;
                if name.is_empty() {
                    return Err(fail("empty dataset name".into()));
                }
                if !datasets.contains_key(name) {
                    order.push(name.to_string());
                }
                let entry = datasets.entry(name.to_string()).or_default();
                match field {
                    "edges" => entry.edges = Some(resolve(value)),
                    "labels" => entry.labels = Some(resolve(value)),
                    "directed" => entry.directed = Some(parse_value(value).map_err(fail)?),
                    _ => return Err(fail(format!("unknown key {key:?}"))),
                }
                continue;
            }
            match key {
                "budgets" => config.budgets = parse_list(value).map_err(fail)?,
                "models" => config.models = parse_list(value).map_err(fail)?,
                "mode" => config.mode = parse_value(value).map_err(fail)?,
                "targets" => {
                    config.targets = if value == "all" {
                        Targets::All
                    } else {
                        Targets::List(split_list(value).map(str::to_string).collect())
                    }
                }
                "samples" => config.samples = parse_value(value).map_err(fail)?,
                "selection_samples" => selection_samples = Some(parse_value(value).map_err(fail)?),
                "seed" => config.seed = parse_value(value).map_err(fail)?,
                "trials" => config.trials = parse_value(value).map_err(fail)?,
                "workers" => config.workers = Some(parse_value(value).map_err(fail)?),
                "out" => config.out = Some(resolve(value)),
                "timing" => config.timing = parse_value(value).map_err(fail)?,
                _ => return Err(fail(format!("unknown key {key:?}"))),
            }
        }
        config.selection_samples = selection_samples.unwrap_or(config.samples);
        for name in order {
            let entry = datasets.remove(&name).expect("recorded above");
            let missing = |field: &str| Error::Config(format!("dataset {name:?} has no {field} path"));
            config.datasets.push(DatasetSpec {
                edges: entry.edges.ok_or_else(|| missing("edges"))?,
                labels: entry.labels.ok_or_else(|| missing("labels"))?,
                directed: entry.directed.unwrap_or(false),
                name,
            });
        }
        config.normalize()?;
        Ok(config)
    }

    /// Sorts and deduplicates budgets and models and checks the counts.
    pub fn normalize(&mut self) -> Result<()> {
        self.budgets.sort_unstable();
        self.budgets.dedup();
        self.models.sort_by_key(|m| Model::ALL.iter().position(|x| x == m));
        self.models.dedup();
        if self.budgets.is_empty() {
            return Err(Error::Config("no budgets".into()));
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models".into()));
        }
        if self.samples == 0 || self.selection_samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if matches!(&self.targets, Targets::List(t) if t.is_empty()) {
            return Err(Error::Config("empty target list".into()));
        }
        Ok(())
    }

    pub fn max_budget(&self) -> usize {
        self.budgets.last().copied().unwrap_or(0)
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_value<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value.parse().map_err(|_| format!("invalid value {value:?}"))
}

fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String> {
    split_list(value).map(parse_value).collect()
}
