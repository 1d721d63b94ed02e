//! The experiment grid: random weights per trial, seeds from GreedyScore and
//! GreedyIM, evaluation of scores and margin of victory under every model.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use super::config::{DatasetSpec, ExperimentConfig, Targets};
use crate::diffusion::EstimatorConfig;
use crate::election::{expected_scores, margin_of_victory, CampaignSpec, Mode, Model};
use crate::error::{Error, Result};
use crate::graph::{
    assign_random_weights, init_preferences, load_edge_list, load_labels, CandidateId, NodeLabeling, PreferenceProfile,
    SocialGraph,
};
use crate::rng::derive_seed;
use crate::selection::{greedy_im, greedy_score, SelectionResult};

pub const CSV_HEADER: &str = "trial,dataset,selector,model,mode,target,budget,candidate,\
score_mean,score_stderr,mov_mean,mov_stderr,samples,wall_ms";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Selector {
    GreedyScore,
    GreedyIm,
}

impl Selector {
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::GreedyScore => "greedy_score",
            Selector::GreedyIm => "greedy_im",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub trial: usize,
    pub dataset: String,
    pub selector: Selector,
    pub model: Model,
    pub mode: Mode,
    pub target: String,
    pub budget: usize,
    pub candidate: String,
    pub score_mean: f64,
    pub score_stderr: f64,
    /// Margin of victory of the row's target (repeated on every candidate row).
    pub mov_mean: f64,
    pub mov_stderr: f64,
    pub samples: usize,
    pub wall_ms: u64,
}

/// A loaded dataset: unweighted graph, labels and the initial preferences.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub graph: SocialGraph,
    pub labeling: NodeLabeling,
    pub profile: PreferenceProfile,
}

impl Dataset {
    pub fn load(spec: &DatasetSpec) -> Result<Self> {
        let graph = load_edge_list(&spec.edges, spec.directed)?;
        let labeling = load_labels(&spec.labels, &graph)?;
        Ok(Self::new(&spec.name, graph, labeling))
    }

    pub fn new(name: &str, graph: SocialGraph, labeling: NodeLabeling) -> Self {
        let profile = init_preferences(&graph, &labeling);
        Dataset {
            name: name.to_string(),
            graph,
            labeling,
            profile,
        }
    }

    pub fn candidate_name(&self, c: CandidateId) -> &str {
        self.labeling.categories().get(c).map_or("?", String::as_str)
    }

    fn resolve_targets(&self, targets: &Targets) -> Result<Vec<CandidateId>> {
        let m = self.profile.candidates();
        match targets {
            Targets::All => Ok((0..m).collect()),
            Targets::List(names) => names
                .iter()
                .map(|name| {
                    self.labeling
                        .candidate(name)
                        .or_else(|| name.parse().ok().filter(|&c: &usize| c < m))
                        .ok_or_else(|| Error::Config(format!("dataset {:?} has no candidate {name:?}", self.name)))
                })
                .collect(),
        }
    }
}

/// Seeds and evaluation streams of one trial on one dataset.
pub fn trial_seed(master: u64, dataset_index: usize, trial: usize) -> u64 {
    derive_seed(derive_seed(master, dataset_index as u64), trial as u64)
}

const WEIGHTS: u64 = 0;
const SELECTION: u64 = 1;
const EVALUATION: u64 = 2;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<ResultRow>,
}

impl ExperimentTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(128 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.trial,
                r.dataset,
                r.selector.as_str(),
                r.model,
                r.mode,
                r.target,
                r.budget,
                r.candidate,
                r.score_mean,
                r.score_stderr,
                r.mov_mean,
                r.mov_stderr,
                r.samples,
                r.wall_ms
            )
            .expect("writing to a String");
        }
        out
    }

    /// Writes the CSV and a `.meta` sidecar describing the run.
    pub fn write(&self, path: &Path, config: &ExperimentConfig) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))?;
        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".meta");
        let meta_path = Path::new(&meta_path);
        std::fs::write(meta_path, metadata(config)).map_err(|e| Error::io(meta_path, e))
    }
}

pub fn metadata(config: &ExperimentConfig) -> String {
    let list = |v: Vec<String>| v.join(",");
    let mut out = String::new();
    let _ = writeln!(out, "seed = {}", config.seed);
    let _ = writeln!(out, "trials = {}", config.trials);
    let _ = writeln!(out, "samples = {}", config.samples);
    let _ = writeln!(out, "selection_samples = {}", config.selection_samples);
    let _ = writeln!(out, "greedy_im_samples = {}", config.selection_samples);
    let _ = writeln!(
        out,
        "budgets = {}",
        list(config.budgets.iter().map(|b| b.to_string()).collect())
    );
    let _ = writeln!(
        out,
        "models = {}",
        list(config.models.iter().map(|m| m.to_string()).collect())
    );
    let _ = writeln!(out, "mode = {}", config.mode);
    let _ = writeln!(out, "selection_model = r-pltr");
    let _ = writeln!(out, "tie_break = ascending node index");
    let _ = writeln!(
        out,
        "strategy_opponent = strongest opponent after the supporting-target run"
    );
    let _ = writeln!(
        out,
        "datasets = {}",
        list(config.datasets.iter().map(|d| d.name.clone()).collect())
    );
    out
}

/// Loads every dataset in the config and runs the grid.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentTable> {
    if config.datasets.is_empty() {
        return Err(Error::Config("no datasets configured".into()));
    }
    let datasets = config.datasets.iter().map(Dataset::load).collect::<Result<Vec<_>>>()?;
    run_on(&datasets, config)
}

/// Runs the grid on already loaded datasets, inside a dedicated thread pool
/// when `config.workers` is set. Output does not depend on the worker count.
pub fn run_on(datasets: &[Dataset], config: &ExperimentConfig) -> Result<ExperimentTable> {
    match config.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {workers} workers: {e}")))?
            .install(|| run_grid(datasets, config)),
        None => run_grid(datasets, config),
    }
}

fn run_grid(datasets: &[Dataset], config: &ExperimentConfig) -> Result<ExperimentTable> {
    let mut rows = Vec::new();
    for (d, dataset) in datasets.iter().enumerate() {
        let targets = dataset.resolve_targets(&config.targets)?;
        if config.max_budget() > dataset.graph.node_count() {
            return Err(Error::BudgetTooLarge {
                budget: config.max_budget(),
                nodes: dataset.graph.node_count(),
            });
        }
        // Trials run one after another; each already spreads its samples over
        // every worker, and concurrent trials would multiply the pool memory.
        for t in 0..config.trials {
            rows.extend(run_trial(dataset, &targets, config, t, trial_seed(config.seed, d, t))?);
        }
    }
    Ok(ExperimentTable { rows })
}

fn run_trial(
    dataset: &Dataset,
    targets: &[CandidateId],
    config: &ExperimentConfig,
    trial: usize,
    seed: u64,
) -> Result<Vec<ResultRow>> {
    let graph = assign_random_weights(&dataset.graph, derive_seed(seed, WEIGHTS));
    let profile = &dataset.profile;
    let selection = EstimatorConfig::new(config.selection_samples, derive_seed(seed, SELECTION));
    let evaluation = EstimatorConfig::new(config.samples, derive_seed(seed, EVALUATION));
    let budget = config.max_budget();

    let started = Instant::now();
    let im = greedy_im(&graph, budget, &selection)?;
    let im_ms = elapsed_ms(started, config.timing);

    let mut rows = Vec::new();
    for &target in targets {
        let started = Instant::now();
        let campaign = CampaignSpec::new(target, Model::RPltr, config.mode);
        let score = greedy_score(&graph, profile, &campaign, budget, &selection)?;
        let score_ms = elapsed_ms(started, config.timing);
        for &b in &config.budgets {
            for model in &config.models {
                for (selector, picked, ms) in [
                    (Selector::GreedyScore, &score, score_ms),
                    (Selector::GreedyIm, &im, im_ms),
                ] {
                    rows.extend(evaluate_rows(
                        dataset,
                        &graph,
                        target,
                        b,
                        *model,
                        selector,
                        picked,
                        ms,
                        config,
                        &evaluation,
                        trial,
                    )?);
                }
            }
        }
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_rows(
    dataset: &Dataset,
    graph: &SocialGraph,
    target: CandidateId,
    budget: usize,
    model: Model,
    selector: Selector,
    picked: &SelectionResult,
    selection_ms: u64,
    config: &ExperimentConfig,
    evaluation: &EstimatorConfig,
    trial: usize,
) -> Result<Vec<ResultRow>> {
    let started = Instant::now();
    let campaign = CampaignSpec::new(target, model, config.mode);
    let report = expected_scores(graph, &dataset.profile, picked.prefix(budget), &campaign, evaluation)?;
    let mov = margin_of_victory(&report, &campaign)?;
    let wall_ms = if config.timing {
        selection_ms + elapsed_ms(started, true)
    } else {
        0
    };
    Ok((0..report.candidates())
        .map(|c| ResultRow {
            trial,
            dataset: dataset.name.clone(),
            selector,
            model,
            mode: config.mode,
            target: dataset.candidate_name(target).to_string(),
            budget,
            candidate: dataset.candidate_name(c).to_string(),
            score_mean: report.scores[c],
            score_stderr: report.stderr[c],
            mov_mean: mov.mov,
            mov_stderr: mov.stderr,
            samples: report.sample_count(),
            wall_ms,
        })
        .collect())
}

fn elapsed_ms(started: Instant, timing: bool) -> u64 {
    if timing {
        started.elapsed().as_millis() as u64
    } else {
        0
    }
}
