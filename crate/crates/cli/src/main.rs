use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use electoengine::experiment::{run_experiment, run_oracle_check, ExperimentConfig, Fault, OracleCheckConfig, Targets};
use electoengine::graph::{read_fixture, Fixture};
use electoengine::{
    assign_random_weights, exact_expected_scores, expected_scores, greedy_im, greedy_score, init_preferences,
    load_edge_list, load_labels, margin_of_victory, CampaignSpec, Error, EstimatorConfig, Mode, Model, NodeId,
    PreferenceProfile, SocialGraph,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "electoengine", version, about = "Election control through social influence")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load an edge list and labels, draw random weights, write a fixture.
    Ingest(IngestArgs),
    /// Pick seeds for a campaign with GreedyScore or GreedyIM.
    Select(SelectArgs),
    /// Expected scores and margin of victory of a seed set.
    Evaluate(EvaluateArgs),
    /// Run the experiment grid described by a config file.
    Experiment(ExperimentArgs),
    /// Check every invariant against the exact oracle on random instances.
    OracleCheck(OracleCheckArgs),
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    edges: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    directed: bool,
    /// Seed for the random edge weights.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixture output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write `<index> <identifier> <label>` per node.
    #[arg(long)]
    nodes: Option<PathBuf>,
}

#[derive(Args)]
struct CampaignArgs {
    /// Fixture written by `ingest`.
    #[arg(long)]
    fixture: PathBuf,
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[arg(long, default_value = "r-pltr")]
    model: Model,
    #[arg(long, default_value = "constructive")]
    mode: Mode,
    #[arg(long, default_value_t = electoengine::diffusion::DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    GreedyScore,
    GreedyIm,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    #[arg(long)]
    budget: usize,
    #[arg(long, value_enum, default_value = "greedy-score")]
    selector: SelectorArg,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Comma-separated node indices.
    #[arg(long, value_delimiter = ',')]
    seeds: Vec<NodeId>,
    /// Enumerate every live-edge graph instead of sampling.
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    budget: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    model: Option<Vec<Model>>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, value_delimiter = ',')]
    target: Option<Vec<String>>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output; overrides the config, stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    SkipNormalization,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 50)]
    gadgets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    budget: usize,
    #[arg(long, default_value_t = 2_000)]
    samples: usize,
    /// Run with a deliberate defect; the check must then fail.
    #[arg(long, value_enum)]
    inject_fault: Option<FaultArg>,
}

enum Failure {
    Data(Error),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::Select(args) => select(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Experiment(args) => experiment(args),
        Command::OracleCheck(args) => oracle_check(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Violation(report)) => {
            eprint!("{report}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            Failure::Data(Error::Io {
                path: p.clone(),
                source: e,
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ingest(args: IngestArgs) -> Result<(), Failure> {
    let skeleton = load_edge_list(&args.edges, args.directed)?;
    let labeling = load_labels(&args.labels, &skeleton)?;
    let graph = assign_random_weights(&skeleton, args.seed);
    let profile = init_preferences(&graph, &labeling);
    eprintln!(
        "{} nodes, {} directed edges, {} candidates ({})",
        graph.node_count(),
        graph.edge_count(),
        profile.candidates(),
        labeling.categories().join(", ")
    );
    let zeros = profile.zero_entries();
    if zeros > 0 {
        eprintln!("warning: {zeros} preference entries are exactly zero");
    }
    if let Some(path) = &args.nodes {
        let mut text = String::new();
        for v in 0..graph.node_count() {
            let _ = writeln!(
                text,
                "{v} {} {}",
                graph.node_name(v),
                labeling.categories()[labeling.label(v)]
            );
        }
        write_output(Some(path), &text)?;
    }
    let fixture = Fixture {
        graph,
        profile: Some(profile),
    };
    write_output(args.out.as_ref(), &fixture.render())
}

fn load_campaign(args: &CampaignArgs) -> Result<(SocialGraph, PreferenceProfile, CampaignSpec), Failure> {
    let fixture = read_fixture(&args.fixture)?;
    let profile = fixture
        .profile
        .ok_or_else(|| Error::InvalidProfile(format!("{} has no preference profile", args.fixture.display())))?;
    let campaign = CampaignSpec::new(args.target, args.model, args.mode);
    campaign.validate(profile.candidates())?;
    Ok((fixture.graph, profile, campaign))
}

fn select(args: SelectArgs) -> Result<(), Failure> {
    let (graph, profile, campaign) = load_campaign(&args.campaign)?;
    let config = EstimatorConfig::new(args.campaign.samples, args.campaign.seed);
    let result = match args.selector {
        SelectorArg::GreedyScore => greedy_score(&graph, &profile, &campaign, args.budget, &config)?,
        SelectorArg::GreedyIm => greedy_im(&graph, args.budget, &config)?,
    };
    let mut text = String::from("round,node,gain\n");
    for (i, (v, g)) in result.seeds.iter().zip(&result.gains).enumerate() {
        let _ = writeln!(text, "{},{v},{g}", i + 1);
    }
    eprintln!("{} marginal-gain evaluations", result.evaluations);
    write_output(None, &text)
}

fn evaluate(args: EvaluateArgs) -> Result<(), Failure> {
    let (graph, profile, campaign) = load_campaign(&args.campaign)?;
    let report = if args.exact {
        exact_expected_scores(&graph, &profile, &args.seeds, &campaign)?
    } else {
        let config = EstimatorConfig::new(args.campaign.samples, args.campaign.seed);
        expected_scores(&graph, &profile, &args.seeds, &campaign, &config)?
    };
    let mut text = String::from("candidate,before,score_mean,score_stderr\n");
    for c in 0..report.candidates() {
        let _ = writeln!(
            text,
            "{c},{},{},{}",
            report.before[c], report.scores[c], report.stderr[c]
        );
    }
    if report.candidates() >= 2 {
        let mov = margin_of_victory(&report, &campaign)?;
        let _ = writeln!(text, "mov,{},{}", mov.mov, mov.stderr);
    }
    write_output(None, &text)
}

fn experiment(args: ExperimentArgs) -> Result<(), Failure> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    if let Some(t) = args.trials {
        config.trials = t;
    }
    if let Some(s) = args.samples {
        config.samples = s;
        config.selection_samples = s;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if let Some(b) = args.budget {
        config.budgets = b;
    }
    if let Some(m) = args.model {
        config.models = m;
    }
    if let Some(m) = args.mode {
        config.mode = m;
    }
    if let Some(t) = args.target {
        config.targets = if t.len() == 1 && t[0] == "all" {
            Targets::All
        } else {
            Targets::List(t)
        };
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
    }
    if let Some(out) = args.out {
        config.out = Some(out);
    }
    config.normalize()?;
    let table = run_experiment(&config)?;
    match &config.out {
        Some(path) => {
            table.write(path, &config)?;
            eprintln!("{} rows written to {}", table.rows.len(), path.display());
            Ok(())
        }
        None => write_output(None, &table.to_csv()),
    }
}

fn oracle_check(args: OracleCheckArgs) -> Result<(), Failure> {
    let config = OracleCheckConfig {
        instances: args.instances,
        gadgets: args.gadgets,
        seed: args.seed,
        max_budget: args.budget,
        selection_samples: args.samples,
        fault: args
            .inject_fault
            .map(|FaultArg::SkipNormalization| Fault::SkipNormalization),
        ..Default::default()
    };
    let report = run_oracle_check(&config)?;
    println!(
        "{} instances, {} checks, {} violations; worst MoV ratio constructive {:.4}, destructive {:.4}",
        report.instances,
        report.checks,
        report.violations.len(),
        report.worst_constructive_ratio,
        report.worst_destructive_ratio
    );
    if report.passed() {
        return Ok(());
    }
    let mut text = String::new();
    for property in report.violated_properties() {
        let count = report.violations.iter().filter(|v| v.property == property).count();
        let first = report
            .violations
            .iter()
            .find(|v| v.property == property)
            .expect("present");
        let _ = writeln!(
            text,
            "violated: {property} ({count}x), first on instance seed {}: {}",
            first.instance_seed, first.detail
        );
    }
    Err(Failure::Violation(text))
}
