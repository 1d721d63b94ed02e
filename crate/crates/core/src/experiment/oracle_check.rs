//! Randomized verification against the exact oracle.

use rand::Rng;

use crate::diffusion::{EstimatorConfig, DEFAULT_ENUMERATION_CAP};
use crate::election::{
    exact_strategy_movs, margin_of_victory, update_preferences_with, CampaignSpec, ExactOracle, Mode, Model, UpdateRule,
};
use crate::error::Result;
use crate::graph::{NodeId, PreferenceProfile, TOLERANCE};
use crate::instances::{random_dks_gadget, random_instance, InstanceShape};
use crate::rng;
use crate::selection::{brute_force_with, exact_objective, greedy_score, Objective};

/// Live-edge graph budget of the random gadgets.
pub const GADGET_WORLDS: u64 = 1 << 14;

/// `(1/6)(1 − 1/e)`.
pub fn constructive_ratio_bound() -> f64 {
    (1.0 - (-1.0f64).exp()) / 6.0
}

/// `(1/4)(1 − 1/e)`.
pub fn destructive_ratio_bound() -> f64 {
    (1.0 - (-1.0f64).exp()) / 4.0
}

/// `(1/2)(1 − 1/e)`, the bound on the target's score gain.
pub fn score_gain_ratio_bound() -> f64 {
    (1.0 - (-1.0f64).exp()) / 2.0
}

/// Deliberate defect used to confirm that the check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    SkipNormalization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCheckConfig {
    pub instances: usize,
    pub gadgets: usize,
    pub max_nodes: usize,
    pub max_budget: usize,
    pub seed: u64,
    /// Live-edge samples behind each greedy selection.
    pub selection_samples: usize,
    pub fault: Option<Fault>,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        OracleCheckConfig {
            instances: 100,
            gadgets: 50,
            max_nodes: 8,
            max_budget: 2,
            seed: 0,
            selection_samples: 2_000,
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    /// Seed that regenerates the offending instance.
    pub instance_seed: u64,
    pub property: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub instances: usize,
    pub checks: usize,
    pub violations: Vec<Violation>,
    /// Smallest observed greedy / optimum MoV ratio per mode (1 when the
    /// optimum is 0).
    pub worst_constructive_ratio: f64,
    pub worst_destructive_ratio: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Distinct violated properties in first-seen order.
    pub fn violated_properties(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for v in &self.violations {
            if !out.contains(&v.property) {
                out.push(v.property);
            }
        }
        out
    }
}

struct Recorder {
    seed: u64,
    checks: usize,
    violations: Vec<Violation>,
}

impl Recorder {
    fn check(&mut self, property: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations.push(Violation {
                instance_seed: self.seed,
                property,
                detail: detail(),
            });
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * (1.0 + a.abs().max(b.abs()))
}

fn random_seeds(rng: &mut impl Rng, n: usize, max: usize) -> Vec<NodeId> {
    let k = rng.random_range(1..=max.min(n));
    let mut seeds: Vec<NodeId> = rand::seq::index::sample(rng, n, k).into_vec();
    seeds.sort_unstable();
    seeds
}

pub fn run_oracle_check(config: &OracleCheckConfig) -> Result<OracleReport> {
    let rule = match config.fault {
        Some(Fault::SkipNormalization) => UpdateRule::SkipNormalization,
        None => UpdateRule::Normalized,
    };
    let shape = InstanceShape::default().with_nodes(2, config.max_nodes.max(2));
    let mut report = OracleReport {
        worst_constructive_ratio: 1.0,
        worst_destructive_ratio: 1.0,
        ..Default::default()
    };
    for i in 0..config.instances {
        let seed = rng::derive_seed(config.seed, i as u64);
        let mut rec = Recorder {
            seed,
            checks: 0,
            violations: Vec::new(),
        };
        let (c_ratio, d_ratio) = check_instance(seed, &shape, config, rule, &mut rec)?;
        report.worst_constructive_ratio = report.worst_constructive_ratio.min(c_ratio);
        report.worst_destructive_ratio = report.worst_destructive_ratio.min(d_ratio);
        report.instances += 1;
        report.checks += rec.checks;
        report.violations.extend(rec.violations);
    }
    for i in 0..config.gadgets {
        let seed = rng::derive_seed(config.seed ^ 0x9e37_79b9_7f4a_7c15, i as u64);
        let mut rec = Recorder {
            seed,
            checks: 0,
            violations: Vec::new(),
        };
        check_gadget(seed, config, rule, &mut rec)?;
        report.instances += 1;
        report.checks += rec.checks;
        report.violations.extend(rec.violations);
    }
    Ok(report)
}

fn check_instance(
    seed: u64,
    shape: &InstanceShape,
    config: &OracleCheckConfig,
    rule: UpdateRule,
    rec: &mut Recorder,
) -> Result<(f64, f64)> {
    let inst = random_instance(seed, shape);
    let (graph, profile) = (&inst.graph, &inst.profile);
    let n = graph.node_count();
    let m = profile.candidates();
    let oracle = ExactOracle::new(graph, DEFAULT_ENUMERATION_CAP)?;
    let mut rng = rng::stream(seed, 7);
    let seeds = random_seeds(&mut rng, n, 3);
    let target = rng.random_range(0..m);

    for mode in [Mode::Constructive, Mode::Destructive] {
        for model in Model::ALL {
            let campaign = CampaignSpec::new(target, model, mode);
            for (_, activation) in oracle.activations(&seeds) {
                let updated = update_preferences_with(profile, &activation, &campaign, rule)?;
                check_update(profile, &updated, &activation, &campaign, rec);
            }
            let exact = oracle.scores_with(profile, &seeds, &campaign, rule)?;
            let total: f64 = exact.scores.iter().sum();
            rec.check("score conservation", close(total, n as f64), || {
                format!("{model} {mode}: scores sum to {total}, expected {n}")
            });
            let mov = margin_of_victory(&exact, &campaign)?;
            let before_gap = exact.before[mov.before_opponent] - exact.before[target];
            let after_gap = exact.scores[mov.after_opponent] - exact.scores[target];
            let expected = match mode {
                Mode::Constructive => {
                    mov.gain + mov.loss + exact.before[mov.before_opponent] - exact.before[mov.after_opponent]
                }
                Mode::Destructive => after_gap - before_gap,
            };
            rec.check("margin of victory decomposition", close(mov.mov, expected), || {
                format!("{model} {mode}: MoV {} but gains give {expected}", mov.mov)
            });
            // with three or more candidates the destructive update can also
            // take mass from the strongest opponent, so only constructive is signed
            let signed = mode == Mode::Destructive || mov.mov >= -TOLERANCE;
            rec.check("margin of victory sign", signed, || {
                format!("{model} {mode}: MoV {} is negative", mov.mov)
            });
        }
        let pltr = oracle.scores_with(profile, &seeds, &CampaignSpec::new(target, Model::Pltr, mode), rule)?;
        let relaxed = oracle.scores_with(profile, &seeds, &CampaignSpec::new(target, Model::RPltr, mode), rule)?;
        let (p, r) = (pltr.scores[target], relaxed.scores[target]);
        let ok = match mode {
            Mode::Constructive => r >= p - TOLERANCE,
            Mode::Destructive => r <= p + TOLERANCE,
        };
        rec.check("relaxed model dominance", ok, || {
            format!("{mode}: target score {p} under pltr, {r} under r-pltr")
        });
    }

    for model in Model::ALL {
        let s = exact_strategy_movs(&oracle, profile, &seeds, target, model)?;
        rec.check("strategy dominance", s.mov1 >= s.mov2 - TOLERANCE, || {
            format!("{model}: MoV1 {} < MoV2 {}", s.mov1, s.mov2)
        });
        for &(x, v) in &s.mov3 {
            rec.check("strategy dominance", s.mov1 >= v - TOLERANCE, || {
                format!("{model}: MoV1 {} < MoV3 {v} supporting {x}", s.mov1)
            });
        }
    }

    let budget = rng.random_range(1..=config.max_budget.min(n));
    let selection = EstimatorConfig::new(config.selection_samples, rng::derive_seed(seed, 11));
    let mut ratios = [1.0, 1.0];
    for (slot, (mode, bound)) in [
        (Mode::Constructive, constructive_ratio_bound()),
        (Mode::Destructive, destructive_ratio_bound()),
    ]
    .into_iter()
    .enumerate()
    {
        let campaign = CampaignSpec::new(target, Model::RPltr, mode);
        let greedy = greedy_score(graph, profile, &campaign, budget, &selection)?;
        let achieved = exact_objective(&oracle, profile, &campaign, &greedy.seeds, Objective::Mov)?;
        let best = brute_force_with(&oracle, profile, &campaign, budget, Objective::Mov)?;
        if best.value > 0.0 {
            ratios[slot] = achieved / best.value;
        }
        let property = match mode {
            Mode::Constructive => "constructive approximation ratio",
            Mode::Destructive => "destructive approximation ratio",
        };
        rec.check(property, achieved >= bound * best.value - TOLERANCE, || {
            format!(
                "{mode}, budget {budget}: greedy {:?} MoV {achieved}, optimum {:?} MoV {}",
                greedy.seeds, best.seeds, best.value
            )
        });
        if mode == Mode::Constructive {
            let gain = exact_objective(&oracle, profile, &campaign, &greedy.seeds, Objective::ScoreGain)?;
            let best_gain = brute_force_with(&oracle, profile, &campaign, budget, Objective::ScoreGain)?;
            rec.check(
                "score gain ratio",
                gain >= score_gain_ratio_bound() * best_gain.value - TOLERANCE,
                || format!("budget {budget}: greedy gain {gain}, optimum {}", best_gain.value),
            );
        }
    }
    Ok((ratios[0], ratios[1]))
}

fn check_update(
    before: &PreferenceProfile,
    after: &PreferenceProfile,
    activation: &crate::diffusion::ActivationResult,
    campaign: &CampaignSpec,
    rec: &mut Recorder,
) {
    for v in 0..before.node_count() {
        let row = after.row(v);
        let sum: f64 = row.iter().sum();
        let in_range = row.iter().all(|&p| (-TOLERANCE..=1.0 + TOLERANCE).contains(&p));
        rec.check("normalization", close(sum, 1.0) && in_range, || {
            format!("{} {}: voter {v} row {row:?}", campaign.model, campaign.mode)
        });
        if campaign.model == Model::Pltr && !activation.is_active(v) {
            rec.check("locality", row == before.row(v), || {
                format!("inactive voter {v} changed from {:?} to {row:?}", before.row(v))
            });
        }
        let (old, new) = (before.prob(v, campaign.target), row[campaign.target]);
        let ok = match campaign.mode {
            Mode::Constructive => new >= old - TOLERANCE,
            Mode::Destructive => new <= old + TOLERANCE,
        };
        rec.check("monotone shift", ok, || {
            format!(
                "{} {}: voter {v} target probability {old} -> {new}",
                campaign.model, campaign.mode
            )
        });
    }
}

fn check_gadget(seed: u64, config: &OracleCheckConfig, rule: UpdateRule, rec: &mut Recorder) -> Result<()> {
    let m = 2 + (seed % 2) as usize;
    let gadget = random_dks_gadget(seed, 3, config.max_nodes.max(3), 4, m, GADGET_WORLDS);
    let n = gadget.graph.node_count();
    let oracle = ExactOracle::new(&gadget.graph, DEFAULT_ENUMERATION_CAP)?;
    let mut sets: Vec<Vec<NodeId>> = vec![Vec::new()];
    sets.extend((0..n).map(|u| vec![u]));
    sets.extend((0..n).flat_map(|u| (u + 1..n).map(move |v| vec![u, v])));
    for model in Model::ALL {
        let campaign = CampaignSpec::new(gadget.target, model, Mode::Constructive);
        for seeds in &sets {
            let report = oracle.scores_with(&gadget.profile, seeds, &campaign, rule)?;
            let mov = margin_of_victory(&report, &campaign)?.mov;
            let gain = 2.0 * report.gain(gadget.target);
            rec.check("gadget identity", (mov - gain).abs() <= TOLERANCE, || {
                format!("{model}, seeds {seeds:?}: MoV {mov}, twice the score gain {gain}")
            });
        }
    }
    Ok(())
}
