//! Seed selection.
//!
//! Both the constructive and the destructive problem reduce to weighted
//! influence maximization: each node gets a weight equal to the preference
//! change its activation can cause in its out-neighbors, and the greedy
//! hill-climber maximizes the expected weight of the reached set.
//!
//! The greedy runs on a fixed pool of live-edge samples (common random
//! numbers). On a fixed pool the objective is a weighted coverage function,
//! hence submodular, so stale marginal gains are upper bounds and the lazy
//! (CELF) queue picks exactly what a full re-evaluation would.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::diffusion::{sample_live_edge, EstimatorConfig, NodeWeights, DEFAULT_ENUMERATION_CAP};
use crate::election::{margin_of_victory, CampaignSpec, ExactOracle, Mode};
use crate::error::{Error, Result};
use crate::graph::{CandidateId, NodeId, PreferenceProfile, SocialGraph};
use crate::rng;

pub const BRUTE_FORCE_MAX_NODES: usize = 10;
pub const BRUTE_FORCE_MAX_BUDGET: usize = 3;

/// `w(v) = Σ_{u∈N_out(v)} b_vu (1 − π_u(c★))`.
pub fn constructive_weights(graph: &SocialGraph, profile: &PreferenceProfile, target: CandidateId) -> NodeWeights {
    out_weighted(graph, |u| 1.0 - profile.prob(u, target))
}

/// `w(v) = Σ_{u∈N_out(v)} b_vu π_u(c★)`.
pub fn destructive_weights(graph: &SocialGraph, profile: &PreferenceProfile, target: CandidateId) -> NodeWeights {
    out_weighted(graph, |u| profile.prob(u, target))
}

fn out_weighted(graph: &SocialGraph, value: impl Fn(NodeId) -> f64) -> NodeWeights {
    let weights = (0..graph.node_count())
        .map(|v| {
            graph
                .out_edges(v)
                .iter()
                .map(|&(u, b)| b * value(u))
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    NodeWeights::new(weights).expect("weights are finite and nonnegative")
}

fn campaign_weights(graph: &SocialGraph, profile: &PreferenceProfile, campaign: &CampaignSpec) -> NodeWeights {
    match campaign.mode {
        Mode::Constructive => constructive_weights(graph, profile, campaign.target),
        Mode::Destructive => destructive_weights(graph, profile, campaign.target),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelectionResult {
    /// Seeds in selection order.
    pub seeds: Vec<NodeId>,
    /// Estimated marginal gain of each seed when it was picked.
    pub gains: Vec<f64>,
    /// Number of marginal-gain evaluations.
    pub evaluations: usize,
}

impl SelectionResult {
    /// Estimated `σ_w` of the whole seed set on the selection pool.
    pub fn value(&self) -> f64 {
        self.gains.iter().sum()
    }

    /// The first `budget` seeds; greedy selections are nested.
    pub fn prefix(&self, budget: usize) -> &[NodeId] {
        &self.seeds[..budget.min(self.seeds.len())]
    }
}

/// Live-edge graph stored as `u32` child lists to keep large pools small.
struct PooledSample {
    offsets: Box<[u32]>,
    children: Box<[u32]>,
}

impl PooledSample {
    fn children(&self, v: usize) -> &[u32] {
        &self.children[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }
}

/// Fixed live-edge samples plus, per sample, the nodes already reached by the
/// current seed set. The reached set is closed under live-edge successors.
struct SamplePool<'w> {
    samples: Vec<PooledSample>,
    covered: Vec<Vec<bool>>,
    weights: &'w NodeWeights,
}

impl<'w> SamplePool<'w> {
    fn new(graph: &SocialGraph, weights: &'w NodeWeights, config: &EstimatorConfig) -> Self {
        let n = graph.node_count();
        let samples = (0..config.samples)
            .into_par_iter()
            .map(|i| {
                let live = sample_live_edge(graph, &mut rng::stream(config.seed, i as u64));
                let mut offsets = Vec::with_capacity(n + 1);
                let mut children = Vec::new();
                offsets.push(0u32);
                for v in 0..n {
                    children.extend(live.children(v).iter().map(|&c| c as u32));
                    offsets.push(children.len() as u32);
                }
                PooledSample {
                    offsets: offsets.into(),
                    children: children.into(),
                }
            })
            .collect();
        SamplePool {
            samples,
            covered: vec![vec![false; n]; config.samples],
            weights,
        }
    }

    /// Weight newly reached from `root` in one sample. Each node has at most
    /// one live parent, so apart from `root` itself no node is reached twice.
    fn sample_gain(&self, s: usize, root: NodeId, stack: &mut Vec<u32>) -> f64 {
        let covered = &self.covered[s];
        if covered[root] {
            return 0.0;
        }
        let sample = &self.samples[s];
        let mut total = 0.0;
        stack.clear();
        stack.push(root as u32);
        while let Some(x) = stack.pop() {
            total += self.weights.get(x as usize);
            for &c in sample.children(x as usize) {
                if c as usize != root && !covered[c as usize] {
                    stack.push(c);
                }
            }
        }
        total
    }

    /// Sum of per-sample gains in sample order, divided by the pool size.
    fn gain_serial(&self, root: NodeId) -> f64 {
        let mut stack = Vec::new();
        let total: f64 = (0..self.samples.len())
            .map(|s| self.sample_gain(s, root, &mut stack))
            .sum();
        total / self.samples.len() as f64
    }

    /// Same value as [`Self::gain_serial`], samples processed in parallel.
    fn gain_parallel(&self, root: NodeId) -> f64 {
        let per_sample: Vec<f64> = (0..self.samples.len())
            .into_par_iter()
            .map_init(Vec::new, |stack, s| self.sample_gain(s, root, stack))
            .collect();
        per_sample.iter().sum::<f64>() / self.samples.len() as f64
    }

    fn all_gains(&self, candidates: &[NodeId]) -> Vec<f64> {
        candidates.par_iter().map(|&v| self.gain_serial(v)).collect()
    }

    fn cover(&mut self, root: NodeId) {
        let samples = &self.samples;
        self.covered
            .par_iter_mut()
            .zip(samples.par_iter())
            .for_each(|(covered, sample)| {
                if covered[root] {
                    return;
                }
                covered[root] = true;
                let mut stack = vec![root as u32];
                while let Some(x) = stack.pop() {
                    for &c in sample.children(x as usize) {
                        if !covered[c as usize] {
                            covered[c as usize] = true;
                            stack.push(c);
                        }
                    }
                }
            });
    }
}

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    gain: f64,
    node: NodeId,
    round: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    // max-heap: larger gain first, then smaller node index
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.node.cmp(&self.node))
    }
}

fn check_budget(graph: &SocialGraph, budget: usize) -> Result<()> {
    if budget > graph.node_count() {
        return Err(Error::BudgetTooLarge {
            budget,
            nodes: graph.node_count(),
        });
    }
    Ok(())
}

/// Lazy greedy maximization of `σ_w` over a shared sample pool.
pub fn greedy_weighted(
    graph: &SocialGraph,
    weights: &NodeWeights,
    budget: usize,
    config: &EstimatorConfig,
) -> Result<SelectionResult> {
    config.check()?;
    check_budget(graph, budget)?;
    let mut result = SelectionResult {
        seeds: Vec::with_capacity(budget),
        gains: Vec::with_capacity(budget),
        evaluations: 0,
    };
    if budget == 0 {
        return Ok(result);
    }
    let mut pool = SamplePool::new(graph, weights, config);
    let nodes: Vec<NodeId> = (0..graph.node_count()).collect();
    let initial = pool.all_gains(&nodes);
    result.evaluations += nodes.len();
    let mut queue: BinaryHeap<QueueEntry> = nodes
        .iter()
        .zip(initial)
        .map(|(&node, gain)| QueueEntry { gain, node, round: 0 })
        .collect();

    for round in 0..budget {
        loop {
            let top = queue.pop().expect("budget never exceeds the node count");
            if top.round == round {
                pool.cover(top.node);
                result.seeds.push(top.node);
                result.gains.push(top.gain);
                break;
            }
            let gain = pool.gain_parallel(top.node);
            result.evaluations += 1;
            queue.push(QueueEntry {
                gain,
                node: top.node,
                round,
            });
        }
    }
    Ok(result)
}

/// Greedy that re-evaluates every remaining node each round. Same output as
/// [`greedy_weighted`] on the same pool, at a much higher cost.
pub fn greedy_weighted_naive(
    graph: &SocialGraph,
    weights: &NodeWeights,
    budget: usize,
    config: &EstimatorConfig,
) -> Result<SelectionResult> {
    config.check()?;
    check_budget(graph, budget)?;
    let mut result = SelectionResult {
        seeds: Vec::with_capacity(budget),
        gains: Vec::with_capacity(budget),
        evaluations: 0,
    };
    if budget == 0 {
        return Ok(result);
    }
    let mut pool = SamplePool::new(graph, weights, config);
    let mut remaining: Vec<NodeId> = (0..graph.node_count()).collect();
    for _ in 0..budget {
        let gains = pool.all_gains(&remaining);
        result.evaluations += remaining.len();
        let mut best = 0;
        for (i, &g) in gains.iter().enumerate() {
            if g > gains[best] {
                best = i;
            }
        }
        let node = remaining.remove(best);
        pool.cover(node);
        result.seeds.push(node);
        result.gains.push(gains[best]);
    }
    Ok(result)
}

/// GreedyScore: greedy weighted influence maximization with the node weights
/// of the campaign's mode (constructive or destructive) for its target.
pub fn greedy_score(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    campaign: &CampaignSpec,
    budget: usize,
    config: &EstimatorConfig,
) -> Result<SelectionResult> {
    if graph.node_count() != profile.node_count() {
        return Err(Error::NodeCountMismatch {
            graph: graph.node_count(),
            profile: profile.node_count(),
        });
    }
    campaign.validate(profile.candidates())?;
    greedy_weighted(graph, &campaign_weights(graph, profile, campaign), budget, config)
}

/// GreedyIM: classical influence maximization, every node weighs 1.
pub fn greedy_im(graph: &SocialGraph, budget: usize, config: &EstimatorConfig) -> Result<SelectionResult> {
    greedy_weighted(graph, &NodeWeights::uniform(graph.node_count()), budget, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Change of the target's score in the campaign's direction: its gain
    /// when constructive, its loss when destructive.
    ScoreGain,
    /// Margin of victory (`MoV` or `MoV_D` by mode).
    Mov,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceResult {
    pub seeds: Vec<NodeId>,
    pub value: f64,
}

/// Values closer than this are treated as ties in the exhaustive search.
const TIE_TOLERANCE: f64 = 1e-12;

/// Exhaustive search over every seed set of size at most `budget`, scored with
/// the exact oracle. Ties go to the lexicographically smallest seed list.
pub fn brute_force_optimal(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    campaign: &CampaignSpec,
    budget: usize,
    objective: Objective,
) -> Result<BruteForceResult> {
    check_search_size(graph, budget)?;
    let oracle = ExactOracle::new(graph, DEFAULT_ENUMERATION_CAP)?;
    brute_force_with(&oracle, profile, campaign, budget, objective)
}

fn check_search_size(graph: &SocialGraph, budget: usize) -> Result<()> {
    check_budget(graph, budget)?;
    if graph.node_count() > BRUTE_FORCE_MAX_NODES || budget > BRUTE_FORCE_MAX_BUDGET {
        return Err(Error::SearchTooLarge {
            nodes: graph.node_count(),
            budget,
            max_nodes: BRUTE_FORCE_MAX_NODES,
            max_budget: BRUTE_FORCE_MAX_BUDGET,
        });
    }
    Ok(())
}

/// Exact objective value of one seed set.
pub fn exact_objective(
    oracle: &ExactOracle<'_>,
    profile: &PreferenceProfile,
    campaign: &CampaignSpec,
    seeds: &[NodeId],
    objective: Objective,
) -> Result<f64> {
    let report = oracle.scores(profile, seeds, campaign)?;
    Ok(match objective {
        Objective::ScoreGain => match campaign.mode {
            Mode::Constructive => report.gain(campaign.target),
            Mode::Destructive => -report.gain(campaign.target),
        },
        Objective::Mov => margin_of_victory(&report, campaign)?.mov,
    })
}

/// [`brute_force_optimal`] on a prebuilt oracle.
pub fn brute_force_with(
    oracle: &ExactOracle<'_>,
    profile: &PreferenceProfile,
    campaign: &CampaignSpec,
    budget: usize,
    objective: Objective,
) -> Result<BruteForceResult> {
    check_search_size(oracle.graph(), budget)?;
    let n = oracle.graph().node_count();
    let mut best = BruteForceResult {
        seeds: Vec::new(),
        value: exact_objective(oracle, profile, campaign, &[], objective)?,
    };
    for size in 1..=budget {
        for seeds in combinations(n, size) {
            let value = exact_objective(oracle, profile, campaign, &seeds, objective)?;
            let better = value > best.value + TIE_TOLERANCE
                || ((value - best.value).abs() <= TIE_TOLERANCE && seeds < best.seeds);
            if better {
                best = BruteForceResult { seeds, value };
            }
        }
    }
    Ok(best)
}

/// All `k`-subsets of `0..n` as ascending vectors, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<NodeId> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}
