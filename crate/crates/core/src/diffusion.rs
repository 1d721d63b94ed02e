//! Linear Threshold diffusion, live-edge sampling and weighted spread
//! estimation.
//!
//! Two routes produce a final active set: [`simulate_ltm`] runs the threshold
//! dynamics directly, while [`sample_live_edge`] + [`reachable`] use the
//! live-edge construction in which every node keeps at most one incoming edge,
//! chosen with probability equal to its weight. Both routes induce the same
//! distribution over active sets; the estimators use the second one and the
//! first serves as an independent check.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, SocialGraph};
use crate::rng;

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 20;

/// Monte Carlo settings shared by every estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimatorConfig {
    pub samples: usize,
    /// Master seed; sample `i` draws from stream `(seed, i)`.
    pub seed: u64,
    /// Largest number of live-edge graphs the exact oracles will enumerate.
    pub enumeration_cap: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl EstimatorConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        EstimatorConfig {
            samples,
            seed,
            ..Default::default()
        }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::ZeroSamples);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdAssignment(Vec<f64>);

impl ThresholdAssignment {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if let Some(t) = thresholds.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidGraph(format!("threshold {t} outside [0, 1]")));
        }
        Ok(ThresholdAssignment(thresholds))
    }

    /// Independent uniform thresholds in `(0, 1]`.
    pub fn sample(node_count: usize, rng: &mut impl Rng) -> Self {
        ThresholdAssignment((0..node_count).map(|_| rng::unit_open_closed(rng)).collect())
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.0[v]
    }
}

/// Random subgraph in which each node keeps at most one incoming edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiveEdgeGraph {
    parent: Vec<Option<NodeId>>,
    child_offsets: Vec<usize>,
    children: Vec<NodeId>,
}

impl LiveEdgeGraph {
    pub fn new(parent: Vec<Option<NodeId>>) -> Self {
        let n = parent.len();
        let mut child_offsets = vec![0usize; n + 1];
        for &p in parent.iter().flatten() {
            child_offsets[p + 1] += 1;
        }
        for i in 0..n {
            child_offsets[i + 1] += child_offsets[i];
        }
        let mut fill = child_offsets.clone();
        let mut children = vec![0; child_offsets[n]];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[fill[p]] = v;
                fill[p] += 1;
            }
        }
        LiveEdgeGraph {
            parent,
            child_offsets,
            children,
        }
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// The live in-neighbor of `v`, if any.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v]
    }

    pub fn children(&self, v: NodeId) -> &[NodeId] {
        &self.children[self.child_offsets[v]..self.child_offsets[v + 1]]
    }

    pub fn live_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.parent.iter().enumerate().filter_map(|(v, p)| p.map(|u| (u, v)))
    }

    /// Forward closure of `seeds` as a membership mask.
    pub fn reach_mask(&self, seeds: &[NodeId]) -> Vec<bool> {
        let mut mask = vec![false; self.node_count()];
        let mut stack: Vec<NodeId> = Vec::with_capacity(seeds.len());
        for &s in seeds {
            if !mask[s] {
                mask[s] = true;
                stack.push(s);
            }
        }
        while let Some(u) = stack.pop() {
            for &v in self.children(u) {
                if !mask[v] {
                    mask[v] = true;
                    stack.push(v);
                }
            }
        }
        mask
    }
}

/// Final active set together with the active influence mass `Σ_{u∈A∩N_in(v)} b_uv`
/// received by every node.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationResult {
    active: Vec<bool>,
    incoming_mass: Vec<f64>,
}

impl ActivationResult {
    pub fn from_active(graph: &SocialGraph, active: Vec<bool>) -> Self {
        let mut incoming_mass = vec![0.0; graph.node_count()];
        for u in (0..graph.node_count()).filter(|&u| active[u]) {
            for &(v, b) in graph.out_edges(u) {
                incoming_mass[v] += b;
            }
        }
        ActivationResult { active, incoming_mass }
    }

    /// Build from explicit parts; used to feed hand-made activations to the
    /// preference update.
    pub fn from_parts(active: Vec<bool>, incoming_mass: Vec<f64>) -> Result<Self> {
        if active.len() != incoming_mass.len() {
            return Err(Error::NodeCountMismatch {
                graph: active.len(),
                profile: incoming_mass.len(),
            });
        }
        if incoming_mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::InvalidGraph(
                "incoming mass must be finite and nonnegative".into(),
            ));
        }
        Ok(ActivationResult { active, incoming_mass })
    }

    pub fn node_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, v: NodeId) -> bool {
        self.active[v]
    }

    pub fn active_mask(&self) -> &[bool] {
        &self.active
    }

    pub fn active_nodes(&self) -> Vec<NodeId> {
        (0..self.active.len()).filter(|&v| self.active[v]).collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn incoming_mass(&self, v: NodeId) -> f64 {
        self.incoming_mass[v]
    }

    pub fn masses(&self) -> &[f64] {
        &self.incoming_mass
    }
}

/// Nonnegative per-node weights `w(v)` for the weighted spread `σ_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeWeights(Vec<f64>);

impl NodeWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidGraph(format!(
                "node weight {w} is not a finite nonnegative number"
            )));
        }
        Ok(NodeWeights(weights))
    }

    pub fn uniform(node_count: usize) -> Self {
        NodeWeights(vec![1.0; node_count])
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn total_over(&self, mask: &[bool]) -> f64 {
        self.0.iter().zip(mask).filter(|(_, &m)| m).map(|(w, _)| w).sum()
    }
}

/// Runs the threshold dynamics to a fixed point. A node activates once the
/// weight of its active in-neighbors reaches its threshold; rounds are
/// synchronous and the loop stops at the first round that adds nothing.
pub fn simulate_ltm(graph: &SocialGraph, seeds: &[NodeId], thresholds: &ThresholdAssignment) -> ActivationResult {
    let n = graph.node_count();
    let mut active = vec![false; n];
    let mut mass = vec![0.0; n];
    let mut frontier: Vec<NodeId> = Vec::new();
    for &s in seeds {
        if !active[s] {
            active[s] = true;
            frontier.push(s);
        }
    }
    let mut touched = Vec::new();
    while !frontier.is_empty() {
        touched.clear();
        for &u in &frontier {
            for &(v, b) in graph.out_edges(u) {
                mass[v] += b;
                touched.push(v);
            }
        }
        touched.sort_unstable();
        touched.dedup();
        frontier.clear();
        for &v in &touched {
            if !active[v] && mass[v] >= thresholds.get(v) {
                frontier.push(v);
            }
        }
        for &v in &frontier {
            active[v] = true;
        }
    }
    ActivationResult::from_active(graph, active)
}

/// Each node independently keeps in-edge `(u, v)` with probability `b_uv`, or
/// none with the residual probability. One uniform draw per node, in node order.
pub fn sample_live_edge(graph: &SocialGraph, rng: &mut impl Rng) -> LiveEdgeGraph {
    let parent = (0..graph.node_count())
        .map(|v| {
            let r: f64 = rng.random();
            let mut cumulative = 0.0;
            for &(u, b) in graph.in_edges(v) {
                cumulative += b;
                if r < cumulative {
                    return Some(u);
                }
            }
            None
        })
        .collect();
    LiveEdgeGraph::new(parent)
}

/// Nodes reachable from `seeds` over live edges, ascending.
pub fn reachable(live: &LiveEdgeGraph, seeds: &[NodeId]) -> Vec<NodeId> {
    let mask = live.reach_mask(seeds);
    (0..mask.len()).filter(|&v| mask[v]).collect()
}

/// Sample mean and its standard error, accumulated in slice order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate {
            mean: value,
            stderr: 0.0,
        }
    }

    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Estimate::exact(0.0);
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Estimate::exact(mean);
        }
        let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        Estimate {
            mean,
            stderr: (var / n as f64).sqrt(),
        }
    }
}

/// Activation of `seeds` in live-edge sample `index`: reached set plus the
/// active mass every node receives over the original weights.
pub(crate) fn live_activation(graph: &SocialGraph, seeds: &[NodeId], seed: u64, index: usize) -> ActivationResult {
    let live = sample_live_edge(graph, &mut rng::stream(seed, index as u64));
    ActivationResult::from_active(graph, live.reach_mask(seeds))
}

/// Maps every Monte Carlo activation through `f`. Results come back in sample
/// order whatever the thread count.
pub(crate) fn map_samples<T, F>(graph: &SocialGraph, seeds: &[NodeId], config: &EstimatorConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ActivationResult) -> T + Sync,
{
    config.check()?;
    Ok((0..config.samples)
        .into_par_iter()
        .map(|i| f(&live_activation(graph, seeds, config.seed, i)))
        .collect())
}

/// Monte Carlo estimate of `σ_w(S) = E[Σ_{v reached} w(v)]`.
pub fn estimate_sigma_w(
    graph: &SocialGraph,
    weights: &NodeWeights,
    seeds: &[NodeId],
    config: &EstimatorConfig,
) -> Result<Estimate> {
    config.check()?;
    let values: Vec<f64> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let live = sample_live_edge(graph, &mut rng::stream(config.seed, i as u64));
            weights.total_over(&live.reach_mask(seeds))
        })
        .collect();
    Ok(Estimate::from_samples(&values))
}

/// Exact `σ_w(S)` by summing over every live-edge graph.
pub fn exact_sigma_w(graph: &SocialGraph, weights: &NodeWeights, seeds: &[NodeId], cap: u64) -> Result<f64> {
    Ok(enumerate_live_edge_graphs(graph, cap)?
        .map(|(live, p)| p * weights.total_over(&live.reach_mask(seeds)))
        .sum())
}

/// Every live-edge graph of `graph` with its probability.
pub struct LiveEdgeEnumeration {
    /// Per node: possible parents (None = no live in-edge) with probabilities.
    choices: Vec<Vec<(Option<NodeId>, f64)>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for LiveEdgeEnumeration {
    type Item = (LiveEdgeGraph, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut probability = 1.0;
        let parent = self
            .choices
            .iter()
            .zip(&self.odometer)
            .map(|(options, &i)| {
                probability *= options[i].1;
                options[i].0
            })
            .collect();
        // advance, node 0 fastest
        self.done = true;
        for (digit, options) in self.odometer.iter_mut().zip(&self.choices) {
            *digit += 1;
            if *digit < options.len() {
                self.done = false;
                break;
            }
            *digit = 0;
        }
        Some((LiveEdgeGraph::new(parent), probability))
    }
}

/// Enumerates all live-edge graphs. Zero-probability choices are skipped; the
/// cap is checked against `Π_v (in-degree(v) + 1)`.
pub fn enumerate_live_edge_graphs(graph: &SocialGraph, cap: u64) -> Result<LiveEdgeEnumeration> {
    let required: f64 = (0..graph.node_count())
        .map(|v| (graph.in_degree(v) + 1) as f64)
        .product();
    if required > cap as f64 {
        return Err(Error::EnumerationCap { required, cap });
    }
    let choices: Vec<Vec<(Option<NodeId>, f64)>> = (0..graph.node_count())
        .map(|v| {
            let mut options: Vec<(Option<NodeId>, f64)> = graph
                .in_edges(v)
                .iter()
                .filter(|&&(_, b)| b > 0.0)
                .map(|&(u, b)| (Some(u), b))
                .collect();
            let residual = 1.0 - graph.in_weight(v);
            if residual > 0.0 {
                options.push((None, residual));
            }
            options
        })
        .collect();
    let n = choices.len();
    Ok(LiveEdgeEnumeration {
        choices,
        odometer: vec![0; n],
        done: false,
    })
}
