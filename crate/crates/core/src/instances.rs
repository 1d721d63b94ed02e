//! Random small instances for the exact-oracle checks.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::graph::{make_dks_gadget, CandidateId, Gadget, NodeId, NodeLabeling, PreferenceProfile, SocialGraph};
use crate::rng::{self, unit_open_closed};

/// Shape limits of a random instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceShape {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub max_in_degree: usize,
    /// Candidate counts are drawn uniformly from this inclusive range.
    pub min_candidates: usize,
    pub max_candidates: usize,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape {
            min_nodes: 2,
            max_nodes: 8,
            max_in_degree: 2,
            min_candidates: 2,
            max_candidates: 3,
        }
    }
}

impl InstanceShape {
    pub fn with_candidates(self, candidates: usize) -> Self {
        InstanceShape {
            min_candidates: candidates,
            max_candidates: candidates,
            ..self
        }
    }

    pub fn with_nodes(self, min: usize, max: usize) -> Self {
        InstanceShape {
            min_nodes: min,
            max_nodes: max,
            ..self
        }
    }
}

#[derive(Clone, Debug)]
pub struct RandomInstance {
    /// Seed that regenerates this instance with [`random_instance`].
    pub seed: u64,
    pub graph: SocialGraph,
    pub profile: PreferenceProfile,
}

/// Random graph with positive weights whose incoming sums stay below 1, and a
/// random preference profile in which about one row in five is certain.
pub fn random_instance(seed: u64, shape: &InstanceShape) -> RandomInstance {
    let mut rng = rng::stream(seed, 0);
    let n = rng.random_range(shape.min_nodes..=shape.max_nodes);
    let m = rng.random_range(shape.min_candidates..=shape.max_candidates);
    let mut edges = Vec::new();
    for v in 0..n {
        let k = rng.random_range(0..=shape.max_in_degree.min(n - 1));
        let sources: Vec<NodeId> = index::sample(&mut rng, n - 1, k)
            .into_iter()
            .map(|u| if u >= v { u + 1 } else { u })
            .collect();
        // k edge shares plus the residual, all positive
        let shares: Vec<f64> = (0..=k).map(|_| unit_open_closed(&mut rng)).collect();
        let total: f64 = shares.iter().sum();
        edges.extend(sources.into_iter().zip(&shares).map(|(u, s)| (u, v, s / total)));
    }
    let graph = SocialGraph::new(n, edges).expect("generated weights are valid");
    let rows: Vec<Vec<f64>> = (0..n).map(|_| random_row(&mut rng, m)).collect();
    let profile = PreferenceProfile::new(m, rows).expect("generated rows are distributions");
    RandomInstance { seed, graph, profile }
}

fn random_row(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    if rng.random_bool(0.2) {
        let c = rng.random_range(0..m);
        return (0..m).map(|x| if x == c { 1.0 } else { 0.0 }).collect();
    }
    let raw: Vec<f64> = (0..m).map(|_| unit_open_closed(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Densest-subgraph gadget over a random undirected base graph on
/// `min_nodes..=max_nodes` nodes. Edges are only added while the gadget keeps
/// at most `max_worlds` live-edge graphs, so it stays enumerable.
pub fn random_dks_gadget(
    seed: u64,
    min_nodes: usize,
    max_nodes: usize,
    gamma: u32,
    candidates: usize,
    max_worlds: u64,
) -> Gadget {
    let mut rng = rng::stream(seed, 1);
    let n = rng.random_range(min_nodes.max(2)..=max_nodes.max(2));
    let density = rng.random_range(0.2..0.8);
    let mut pairs: Vec<(NodeId, NodeId)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let mut degree = vec![0u64; n];
    let mut worlds = 1u64;
    let mut kept = Vec::new();
    for (u, v) in pairs {
        if !rng.random_bool(density) {
            continue;
        }
        // each endpoint gains one in-edge: (d+2)/(d+1) more worlds per endpoint
        let grown = worlds / (degree[u] + 1) * (degree[u] + 2) / (degree[v] + 1) * (degree[v] + 2);
        if grown > max_worlds {
            continue;
        }
        degree[u] += 1;
        degree[v] += 1;
        worlds = degree.iter().map(|d| d + 1).product();
        kept.push((u, v));
    }
    make_dks_gadget(n, &kept, gamma, candidates).expect("gadget parameters are valid")
}

/// Unweighted planted-partition graph: every undirected pair is an edge with
/// probability `p_in` inside a block and `p_out` across blocks. Nodes are
/// labeled by block, blocks named `block0`, `block1`, ...
pub fn planted_partition(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> (SocialGraph, NodeLabeling) {
    let mut rng = rng::stream(seed, 2);
    let labels: Vec<CandidateId> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &size)| std::iter::repeat_n(b, size))
        .collect();
    let n = labels.len();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random_bool(p) {
                pairs.extend([(u, v), (v, u)]);
            }
        }
    }
    let names = (0..sizes.len()).map(|b| format!("block{b}")).collect();
    let labeling = NodeLabeling::new(labels, names).expect("labels match block count");
    (SocialGraph::from_pairs(n, pairs), labeling)
}
