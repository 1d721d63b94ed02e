//! Instance generators taken from the hardness reductions. They are used as
//! test fixtures: each one has a closed-form relation between its scores and
//! its margin of victory that the estimators must reproduce.

use super::{CandidateId, Edge, NodeId, PreferenceProfile, SocialGraph};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Gadget {
    pub graph: SocialGraph,
    pub profile: PreferenceProfile,
    /// Candidate the campaign supports (always 0).
    pub target: CandidateId,
    /// Candidate every voter initially supports in the densest-subgraph
    /// gadget, or the duplicates' candidate in the LTM reduction (always 1).
    pub opponent: CandidateId,
}

/// Densest-k-subgraph gadget: every undirected edge becomes two directed
/// edges of weight `1 / n^gamma` and every voter is certain of candidate 1.
/// On this instance `MoV(S) = 2 F(c_0, S)` for every seed set.
pub fn make_dks_gadget(node_count: usize, edges: &[(NodeId, NodeId)], gamma: u32, candidates: usize) -> Result<Gadget> {
    if gamma < 4 {
        return Err(Error::InvalidGamma(gamma));
    }
    if node_count < 2 {
        return Err(Error::InvalidGraph("gadget base graph needs at least 2 nodes".into()));
    }
    if candidates < 2 {
        return Err(Error::TooFewCandidates(candidates));
    }
    let weight = (node_count as f64).powi(gamma as i32).recip();
    let mut pairs: Vec<(NodeId, NodeId)> = edges
        .iter()
        .filter(|(u, v)| u != v)
        .flat_map(|&(u, v)| [(u, v), (v, u)])
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    let graph = SocialGraph::new(node_count, pairs.into_iter().map(|(u, v)| (u, v, weight)))?;
    Ok(Gadget {
        graph,
        profile: PreferenceProfile::certain(node_count, candidates, 1),
        target: 0,
        opponent: 1,
    })
}

/// Influence-maximization reduction: node `i` gets a duplicate `n + i` fed by
/// a weight-1 edge. Originals are certain of the target (candidate 0),
/// duplicates of candidate 1.
pub fn make_ltm_reduction_gadget(base: &SocialGraph, candidates: usize) -> Result<Gadget> {
    if candidates < 2 {
        return Err(Error::TooFewCandidates(candidates));
    }
    let n = base.node_count();
    let mut edges: Vec<Edge> = base.edges().to_vec();
    edges.extend((0..n).map(|i| Edge {
        source: i,
        target: n + i,
        weight: 1.0,
    }));
    let graph = SocialGraph::from_edges(2 * n, edges, None);
    graph.validate()?;

    let mut rows = Vec::with_capacity(2 * n * candidates);
    for v in 0..2 * n {
        let mut row = vec![0.0; candidates];
        row[if v < n { 0 } else { 1 }] = 1.0;
        rows.extend(row);
    }
    Ok(Gadget {
        graph,
        profile: PreferenceProfile::from_flat(candidates, rows),
        target: 0,
        opponent: 1,
    })
}
