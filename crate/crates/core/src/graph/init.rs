use rand::Rng;

use super::{NodeLabeling, PreferenceProfile, SocialGraph};
use crate::rng;

/// Preference of each voter for candidate `c`: the share of its neighbors
/// (in- and out-, counted once) labeled with category `c`. Nodes without
/// neighbors get the uniform distribution.
pub fn init_preferences(graph: &SocialGraph, labeling: &NodeLabeling) -> PreferenceProfile {
    let m = labeling.categories().len().max(1);
    let mut probs = Vec::with_capacity(graph.node_count() * m);
    for v in 0..graph.node_count() {
        let neighbors = graph.neighbors(v);
        let mut row = vec![0.0; m];
        if neighbors.is_empty() {
            row.fill(1.0 / m as f64);
        } else {
            for &u in &neighbors {
                row[labeling.label(u)] += 1.0;
            }
            let total = neighbors.len() as f64;
            row.iter_mut().for_each(|p| *p /= total);
        }
        probs.extend(row);
    }
    PreferenceProfile::from_flat(m, probs)
}

/// Draws a non-incoming influence share `b̄_v ~ U[0,1)` per node from stream
/// `(seed, v)` and splits the remaining `1 - b̄_v` evenly over the in-edges.
pub fn assign_random_weights(graph: &SocialGraph, seed: u64) -> SocialGraph {
    let retained: Vec<f64> = (0..graph.node_count())
        .map(|v| rng::stream(seed, v as u64).random())
        .collect();
    split_weights(graph, &retained)
}

/// Same split as [`assign_random_weights`] with caller-provided `b̄_v`.
pub(crate) fn split_weights(graph: &SocialGraph, retained: &[f64]) -> SocialGraph {
    graph.reweighted(|e| (1.0 - retained[e.target]) / graph.in_degree(e.target) as f64)
}
