//! Voter graph, preference profiles and ground-truth labelings.
//!
//! A [`SocialGraph`] stores directed influence edges `(u, v)` carrying a weight
//! `b_uv`; the weights entering any node sum to at most one. Graphs are
//! immutable once built: weight assignment produces a new graph.

mod gadget;
mod init;
mod io;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use gadget::{make_dks_gadget, make_ltm_reduction_gadget, Gadget};
pub use init::{assign_random_weights, init_preferences};
pub use io::{load_edge_list, load_labels, read_fixture, write_fixture, Fixture, FIXTURE_HEADER};

pub type NodeId = usize;
pub type CandidateId = usize;

/// Absolute tolerance for every probability and weight-budget invariant.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

/// Dense index <-> original identifier map kept from ingestion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeIds {
    names: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeIds {
    pub(crate) fn intern(&mut self, name: &str) -> NodeId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn name(&self, node: NodeId) -> Option<&str> {
        self.names.get(node).map(String::as_str)
    }

    pub fn get(&self, name: &str) -> Option<NodeId> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SocialGraph {
    node_count: usize,
    edges: Vec<Edge>,
    in_adj: Vec<Vec<(NodeId, f64)>>,
    out_adj: Vec<Vec<(NodeId, f64)>>,
    ids: Option<NodeIds>,
}

impl SocialGraph {
    /// Builds a weighted graph, rejecting anything that breaks the LTM
    /// constraints: self-loops, duplicate pairs, weights outside `(0, 1]`, or
    /// an incoming weight sum above `1 + TOLERANCE`.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (NodeId, NodeId, f64)>) -> Result<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(source, target, weight)| Edge { source, target, weight })
            .collect();
        for e in &edges {
            if !(e.weight > 0.0 && e.weight <= 1.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {} outside (0, 1]",
                    e.source, e.target, e.weight
                )));
            }
        }
        let graph = Self::from_edges(node_count, edges, None);
        graph.validate()?;
        Ok(graph)
    }

    /// Unweighted skeleton: self-loops are dropped, duplicate pairs merged and
    /// every weight is zero until [`assign_random_weights`] runs.
    pub fn from_pairs(node_count: usize, pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> Self {
        let mut pairs: Vec<(NodeId, NodeId)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
        pairs.sort_unstable();
        pairs.dedup();
        let edges = pairs
            .into_iter()
            .map(|(source, target)| Edge {
                source,
                target,
                weight: 0.0,
            })
            .collect();
        Self::from_edges(node_count, edges, None)
    }

    pub(crate) fn from_edges(node_count: usize, mut edges: Vec<Edge>, ids: Option<NodeIds>) -> Self {
        edges.sort_by_key(|e| (e.source, e.target));
        let mut in_adj = vec![Vec::new(); node_count];
        let mut out_adj = vec![Vec::new(); node_count];
        for e in &edges {
            if e.source < node_count && e.target < node_count {
                out_adj[e.source].push((e.target, e.weight));
                in_adj[e.target].push((e.source, e.weight));
            }
        }
        for list in &mut in_adj {
            list.sort_by_key(|&(u, _)| u);
        }
        SocialGraph {
            node_count,
            edges,
            in_adj,
            out_adj,
            ids,
        }
    }

    /// Same topology with weights replaced edge by edge.
    pub(crate) fn reweighted(&self, mut weight: impl FnMut(&Edge) -> f64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                weight: weight(e),
                ..*e
            })
            .collect();
        Self::from_edges(self.node_count, edges, self.ids.clone())
    }

    pub(crate) fn with_ids(mut self, ids: NodeIds) -> Self {
        self.ids = Some(ids);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len());
        for e in &self.edges {
            if e.source >= self.node_count || e.target >= self.node_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) references a node outside 0..{}",
                    e.source, e.target, self.node_count
                )));
            }
            if e.source == e.target {
                return Err(Error::InvalidGraph(format!("self-loop on node {}", e.source)));
            }
            if !seen.insert((e.source, e.target)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    e.source, e.target
                )));
            }
            if !e.weight.is_finite() || e.weight < 0.0 || e.weight > 1.0 {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has weight {}",
                    e.source, e.target, e.weight
                )));
            }
        }
        for v in 0..self.node_count {
            let total = self.in_weight(v);
            if total > 1.0 + TOLERANCE {
                return Err(Error::InvalidGraph(format!(
                    "incoming weight of node {v} sums to {total}"
                )));
            }
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// In-neighbors of `v` with their weights `b_uv`, ascending by source.
    pub fn in_edges(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.in_adj[v]
    }

    /// Out-neighbors of `v` with their weights `b_vu`, ascending by target.
    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.out_adj[v]
    }

    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_adj[v].len()
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_weight(&self, v: NodeId) -> f64 {
        self.in_adj[v].iter().map(|&(_, w)| w).sum()
    }

    pub fn ids(&self) -> Option<&NodeIds> {
        self.ids.as_ref()
    }

    /// Original identifier of `v`, or its index when the graph was built in code.
    pub fn node_name(&self, v: NodeId) -> String {
        self.ids
            .as_ref()
            .and_then(|ids| ids.name(v))
            .map_or_else(|| v.to_string(), str::to_owned)
    }

    /// Distinct in- and out-neighbors of `v`, ascending.
    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.in_adj[v].iter().chain(&self.out_adj[v]).map(|&(u, _)| u).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Per-voter probability distribution over `m` candidates.
#[derive(Clone, Debug, PartialEq)]
pub struct PreferenceProfile {
    candidates: usize,
    probs: Vec<f64>,
}

impl PreferenceProfile {
    pub fn new(candidates: usize, rows: impl IntoIterator<Item = Vec<f64>>) -> Result<Self> {
        if candidates == 0 {
            return Err(Error::InvalidProfile("no candidates".into()));
        }
        let mut probs = Vec::new();
        for (v, row) in rows.into_iter().enumerate() {
            if row.len() != candidates {
                return Err(Error::InvalidProfile(format!(
                    "node {v} has {} entries, expected {candidates}",
                    row.len()
                )));
            }
            probs.extend(row);
        }
        let profile = PreferenceProfile { candidates, probs };
        profile.validate()?;
        Ok(profile)
    }

    pub(crate) fn from_flat(candidates: usize, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len() % candidates, 0);
        PreferenceProfile { candidates, probs }
    }

    /// Every voter certain of `candidate`.
    pub fn certain(node_count: usize, candidates: usize, candidate: CandidateId) -> Self {
        let mut probs = vec![0.0; node_count * candidates];
        for row in probs.chunks_mut(candidates) {
            row[candidate] = 1.0;
        }
        PreferenceProfile { candidates, probs }
    }

    pub fn validate(&self) -> Result<()> {
        for (v, row) in self.rows().enumerate() {
            if row.iter().any(|&p| !p.is_finite() || p < -TOLERANCE) {
                return Err(Error::InvalidProfile(format!("node {v} has a negative entry")));
            }
            let total: f64 = row.iter().sum();
            if (total - 1.0).abs() > TOLERANCE {
                return Err(Error::InvalidProfile(format!("node {v} sums to {total}")));
            }
        }
        Ok(())
    }

    pub fn candidates(&self) -> usize {
        self.candidates
    }

    pub fn node_count(&self) -> usize {
        self.probs.len() / self.candidates
    }

    pub fn row(&self, v: NodeId) -> &[f64] {
        &self.probs[v * self.candidates..(v + 1) * self.candidates]
    }

    pub(crate) fn row_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.probs[v * self.candidates..(v + 1) * self.candidates]
    }

    pub fn prob(&self, v: NodeId, c: CandidateId) -> f64 {
        self.probs[v * self.candidates + c]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.probs.chunks_exact(self.candidates)
    }

    /// Expected score of every candidate with no campaign: `Σ_v π_v(c)`.
    pub fn scores(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.candidates];
        for row in self.rows() {
            for (t, p) in totals.iter_mut().zip(row) {
                *t += p;
            }
        }
        totals
    }

    /// Nodes with a candidate probability of exactly zero. The approximation
    /// analysis assumes every probability is polynomially bounded away from 0.
    pub fn zero_entries(&self) -> usize {
        self.probs.iter().filter(|&&p| p == 0.0).count()
    }
}

/// Ground-truth category per node; category order defines candidate indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeLabeling {
    labels: Vec<CandidateId>,
    categories: Vec<String>,
}

impl NodeLabeling {
    pub fn new(labels: Vec<CandidateId>, categories: Vec<String>) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= categories.len()) {
            return Err(Error::InvalidProfile(format!("label index {bad} has no category")));
        }
        Ok(NodeLabeling { labels, categories })
    }

    pub fn label(&self, v: NodeId) -> CandidateId {
        self.labels[v]
    }

    pub fn labels(&self) -> &[CandidateId] {
        &self.labels
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn candidate(&self, name: &str) -> Option<CandidateId> {
        self.categories.iter().position(|c| c == name)
    }
}
