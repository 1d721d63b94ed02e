//! Election control through social influence when voter preferences are only
//! known as probability distributions.
//!
//! A campaign seeded at a few voters spreads through a social graph under the
//! Linear Threshold model. Voters the campaign reaches shift probability mass
//! toward (constructive) or away from (destructive) a target candidate, in
//! proportion to the active influence they receive. Two update rules exist:
//! [`Model::Pltr`] updates only activated voters, [`Model::RPltr`] also updates
//! voters that merely have an active in-neighbor.
//!
//! Modules, bottom-up:
//!
//! * [`graph`]: voter graphs, preference profiles, dataset loading and the
//!   reduction gadgets used as fixtures.
//! * [`diffusion`]: threshold simulation, live-edge sampling, weighted spread.
//! * [`election`]: preference updates, expected scores, margin of victory.
//! * [`selection`]: greedy seed selection and the brute-force optimum.
//! * [`experiment`]: the experiment grid and the randomized oracle check.

pub mod diffusion;
pub mod election;
mod error;
pub mod experiment;
pub mod graph;
pub mod instances;
pub mod rng;
pub mod selection;

pub use diffusion::{
    enumerate_live_edge_graphs, estimate_sigma_w, exact_sigma_w, reachable, sample_live_edge, simulate_ltm,
    ActivationResult, Estimate, EstimatorConfig, LiveEdgeGraph, NodeWeights, ThresholdAssignment,
};
pub use election::{
    exact_expected_scores, exact_strategy_movs, expected_scores, margin_of_victory, strategy_movs, update_preferences,
    CampaignSpec, Mode, Model, MovReport, ScoreReport, StrategyMovs,
};
pub use error::{Error, Result};
pub use graph::{
    assign_random_weights, init_preferences, load_edge_list, load_labels, make_dks_gadget, make_ltm_reduction_gadget,
    CandidateId, NodeId, NodeLabeling, PreferenceProfile, SocialGraph, TOLERANCE,
};
pub use selection::{
    brute_force_optimal, constructive_weights, destructive_weights, greedy_im, greedy_score, Objective, SelectionResult,
};
