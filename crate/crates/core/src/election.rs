//! Preference dynamics, expected scores and margin of victory.
//!
//! After a diffusion with active set `A`, a voter `v` receiving active mass
//! `β = Σ_{u∈A∩N_in(v)} b_uv` updates its distribution. In the constructive
//! rule the campaign candidate gains `β` before renormalizing by `1 + β`; in
//! the destructive rule the target loses its share and `β` is split evenly
//! over the other `m - 1` candidates. Scores are expectations over live-edge
//! graphs: sampled for [`expected_scores`], enumerated for
//! [`exact_expected_scores`].

use std::fmt;
use std::str::FromStr;

use crate::diffusion::{self, ActivationResult, EstimatorConfig, LiveEdgeGraph, DEFAULT_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::graph::{CandidateId, NodeId, PreferenceProfile, SocialGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    /// Only activated voters update.
    Pltr,
    /// Every voter with an active in-neighbor updates.
    RPltr,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Pltr, Model::RPltr];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Pltr => "pltr",
            Model::RPltr => "r-pltr",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pltr" => Ok(Model::Pltr),
            "r-pltr" | "rpltr" | "r_pltr" => Ok(Model::RPltr),
            other => Err(Error::Config(format!(
                "unknown model {other:?} (expected pltr or r-pltr)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Constructive,
    Destructive,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Constructive => "constructive",
            Mode::Destructive => "destructive",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "constructive" => Ok(Mode::Constructive),
            "destructive" => Ok(Mode::Destructive),
            other => Err(Error::Config(format!(
                "unknown mode {other:?} (expected constructive or destructive)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CampaignSpec {
    pub target: CandidateId,
    /// Candidate the campaign message supports; the target unless another
    /// strategy is being evaluated.
    pub campaign_candidate: CandidateId,
    pub model: Model,
    pub mode: Mode,
}

impl CampaignSpec {
    pub fn new(target: CandidateId, model: Model, mode: Mode) -> Self {
        CampaignSpec {
            target,
            campaign_candidate: target,
            model,
            mode,
        }
    }

    pub fn supporting(self, candidate: CandidateId) -> Self {
        CampaignSpec {
            campaign_candidate: candidate,
            ..self
        }
    }

    pub fn validate(&self, candidates: usize) -> Result<()> {
        if self.target >= candidates || self.campaign_candidate >= candidates {
            return Err(Error::InvalidCampaign(format!(
                "candidate index out of range for {candidates} candidates"
            )));
        }
        if self.mode == Mode::Destructive {
            if self.campaign_candidate != self.target {
                return Err(Error::InvalidCampaign(
                    "destructive campaigns must be about the target".into(),
                ));
            }
            if candidates < 2 {
                return Err(Error::TooFewCandidates(candidates));
            }
        }
        Ok(())
    }

    fn eligible(&self, activation: &ActivationResult, v: NodeId) -> bool {
        activation.incoming_mass(v) > 0.0
            && match self.model {
                Model::Pltr => activation.is_active(v),
                Model::RPltr => true,
            }
    }
}

/// Switch for the oracle check's fault injection.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub(crate) enum UpdateRule {
    #[default]
    Normalized,
    SkipNormalization,
}

fn update_row(row: &[f64], beta: f64, campaign: &CampaignSpec, rule: UpdateRule, out: &mut [f64]) {
    let scale = match rule {
        UpdateRule::Normalized => 1.0 + beta,
        UpdateRule::SkipNormalization => 1.0,
    };
    match campaign.mode {
        Mode::Constructive => {
            for (c, (o, p)) in out.iter_mut().zip(row).enumerate() {
                let boost = if c == campaign.campaign_candidate { beta } else { 0.0 };
                *o = (p + boost) / scale;
            }
        }
        Mode::Destructive => {
            let share = beta / (row.len() - 1) as f64;
            for (c, (o, p)) in out.iter_mut().zip(row).enumerate() {
                *o = if c == campaign.target {
                    p / scale
                } else {
                    (p + share) / scale
                };
            }
        }
    }
}

fn check_sizes(graph_nodes: usize, profile: &PreferenceProfile) -> Result<()> {
    if graph_nodes != profile.node_count() {
        return Err(Error::NodeCountMismatch {
            graph: graph_nodes,
            profile: profile.node_count(),
        });
    }
    Ok(())
}

fn check_seeds(graph: &SocialGraph, seeds: &[NodeId]) -> Result<()> {
    match seeds.iter().find(|&&s| s >= graph.node_count()) {
        Some(s) => Err(Error::UnknownNode(s.to_string())),
        None => Ok(()),
    }
}

/// Applies the campaign's update rule to every eligible voter.
pub fn update_preferences(
    profile: &PreferenceProfile,
    activation: &ActivationResult,
    campaign: &CampaignSpec,
) -> Result<PreferenceProfile> {
    update_preferences_with(profile, activation, campaign, UpdateRule::Normalized)
}

pub(crate) fn update_preferences_with(
    profile: &PreferenceProfile,
    activation: &ActivationResult,
    campaign: &CampaignSpec,
    rule: UpdateRule,
) -> Result<PreferenceProfile> {
    check_sizes(activation.node_count(), profile)?;
    campaign.validate(profile.candidates())?;
    let mut updated = profile.clone();
    let mut buffer = vec![0.0; profile.candidates()];
    for v in 0..profile.node_count() {
        if campaign.eligible(activation, v) {
            update_row(profile.row(v), activation.incoming_mass(v), campaign, rule, &mut buffer);
            updated.row_mut(v).copy_from_slice(&buffer);
        }
    }
    Ok(updated)
}

/// Candidate scores `Σ_v π̃_v(c)` after one activation, computed as the
/// before-scores plus the change at every updated voter.
fn activation_scores(
    profile: &PreferenceProfile,
    before: &[f64],
    activation: &ActivationResult,
    campaign: &CampaignSpec,
    rule: UpdateRule,
) -> Vec<f64> {
    let mut scores = before.to_vec();
    let mut buffer = vec![0.0; profile.candidates()];
    for v in 0..profile.node_count() {
        if campaign.eligible(activation, v) {
            let row = profile.row(v);
            update_row(row, activation.incoming_mass(v), campaign, rule, &mut buffer);
            for ((s, new), old) in scores.iter_mut().zip(&buffer).zip(row) {
                *s += new - old;
            }
        }
    }
    scores
}

/// Expected candidate scores for one seed set and campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    /// `F(c, S)` per candidate.
    pub scores: Vec<f64>,
    /// Monte Carlo standard error per candidate; zero for exact reports.
    pub stderr: Vec<f64>,
    /// `F(c, ∅)` per candidate.
    pub before: Vec<f64>,
    /// Per-sample score vectors, kept for Monte Carlo reports so derived
    /// quantities get their own standard errors.
    draws: Option<Vec<Vec<f64>>>,
}

impl ScoreReport {
    fn exact(scores: Vec<f64>, before: Vec<f64>) -> Self {
        ScoreReport {
            stderr: vec![0.0; scores.len()],
            scores,
            before,
            draws: None,
        }
    }

    fn sampled(draws: Vec<Vec<f64>>, before: Vec<f64>) -> Self {
        let m = before.len();
        let (scores, stderr) = (0..m)
            .map(|c| {
                let column: Vec<f64> = draws.iter().map(|d| d[c]).collect();
                let e = diffusion::Estimate::from_samples(&column);
                (e.mean, e.stderr)
            })
            .unzip();
        ScoreReport {
            scores,
            stderr,
            before,
            draws: Some(draws),
        }
    }

    pub fn candidates(&self) -> usize {
        self.scores.len()
    }

    pub fn gain(&self, c: CandidateId) -> f64 {
        self.scores[c] - self.before[c]
    }

    pub fn is_exact(&self) -> bool {
        self.draws.is_none()
    }

    /// Number of Monte Carlo samples behind the report (0 when exact).
    pub fn sample_count(&self) -> usize {
        self.draws.as_ref().map_or(0, Vec::len)
    }
}

/// Monte Carlo expected scores over `config.samples` live-edge graphs. In each
/// sample the active set is the reachable set `R` of the seeds and every voter
/// receives the original weights of its in-neighbors in `R`.
pub fn expected_scores(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    campaign: &CampaignSpec,
    config: &EstimatorConfig,
) -> Result<ScoreReport> {
    expected_scores_with(graph, profile, seeds, campaign, config, UpdateRule::Normalized)
}

pub(crate) fn expected_scores_with(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    campaign: &CampaignSpec,
    config: &EstimatorConfig,
    rule: UpdateRule,
) -> Result<ScoreReport> {
    check_sizes(graph.node_count(), profile)?;
    check_seeds(graph, seeds)?;
    campaign.validate(profile.candidates())?;
    let before = profile.scores();
    let draws = diffusion::map_samples(graph, seeds, config, |activation| {
        activation_scores(profile, &before, activation, campaign, rule)
    })?;
    Ok(ScoreReport::sampled(draws, before))
}

/// Exact expected scores by enumerating every live-edge graph once; the
/// enumeration is reused across seed sets and campaigns.
pub struct ExactOracle<'g> {
    graph: &'g SocialGraph,
    worlds: Vec<(LiveEdgeGraph, f64)>,
}

impl<'g> ExactOracle<'g> {
    pub fn new(graph: &'g SocialGraph, cap: u64) -> Result<Self> {
        Ok(ExactOracle {
            graph,
            worlds: diffusion::enumerate_live_edge_graphs(graph, cap)?.collect(),
        })
    }

    pub fn graph(&self) -> &SocialGraph {
        self.graph
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    /// `(probability, activation)` for every live-edge graph.
    pub fn activations<'a>(&'a self, seeds: &'a [NodeId]) -> impl Iterator<Item = (f64, ActivationResult)> + 'a {
        self.worlds
            .iter()
            .map(move |(live, p)| (*p, ActivationResult::from_active(self.graph, live.reach_mask(seeds))))
    }

    pub fn scores(
        &self,
        profile: &PreferenceProfile,
        seeds: &[NodeId],
        campaign: &CampaignSpec,
    ) -> Result<ScoreReport> {
        self.scores_with(profile, seeds, campaign, UpdateRule::Normalized)
    }

    pub(crate) fn scores_with(
        &self,
        profile: &PreferenceProfile,
        seeds: &[NodeId],
        campaign: &CampaignSpec,
        rule: UpdateRule,
    ) -> Result<ScoreReport> {
        check_sizes(self.graph.node_count(), profile)?;
        check_seeds(self.graph, seeds)?;
        campaign.validate(profile.candidates())?;
        let before = profile.scores();
        if seeds.is_empty() {
            return Ok(ScoreReport::exact(before.clone(), before));
        }
        let mut scores = vec![0.0; before.len()];
        for (p, activation) in self.activations(seeds) {
            let world = activation_scores(profile, &before, &activation, campaign, rule);
            for (s, w) in scores.iter_mut().zip(world) {
                *s += p * w;
            }
        }
        Ok(ScoreReport::exact(scores, before))
    }

    /// Exact `σ_w(S)` over the stored enumeration.
    pub fn sigma_w(&self, weights: &diffusion::NodeWeights, seeds: &[NodeId]) -> f64 {
        self.worlds
            .iter()
            .map(|(live, p)| p * weights.total_over(&live.reach_mask(seeds)))
            .sum()
    }
}

/// Exact expected scores; fails when the graph has more than
/// 2^20 live-edge graphs.
pub fn exact_expected_scores(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    campaign: &CampaignSpec,
) -> Result<ScoreReport> {
    ExactOracle::new(graph, DEFAULT_ENUMERATION_CAP)?.scores(profile, seeds, campaign)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MovReport {
    /// Constructive `MoV(S)` or destructive `MoV_D(S)`, depending on the mode.
    pub mov: f64,
    pub stderr: f64,
    /// Strongest opponent of the target before the campaign (`c`).
    pub before_opponent: CandidateId,
    /// Strongest opponent of the target after the campaign (`ĉ`).
    pub after_opponent: CandidateId,
    /// `g⁺(c★, S) = F(c★, S) − F(c★, ∅)`.
    pub gain: f64,
    /// `g⁻(ĉ, S) = F(ĉ, ∅) − F(ĉ, S)`.
    pub loss: f64,
}

/// Highest-scoring candidate other than `target`; ties go to the lowest index.
fn strongest_opponent(scores: &[f64], target: CandidateId) -> CandidateId {
    let mut best: Option<CandidateId> = None;
    for (c, &s) in scores.iter().enumerate() {
        if c != target && best.is_none_or(|b| s > scores[b]) {
            best = Some(c);
        }
    }
    best.expect("at least two candidates")
}

/// Margin of victory of the campaign target.
///
/// Constructive: `MoV(S) = F(c,∅) − F(c★,∅) − (F(ĉ,S) − F(c★,S))`.
/// Destructive: `MoV_D(S) = F(ĉ,S) − F(c★,S) − (F(c,∅) − F(c★,∅))`.
pub fn margin_of_victory(report: &ScoreReport, campaign: &CampaignSpec) -> Result<MovReport> {
    let m = report.candidates();
    if m < 2 {
        return Err(Error::TooFewCandidates(m));
    }
    campaign.validate(m)?;
    let star = campaign.target;
    let c = strongest_opponent(&report.before, star);
    let hat = strongest_opponent(&report.scores, star);
    let before_gap = report.before[c] - report.before[star];
    let after_gap = report.scores[hat] - report.scores[star];
    let mov = match campaign.mode {
        Mode::Constructive => before_gap - after_gap,
        Mode::Destructive => after_gap - before_gap,
    };
    let stderr = report.draws.as_ref().map_or(0.0, |draws| {
        let gaps: Vec<f64> = draws.iter().map(|d| d[hat] - d[star]).collect();
        diffusion::Estimate::from_samples(&gaps).stderr
    });
    Ok(MovReport {
        mov,
        stderr,
        before_opponent: c,
        after_opponent: hat,
        gain: report.scores[star] - report.before[star],
        loss: report.before[hat] - report.scores[hat],
    })
}

/// Margin of victory of the target when the message supports the target
/// (`mov1`), its strongest post-campaign opponent (`mov2`), or any other
/// candidate (`mov3`). All strategies share the same activations; `ĉ` is the
/// opponent found by the `mov1` run.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyMovs {
    pub before_opponent: CandidateId,
    pub after_opponent: CandidateId,
    pub mov1: f64,
    pub mov2: f64,
    pub mov3: Vec<(CandidateId, f64)>,
}

fn strategy_draw(
    profile: &PreferenceProfile,
    before: &[f64],
    activation: &ActivationResult,
    target: CandidateId,
    model: Model,
) -> Vec<Vec<f64>> {
    (0..profile.candidates())
        .map(|x| {
            let campaign = CampaignSpec::new(target, model, Mode::Constructive).supporting(x);
            activation_scores(profile, before, activation, &campaign, UpdateRule::Normalized)
        })
        .collect()
}

fn assemble_strategies(before: &[f64], target: CandidateId, after_by_campaign: &[Vec<f64>]) -> StrategyMovs {
    let c = strongest_opponent(before, target);
    let hat = strongest_opponent(&after_by_campaign[target], target);
    let before_gap = before[c] - before[target];
    let mov_for = |x: CandidateId| before_gap - (after_by_campaign[x][hat] - after_by_campaign[x][target]);
    StrategyMovs {
        before_opponent: c,
        after_opponent: hat,
        mov1: mov_for(target),
        mov2: mov_for(hat),
        mov3: (0..before.len())
            .filter(|&x| x != target && x != hat)
            .map(|x| (x, mov_for(x)))
            .collect(),
    }
}

fn check_strategy_inputs(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    target: CandidateId,
) -> Result<()> {
    check_sizes(graph.node_count(), profile)?;
    check_seeds(graph, seeds)?;
    if profile.candidates() < 2 {
        return Err(Error::TooFewCandidates(profile.candidates()));
    }
    CampaignSpec::new(target, Model::Pltr, Mode::Constructive).validate(profile.candidates())
}

/// Monte Carlo estimate of the three campaign strategies on shared samples.
pub fn strategy_movs(
    graph: &SocialGraph,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    target: CandidateId,
    model: Model,
    config: &EstimatorConfig,
) -> Result<StrategyMovs> {
    check_strategy_inputs(graph, profile, seeds, target)?;
    let before = profile.scores();
    let m = profile.candidates();
    let draws = diffusion::map_samples(graph, seeds, config, |activation| {
        strategy_draw(profile, &before, activation, target, model)
    })?;
    let n = draws.len() as f64;
    let after: Vec<Vec<f64>> = (0..m)
        .map(|x| (0..m).map(|c| draws.iter().map(|d| d[x][c]).sum::<f64>() / n).collect())
        .collect();
    Ok(assemble_strategies(&before, target, &after))
}

/// Exact version of [`strategy_movs`].
pub fn exact_strategy_movs(
    oracle: &ExactOracle<'_>,
    profile: &PreferenceProfile,
    seeds: &[NodeId],
    target: CandidateId,
    model: Model,
) -> Result<StrategyMovs> {
    check_strategy_inputs(oracle.graph(), profile, seeds, target)?;
    let before = profile.scores();
    let m = profile.candidates();
    let mut after = vec![vec![0.0; m]; m];
    for (p, activation) in oracle.activations(seeds) {
        for (acc, world) in after
            .iter_mut()
            .zip(strategy_draw(profile, &before, &activation, target, model))
        {
            for (a, w) in acc.iter_mut().zip(world) {
                *a += p * w;
            }
        }
    }
    Ok(assemble_strategies(&before, target, &after))
}
