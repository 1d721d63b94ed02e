use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("node identifiers {first:?} and {second:?} refer to the same node")]
    IdentifierCollision { first: String, second: String },

    #[error("node {0:?} has no label")]
    MissingLabel(String),

    #[error("unknown node identifier {0:?}")]
    UnknownNode(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid preference profile: {0}")]
    InvalidProfile(String),

    #[error("invalid campaign: {0}")]
    InvalidCampaign(String),

    #[error("gadget requires gamma >= 4, got {0}")]
    InvalidGamma(u32),

    #[error("enumeration needs {required} live-edge graphs, cap is {cap}")]
    EnumerationCap { required: f64, cap: u64 },

    #[error("sample count must be at least 1")]
    ZeroSamples,

    #[error("budget {budget} exceeds node count {nodes}")]
    BudgetTooLarge { budget: usize, nodes: usize },

    #[error("exhaustive search over {nodes} nodes with budget {budget} exceeds the limit of {max_nodes} nodes and budget {max_budget}")]
    SearchTooLarge {
        nodes: usize,
        budget: usize,
        max_nodes: usize,
        max_budget: usize,
    },

    #[error("node count mismatch: graph has {graph}, profile has {profile}")]
    NodeCountMismatch { graph: usize, profile: usize },

    #[error("margin of victory needs at least 2 candidates, got {0}")]
    TooFewCandidates(usize),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
