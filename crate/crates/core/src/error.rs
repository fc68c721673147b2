use thiserror::Error;

/// Errors produced by graph construction, the primal-dual algorithms, the
/// oracles and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is not connected")]
    Disconnected,

    #[error("failed to generate a connected graph after {attempts} attempts")]
    GenerationFailed { attempts: u32 },

    #[error("failed to generate a graph: density {density} on area {area} yields zero nodes")]
    NoNodes { area: f64, density: f64 },

    #[error("root {0} is not a member of the subset")]
    RootNotInSubset(usize),

    #[error("subgraph induced by the subset is not connected")]
    InducedDisconnected,

    #[error("MULE range {0} outside the open interval (0, 0.3)")]
    RangeOutOfBounds(f64),

    #[error("node set is not independent: nodes {0} and {1} are adjacent")]
    NotIndependent(usize, usize),

    #[error("node set does not dominate node {0}")]
    NotDominating(usize),

    #[error("oracle budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
