use std::path::PathBuf;

use crate::metric::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid point: {0}")]
    InvalidPoint(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),

    #[error("center set is empty")]
    EmptyCenters,

    #[error("cluster is empty")]
    EmptyCluster,

    #[error("candidate set is empty")]
    EmptyCandidates,

    #[error("{what}: enumeration size {size} exceeds the limit of {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: f64,
        limit: f64,
    },

    #[error("degenerate reference solution: {0}")]
    DegenerateReference(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("distance matrix is not a metric: {0}")]
    InvalidMetric(ValidationReport),

    #[error("selector failed in round {round}: {source}")]
    Selector {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("trace does not match the data set: {0}")]
    TraceMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
