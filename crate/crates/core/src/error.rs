use std::path::PathBuf;

use crate::clustering::SdpDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A graphon was evaluated outside the unit square.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size or count argument is out of range (block count larger than a graph, K > m, ...).
    #[error("size error: {0}")]
    Size(String),

    /// Malformed in-memory input: non-finite entries, mismatched lengths, invalid graphs.
    #[error("input error: {0}")]
    Input(String),

    /// Every off-diagonal distance in a row is zero, so no bandwidth can be chosen.
    #[error("degenerate population: {0}")]
    DegeneratePopulation(String),

    #[error(
        "SDP solver did not converge after {} iterations (primal residual {:.3e}, dual residual {:.3e})",
        .0.iterations, .0.primal_residual, .0.dual_residual
    )]
    Convergence(SdpDiagnostics),

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: node id {id} out of range 1..={max}", path.display())]
    NodeOutOfRange {
        path: PathBuf,
        line: usize,
        id: usize,
        max: usize,
    },

    #[error("no graphs left in {} after filtering (min_nodes = {min_nodes})", path.display())]
    EmptyDataset { path: PathBuf, min_nodes: usize },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI's one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Size(_) => "size",
            Error::Input(_) => "input",
            Error::DegeneratePopulation(_) => "degenerate_population",
            Error::Convergence(_) => "convergence",
            Error::MissingFile(_) => "missing_file",
            Error::Parse { .. } => "parse",
            Error::NodeOutOfRange { .. } => "node_out_of_range",
            Error::EmptyDataset { .. } => "empty_dataset",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
