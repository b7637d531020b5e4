use thiserror::Error;

/// Errors produced by graph construction, estimation and simulation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("singular design: column for node {node} is linearly dependent on the other columns")]
    SingularDesign { node: usize },

    #[error("insufficient rows: {rows} observations for {cols} coefficients")]
    InsufficientRows { rows: usize, cols: usize },

    #[error("degenerate fit: residual sum of squares is {0}")]
    DegenerateFit(f64),

    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("constant response: total sum of squares is zero")]
    ConstantResponse,

    #[error("empty selection path: {0}")]
    EmptyPath(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("unstable coefficients: spectral radius {0:.6} is not below one")]
    UnstableTruth(f64),

    #[error("network has no edges; row-normalized weights are undefined")]
    NoNetwork,

    #[error("response total is zero")]
    DegenerateTotal,

    #[error("covariate matrix is rank deficient")]
    SingularCovariates,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("replication {rep}: {source}")]
    Replication {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping stage and replication wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } | Error::Replication { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
