use thiserror::Error;

#[derive(Debug, Error)]
pub enum CmfError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("hamiltonian document contains no terms")]
    NoTerms,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n_sites} sites exceeds the dense cap of {cap}")]
    DimensionCap { n_sites: usize, cap: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("expectation value has imaginary residual {0:.3e}")]
    ImaginaryResidual(f64),

    #[error("site sets overlap at site {0}")]
    OverlappingSites(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Schmidt orthogonalization dropped every vector")]
    DegenerateBasis,

    #[error("requested {requested} states but only {available} are available")]
    EmptySelection { requested: usize, available: usize },

    #[error("multi-layer recursion exceeded depth {0}")]
    RecursionDepth(usize),

    #[error("partition {partition} stage {stage}: {source}")]
    Stage {
        partition: usize,
        stage: usize,
        #[source]
        source: Box<CmfError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CmfError {
    /// Records which partition a stage error came from.
    pub fn with_partition(self, index: usize) -> Self {
        match self {
            CmfError::Stage { stage, source, .. } => CmfError::Stage {
                partition: index,
                stage,
                source,
            },
            other => other,
        }
    }

    /// Input errors map to exit code 2, numeric failures to 3.
    pub fn is_input_error(&self) -> bool {
        match self {
            CmfError::Parse { .. }
            | CmfError::NoTerms
            | CmfError::InvalidPartition(_)
            | CmfError::InvalidConfig(_)
            | CmfError::Io(_) => true,
            CmfError::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, CmfError>;
